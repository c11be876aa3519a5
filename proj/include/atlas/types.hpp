#pragma once

#include <compare>
#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace atlas {

/// Inclusive calendar-year range.
struct YearSpan {
  int first = 1989;
  int last = 2013;

  std::size_t size() const noexcept {
    return last < first ? 0 : static_cast<std::size_t>(last - first + 1);
  }
  bool contains(int year) const noexcept { return year >= first && year <= last; }
  std::size_t index(int year) const noexcept { return static_cast<std::size_t>(year - first); }

  friend bool operator==(const YearSpan&, const YearSpan&) = default;
};

inline constexpr YearSpan kDefaultYears{1989, 2013};

/// A country in the registry. `iso3` is the join key used everywhere else.
struct CountryRef {
  std::string iso3;
  std::string display_name;
  std::string region;

  friend bool operator==(const CountryRef&, const CountryRef&) = default;
};

/// Canonical (lowercase, whitespace-free) drug name.
struct DrugKind {
  std::string canonical_name;

  friend auto operator<=>(const DrugKind&, const DrugKind&) = default;
};

/// Identifies one (country, drug) time series.
struct SeriesKey {
  std::string iso3;
  std::string drug;

  /// "ISO:drug", the form used as an object key in the bundle.
  std::string str() const { return iso3 + ":" + drug; }
  static SeriesKey parse(const std::string& text);

  friend auto operator<=>(const SeriesKey&, const SeriesKey&) = default;
};

struct ConsumptionRecord {
  CountryRef country;
  DrugKind drug;
  int year = 0;
  double quantity_kg = 0.0;

  friend bool operator==(const ConsumptionRecord&, const ConsumptionRecord&) = default;
};

/// Annual quantities for one key. An empty optional is a missing year; a
/// present 0.0 is a reported zero.
struct Series {
  SeriesKey key;
  YearSpan span;
  std::vector<std::optional<double>> values;

  Series() = default;
  Series(SeriesKey k, YearSpan s) : key(std::move(k)), span(s), values(s.size()) {}

  std::optional<double> at(int year) const {
    return span.contains(year) ? values[span.index(year)] : std::nullopt;
  }
  void set(int year, double v) { values.at(span.index(year)) = v; }
  std::size_t present_count() const;

  friend bool operator==(const Series&, const Series&) = default;
};

using SeriesMap = std::map<SeriesKey, Series>;

/// Gap-free numeric vector aligned to a year span.
struct DenseSeries {
  SeriesKey key;
  YearSpan span;
  std::vector<double> values;

  friend bool operator==(const DenseSeries&, const DenseSeries&) = default;
};

}  // namespace atlas
