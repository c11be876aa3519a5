#pragma once

#include <filesystem>
#include <istream>
#include <map>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "atlas/types.hpp"

namespace atlas {

/// The fixed region set used to group countries.
inline const std::vector<std::string>& region_set() {
  static const std::vector<std::string> regions{"Africa", "Americas", "Asia", "Europe", "Oceania"};
  return regions;
}

/// iso3 -> CountryRef. Loaded from `iso3,display_name,region` CSV.
class CountryRegistry {
 public:
  CountryRegistry() = default;

  void add(CountryRef country);
  const CountryRef* find(std::string_view iso3) const;
  /// Looks up by case/whitespace-folded display name.
  const CountryRef* find_by_name(std::string_view raw_name) const;
  const std::map<std::string, CountryRef>& entries() const noexcept { return by_iso3_; }
  std::size_t size() const noexcept { return by_iso3_.size(); }

  static CountryRegistry load(std::istream& in);
  static CountryRegistry load(const std::filesystem::path& path);

  friend bool operator==(const CountryRegistry& a, const CountryRegistry& b) {
    return a.by_iso3_ == b.by_iso3_;
  }

 private:
  std::map<std::string, CountryRef> by_iso3_;
  std::map<std::string, std::string> by_folded_name_;
};

/// Folded raw name -> iso3. Loaded from `raw_name,iso3` CSV.
class AliasTable {
 public:
  void add(std::string_view raw_name, std::string iso3);
  const std::string* find(std::string_view raw_name) const;
  std::size_t size() const noexcept { return table_.size(); }

  /// Every target iso3 must exist in `registry`.
  static AliasTable load(std::istream& in, const CountryRegistry& registry);
  static AliasTable load(const std::filesystem::path& path, const CountryRegistry& registry);

 private:
  std::map<std::string, std::string> table_;
};

/// Canonical drug names plus aliases. One canonical name per line, optional
/// comma-separated aliases after it; `#` starts a comment.
class DrugRegistry {
 public:
  void add(std::string canonical, const std::vector<std::string>& aliases = {});
  /// Lowercases and trims `token`, then resolves it through the aliases.
  std::optional<DrugKind> resolve(std::string_view token) const;
  bool contains(std::string_view canonical) const { return names_.contains(std::string(canonical)); }
  std::vector<std::string> names() const;

  static DrugRegistry defaults();
  static DrugRegistry load(std::istream& in);
  static DrugRegistry load(const std::filesystem::path& path);

 private:
  std::map<std::string, std::vector<std::string>, std::less<>> names_;
  std::map<std::string, std::string, std::less<>> lookup_;
};

struct Registries {
  CountryRegistry countries;
  AliasTable aliases;
  DrugRegistry drugs;
};

/// Column names of the long-format consumption table.
struct CsvSchema {
  std::string country = "country";
  std::string drug = "drug";
  std::string year = "year";
  std::string quantity = "quantity_kg";
};

enum class UnknownCountryMode { Error, Report };

struct ParseOptions {
  CsvSchema schema;
  YearSpan years = kDefaultYears;
  UnknownCountryMode unknown_countries = UnknownCountryMode::Error;
};

struct ParseResult {
  std::vector<ConsumptionRecord> records;
  /// Raw names that did not resolve, in first-seen order (Report mode only).
  std::vector<std::string> unmatched_countries;
};

/// Resolves a raw country name through the alias table, then the registry's
/// display names, then the iso3 codes themselves. Matching is on folded text.
CountryRef normalize_country(std::string_view raw_name, const AliasTable& aliases,
                             const CountryRegistry& registry);

ParseResult parse_consumption_csv(std::istream& in, const Registries& registries,
                                  const ParseOptions& options = {});

enum class DuplicatePolicy { Error, Sum };

SeriesMap build_series(const std::vector<ConsumptionRecord>& records,
                       DuplicatePolicy policy = DuplicatePolicy::Error,
                       YearSpan years = kDefaultYears);

/// Writes the present cells of `series` back out as long-format rows, using
/// registry display names for the country column.
void write_consumption_csv(std::ostream& out, const SeriesMap& series,
                           const CountryRegistry& registry, const CsvSchema& schema = {});

}  // namespace atlas
