#pragma once

#include <filesystem>
#include <istream>
#include <map>
#include <string>

#include "atlas/types.hpp"

namespace atlas {

/// Drug -> morphine-equivalence multiplier per kilogram. Factors are finite
/// and positive; morphine, when listed, is exactly 1.
class ConversionTable {
 public:
  void set(const std::string& drug, double factor);
  std::optional<double> factor(const std::string& drug) const;
  const std::map<std::string, double>& factors() const noexcept { return factors_; }

  /// Two-column CSV with header `drug,factor`.
  static ConversionTable load(std::istream& in);
  static ConversionTable load(const std::filesystem::path& path);

  friend bool operator==(const ConversionTable&, const ConversionTable&) = default;

 private:
  std::map<std::string, double> factors_;
};

Series to_morphine_equivalent(const Series& s, const ConversionTable& table);

/// Missing years become 0.0; the result covers `span`, which must contain
/// the series' own span.
DenseSeries densify(const Series& s, YearSpan span);
DenseSeries densify(const Series& s);

DenseSeries cube_root(const DenseSeries& v);

}  // namespace atlas
