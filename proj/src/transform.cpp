#include "atlas/transform.hpp"

#include <cmath>
#include <fstream>

#include "atlas/csv.hpp"
#include "atlas/error.hpp"

namespace atlas {

void ConversionTable::set(const std::string& drug, double factor) {
  if (!std::isfinite(factor) || factor <= 0.0) {
    throw Error(ErrorKind::InvalidFactor, drug + " factor " + csv::format_real(factor) + " must be finite and > 0");
  }
  if (drug == "morphine" && factor != 1.0) {
    throw Error(ErrorKind::InvalidFactor, "morphine factor must be exactly 1");
  }
  factors_[drug] = factor;
}

std::optional<double> ConversionTable::factor(const std::string& drug) const {
  const auto it = factors_.find(drug);
  if (it == factors_.end()) return std::nullopt;
  return it->second;
}

ConversionTable ConversionTable::load(std::istream& in) {
  ConversionTable table;
  std::string line;
  std::size_t line_no = 0;
  if (!csv::next_line(in, line, line_no)) return table;
  const auto header = csv::split_line(line);
  if (!header || header->size() != 2 || csv::fold((*header)[0]) != "drug" ||
      csv::fold((*header)[1]) != "factor") {
    throw Error(ErrorKind::InvalidFactor, "conversion table header must be 'drug,factor'");
  }
  while (csv::next_line(in, line, line_no)) {
    if (csv::trim(line).front() == '#') continue;
    const auto fields = csv::split_line(line);
    if (!fields || fields->size() != 2) {
      throw Error(ErrorKind::InvalidFactor, "conversion table row " + std::to_string(line_no) + " is malformed");
    }
    const auto value = csv::parse_real((*fields)[1]);
    if (!value) {
      throw Error(ErrorKind::InvalidFactor,
                  "conversion table row " + std::to_string(line_no) + ": bad factor '" + (*fields)[1] + "'");
    }
    table.set(csv::fold((*fields)[0]), *value);
  }
  return table;
}

ConversionTable ConversionTable::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::IoFailure, "cannot open '" + path.string() + "'");
  return load(in);
}

Series to_morphine_equivalent(const Series& s, const ConversionTable& table) {
  const auto factor = table.factor(s.key.drug);
  if (!factor) throw Error(ErrorKind::MissingFactor, s.key.drug);
  Series out = s;
  for (auto& v : out.values) {
    if (!v) continue;
    *v *= *factor;
    if (!std::isfinite(*v)) {
      throw Error(ErrorKind::NonFiniteInput, s.key.str() + ": morphine-equivalent value overflows");
    }
  }
  return out;
}

DenseSeries densify(const Series& s, YearSpan span) {
  DenseSeries out{s.key, span, std::vector<double>(span.size(), 0.0)};
  for (int year = s.span.first; year <= s.span.last; ++year) {
    const auto v = s.at(year);
    if (!v) continue;
    if (!span.contains(year)) {
      throw Error(ErrorKind::SpanMismatch, s.key.str() + " has a value in " + std::to_string(year) +
                                               ", outside the target span");
    }
    out.values[span.index(year)] = *v;
  }
  return out;
}

DenseSeries densify(const Series& s) { return densify(s, s.span); }

namespace {

// std::cbrt may be off by one ulp; pick the neighbor whose cube is closest in
// extended precision so exact cubes map to exact roots.
double correct_cbrt(double x) {
  const double r = std::cbrt(x);
  if (x == 0.0 || !std::isfinite(r)) return r;
  double best = r;
  long double best_err = std::abs(static_cast<long double>(r) * r * r - x);
  for (double c : {std::nextafter(r, 0.0), std::nextafter(r, HUGE_VAL)}) {
    const long double err = std::abs(static_cast<long double>(c) * c * c - x);
    if (err < best_err) {
      best = c;
      best_err = err;
    }
  }
  return best;
}

}  // namespace

DenseSeries cube_root(const DenseSeries& v) {
  DenseSeries out = v;
  for (auto& x : out.values) {
    if (!(x >= 0.0)) {
      throw Error(ErrorKind::NegativeValue, v.key.str() + " holds " + csv::format_real(x));
    }
    x = correct_cbrt(x);
  }
  return out;
}

}  // namespace atlas
