#include "atlas/trends.hpp"

#include <cmath>

#include "atlas/csv.hpp"
#include "atlas/error.hpp"

namespace atlas {

void TrendParams::validate() const {
  if (!(bandwidth_years > 0.0)) {
    throw Error(ErrorKind::InvalidParams, "bandwidth must be > 0, got " + csv::format_real(bandwidth_years));
  }
  if (!(ridge_lambda >= 0.0) || !std::isfinite(ridge_lambda)) {
    throw Error(ErrorKind::InvalidParams, "ridge lambda must be finite and >= 0");
  }
}

double tricube_weight(double u) noexcept {
  const double a = std::abs(u);
  if (!(a < 1.0)) return 0.0;
  const double inner = 1.0 - a * a * a;
  return inner * inner * inner;
}

LocalFit local_ridge_fit(const DenseSeries& v, int t0, const TrendParams& params) {
  params.validate();
  // Weighted moments of the centered design [1, t - t0].
  double s0 = 0.0, s1 = 0.0, s2 = 0.0, r0 = 0.0, r1 = 0.0;
  std::size_t support = 0;
  for (std::size_t i = 0; i < v.values.size(); ++i) {
    const double u = static_cast<double>(v.span.first + static_cast<int>(i) - t0);
    const double w = tricube_weight(u / params.bandwidth_years);
    if (w <= 0.0) continue;
    ++support;
    s0 += w;
    s1 += w * u;
    s2 += w * u * u;
    r0 += w * v.values[i];
    r1 += w * u * v.values[i];
  }
  if (support == 0) {
    throw Error(ErrorKind::EmptyWindow, v.key.str() + " has no weighted years around " + std::to_string(t0));
  }
  if (support == 1 && params.ridge_lambda == 0.0) return {r0 / s0, 0.0};

  const double a11 = s2 + params.ridge_lambda;
  const double det = s0 * a11 - s1 * s1;
  return {(a11 * r0 - s1 * r1) / det, (s0 * r1 - s1 * r0) / det};
}

TrendGrid trend_grid(const DenseSeries& v, const TrendParams& params) {
  params.validate();
  if (v.span.size() < 2) throw Error(ErrorKind::InvalidParams, v.key.str() + " spans fewer than 2 years");

  double scale = 0.0;
  for (double x : v.values) scale = std::max(scale, std::abs(x));
  if (scale == 0.0) scale = 1.0;
  DenseSeries unit = v;
  for (double& x : unit.values) x /= scale;

  TrendGrid g{v.key, v.span, {}, {}, params};
  g.level.reserve(v.span.size());
  g.slope.reserve(v.span.size());
  for (int year = v.span.first; year <= v.span.last; ++year) {
    const auto fit = local_ridge_fit(unit, year, params);
    g.level.push_back(fit.level * scale);
    g.slope.push_back(fit.slope * scale);
  }
  return g;
}

}  // namespace atlas
