#pragma once

#include <limits>
#include <vector>

#include "atlas/types.hpp"

namespace atlas {

struct TrendParams {
  /// Kernel half-width in years; may be +infinity for uniform weights.
  double bandwidth_years = 7.0;
  /// Penalty on the slope coefficient only.
  double ridge_lambda = 0.01;

  void validate() const;
  friend bool operator==(const TrendParams&, const TrendParams&) = default;
};

/// (1 - |u|^3)^3 on |u| < 1, zero elsewhere.
double tricube_weight(double u) noexcept;

struct LocalFit {
  double level = 0.0;
  double slope = 0.0;
};

/// Minimizes sum_t w_t (v_t - b0 - b1 (t - t0))^2 + lambda b1^2 with
/// w_t = tricube((t - t0) / h), on the values exactly as given. With lambda = 0
/// and a single weighted time point the slope is 0 and the level is the
/// weighted mean.
LocalFit local_ridge_fit(const DenseSeries& v, int t0, const TrendParams& params);

struct TrendGrid {
  SeriesKey key;
  YearSpan years;
  std::vector<double> level;
  std::vector<double> slope;
  TrendParams params;

  friend bool operator==(const TrendGrid&, const TrendGrid&) = default;
};

/// Fits every year of the span. The series is first divided by its largest
/// absolute value so one lambda behaves alike across very different scales;
/// levels and slopes are multiplied back afterwards.
TrendGrid trend_grid(const DenseSeries& v, const TrendParams& params);

}  // namespace atlas
