// Independent reference computations used by the unit and acceptance suites.
// Nothing here calls into the library's numeric code paths.
#pragma once

#include <array>
#include <cmath>
#include <limits>
#include <optional>
#include <random>
#include <vector>

namespace atlas::oracle {

/// Cognostic fields computed by enumerating every ordered pair of years.
struct CognosticTruth {
  double net_change = 0.0;
  std::optional<double> max_increase;
  std::optional<double> max_decrease;
  double mean_level = 0.0;
  double latest_value = 0.0;
};

inline CognosticTruth brute_force_cognostics(const std::vector<std::optional<double>>& values) {
  CognosticTruth t;
  const std::size_t n = values.size();
  std::optional<std::size_t> first, last;
  for (std::size_t i = 0; i < n; ++i) {
    if (!values[i]) continue;
    if (!first) first = i;
    last = i;
  }
  t.net_change = *values[*last] - *values[*first];
  t.latest_value = *values[*last];
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (j != i + 1 || !values[i] || !values[j]) continue;
      const double d = *values[j] - *values[i];
      if (!t.max_increase || d > *t.max_increase) t.max_increase = d;
      if (!t.max_decrease || d < *t.max_decrease) t.max_decrease = d;
    }
  }
  double sum = 0.0;
  int count = 0;
  for (const auto& v : values) {
    if (v) {
      sum += *v;
      ++count;
    }
  }
  t.mean_level = sum / count;
  return t;
}

/// Ordinary least squares line y = a + b t through (t_k, y_k), via the
/// uncentered 2x2 normal equations solved by Cramer's rule.
struct Line {
  double intercept = 0.0;
  double slope = 0.0;
  double at(double t) const { return intercept + slope * t; }
};

inline Line ols_normal_equations(const std::vector<double>& t, const std::vector<double>& y) {
  long double n = 0, st = 0, stt = 0, sy = 0, sty = 0;
  for (std::size_t k = 0; k < t.size(); ++k) {
    n += 1;
    st += t[k];
    stt += static_cast<long double>(t[k]) * t[k];
    sy += y[k];
    sty += static_cast<long double>(t[k]) * y[k];
  }
  const long double det = n * stt - st * st;
  return {static_cast<double>((stt * sy - st * sty) / det), static_cast<double>((n * sty - st * sy) / det)};
}

/// Penalized local objective evaluated directly from its definition.
inline double ridge_objective(const std::vector<double>& years, const std::vector<double>& y, double t0, double h,
                              double lambda, double b0, double b1) {
  double total = lambda * b1 * b1;
  for (std::size_t k = 0; k < years.size(); ++k) {
    const double u = (years[k] - t0) / h;
    const double a = std::abs(u);
    const double w = a < 1.0 ? std::pow(1.0 - a * a * a, 3) : 0.0;
    const double r = y[k] - b0 - b1 * (years[k] - t0);
    total += w * r * r;
  }
  return total;
}

/// Exhaustive search of the objective on a (2m+1) x (2m+1) grid centered on
/// (c0, c1) with spacing (s0, s1). Returns the best grid point and its value.
struct GridBest {
  double b0, b1, value;
};

template <class Objective>
GridBest grid_search(Objective&& f, double c0, double c1, double s0, double s1, int m) {
  GridBest best{c0, c1, std::numeric_limits<double>::infinity()};
  for (int i = -m; i <= m; ++i) {
    for (int j = -m; j <= m; ++j) {
      const double b0 = c0 + i * s0, b1 = c1 + j * s1;
      const double v = f(b0, b1);
      if (v < best.value) best = {b0, b1, v};
    }
  }
  return best;
}

using P2 = std::array<double, 2>;

inline std::vector<P2> random_planar_points(std::mt19937_64& rng, std::size_t n, double scale = 10.0) {
  std::uniform_real_distribution<double> u(-scale, scale);
  std::vector<P2> pts(n);
  for (auto& p : pts) p = {u(rng), u(rng)};
  return pts;
}

/// Row-major distance matrix of planar points.
inline std::vector<double> planar_distances(const std::vector<P2>& pts) {
  const std::size_t n = pts.size();
  std::vector<double> d(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double v = std::sqrt((pts[i][0] - pts[j][0]) * (pts[i][0] - pts[j][0]) +
                                 (pts[i][1] - pts[j][1]) * (pts[i][1] - pts[j][1]));
      d[i * n + j] = d[j * n + i] = v;
    }
  }
  return d;
}

/// Random symmetric dissimilarities: planar distances perturbed by a
/// multiplicative factor, so the matrix is generally not Euclidean.
inline std::vector<double> random_dissimilarities(std::mt19937_64& rng, std::size_t n) {
  auto d = planar_distances(random_planar_points(rng, n));
  std::uniform_real_distribution<double> f(0.5, 1.5);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double v = d[i * n + j] * f(rng);
      d[i * n + j] = d[j * n + i] = v;
    }
  }
  return d;
}

/// Largest |reproduced - target| / target over i < j with target > 0.
template <class Coords>
double max_relative_error(const std::vector<double>& d, const Coords& coords) {
  const std::size_t n = coords.size();
  double worst = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double target = d[i * n + j];
      const double got = std::hypot(coords[i][0] - coords[j][0], coords[i][1] - coords[j][1]);
      if (target > 0.0) worst = std::max(worst, std::abs(got - target) / target);
      else worst = std::max(worst, got);
    }
  }
  return worst;
}

}  // namespace atlas::oracle
