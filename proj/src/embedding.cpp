#include "atlas/embedding.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "atlas/error.hpp"
#include "atlas/parallel.hpp"

namespace atlas {

namespace {
// Rows per worker for O(n) row loops; below this, thread start-up outweighs the row work.
constexpr std::size_t kRowsPerWorker = 128;
}  // namespace
namespace {

constexpr double kNegligibleEigen = 1e-10;

double dist(const Point2& a, const Point2& b) { return std::hypot(a[0] - b[0], a[1] - b[1]); }

void check_coords(const DistanceMatrix& d, std::span<const Point2> coords) {
  if (coords.size() != d.size()) {
    throw Error(ErrorKind::DimensionMismatch, std::to_string(coords.size()) + " points for a " +
                                                  std::to_string(d.size()) + "-key distance matrix");
  }
}

// Row sums are formed independently and then added in row order, so the
// value is the same for every thread count.
struct StressParts {
  double residual = 0.0;
  double target = 0.0;
};

StressParts stress_parts(const DistanceMatrix& d, std::span<const Point2> x, unsigned threads) {
  const std::size_t n = d.size();
  std::vector<StressParts> rows(n);
  parallel_for(n, threads, [&](std::size_t i) {
    StressParts p;
    for (std::size_t j = i + 1; j < n; ++j) {
      const double delta = d(i, j);
      const double r = dist(x[i], x[j]) - delta;
      p.residual += r * r;
      p.target += delta * delta;
    }
    rows[i] = p;
  }, kRowsPerWorker);
  StressParts total;
  for (const auto& p : rows) {
    total.residual += p.residual;
    total.target += p.target;
  }
  return total;
}

double normalized(const StressParts& p) {
  if (p.target == 0.0) return p.residual == 0.0 ? 0.0 : 1.0;
  return std::sqrt(p.residual / p.target);
}

}  // namespace

DistanceMatrix DistanceMatrix::from_rows(std::vector<SeriesKey> keys, std::vector<double> row_major) {
  const std::size_t n = keys.size();
  if (row_major.size() != n * n) {
    throw Error(ErrorKind::DimensionMismatch,
                std::to_string(row_major.size()) + " entries for " + std::to_string(n) + " keys");
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (row_major[i * n + i] != 0.0) throw Error(ErrorKind::NonFiniteInput, "nonzero diagonal");
    for (std::size_t j = 0; j < n; ++j) {
      const double v = row_major[i * n + j];
      if (!std::isfinite(v) || v < 0.0) {
        throw Error(ErrorKind::NonFiniteInput, "entry (" + std::to_string(i) + ", " + std::to_string(j) +
                                                   ") is negative or non-finite");
      }
      if (v != row_major[j * n + i]) throw Error(ErrorKind::NonFiniteInput, "matrix is not symmetric");
    }
  }
  DistanceMatrix m;
  m.keys_ = std::move(keys);
  m.d_ = std::move(row_major);
  return m;
}

DistanceMatrix pairwise_distances(std::span<const DenseSeries> series, unsigned threads) {
  const std::size_t n = series.size();
  for (const auto& s : series) {
    if (s.span != series.front().span || s.values.size() != series.front().values.size()) {
      throw Error(ErrorKind::SpanMismatch, s.key.str() + " is not aligned with " + series.front().key.str());
    }
  }
  DistanceMatrix m;
  m.keys_.reserve(n);
  for (const auto& s : series) m.keys_.push_back(s.key);
  m.d_.assign(n * n, 0.0);
  parallel_for(n, threads, [&](std::size_t i) {
    const auto& a = series[i].values;
    for (std::size_t j = i + 1; j < n; ++j) {
      const auto& b = series[j].values;
      double sum = 0.0;
      for (std::size_t t = 0; t < a.size(); ++t) {
        const double diff = a[t] - b[t];
        sum += diff * diff;
      }
      const double v = std::sqrt(sum);
      if (!std::isfinite(v)) throw Error(ErrorKind::NonFiniteInput, series[i].key.str());
      m.d_[i * n + j] = v;
      m.d_[j * n + i] = v;
    }
  });
  return m;
}

double stress(const DistanceMatrix& d, std::span<const Point2> coords) {
  check_coords(d, coords);
  return normalized(stress_parts(d, coords, 1));
}

void canonicalize(std::vector<Point2>& coords) {
  const std::size_t n = coords.size();
  if (n == 0) return;
  Point2 mean{0.0, 0.0};
  for (const auto& p : coords) {
    mean[0] += p[0];
    mean[1] += p[1];
  }
  mean[0] /= static_cast<double>(n);
  mean[1] /= static_cast<double>(n);
  double sxx = 0.0, syy = 0.0, sxy = 0.0;
  for (auto& p : coords) {
    p[0] -= mean[0];
    p[1] -= mean[1];
    sxx += p[0] * p[0];
    syy += p[1] * p[1];
    sxy += p[0] * p[1];
  }
  // Principal-axis angle of the 2x2 scatter matrix.
  const double theta = 0.5 * std::atan2(2.0 * sxy, sxx - syy);
  if (theta != 0.0) {
    const double c = std::cos(theta), s = std::sin(theta);
    for (auto& p : coords) {
      const double x = c * p[0] + s * p[1];
      const double y = -s * p[0] + c * p[1];
      p = {x, y};
    }
  }
  double scale = 0.0;
  for (const auto& p : coords) scale = std::max({scale, std::abs(p[0]), std::abs(p[1])});
  const double eps = 1e-12 * scale;
  for (int axis = 0; axis < 2; ++axis) {
    const auto it = std::find_if(coords.begin(), coords.end(),
                                 [&](const Point2& p) { return std::abs(p[axis]) > eps; });
    const bool flip = it != coords.end() && (*it)[axis] < 0.0;
    for (auto& p : coords) {
      if (flip) p[axis] = -p[axis];
      if (std::abs(p[axis]) <= eps) p[axis] = 0.0;
    }
  }
}

Embedding classical_mds(const DistanceMatrix& d) {
  const std::size_t n = d.size();
  if (n < 3) throw Error(ErrorKind::TooFewPoints, "classical MDS needs at least 3 points, got " + std::to_string(n));
  const auto size = static_cast<Eigen::Index>(n);

  Eigen::MatrixXd sq(size, size);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const double v = d(i, j);
      if (!std::isfinite(v)) throw Error(ErrorKind::NonFiniteInput, "distance matrix");
      sq(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = v * v;
    }
  }
  // B = -1/2 J D^2 J, formed by subtracting row/column means.
  const Eigen::VectorXd row_mean = sq.rowwise().mean();
  const double grand_mean = row_mean.mean();
  Eigen::MatrixXd b(size, size);
  for (Eigen::Index i = 0; i < size; ++i) {
    for (Eigen::Index j = 0; j < size; ++j) {
      b(i, j) = -0.5 * (sq(i, j) - row_mean(i) - row_mean(j) + grand_mean);
    }
  }
  b = 0.5 * (b + b.transpose()).eval();

  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(b);
  if (solver.info() != Eigen::Success) throw Error(ErrorKind::NonFiniteInput, "eigen decomposition failed");
  const auto& values = solver.eigenvalues();  // ascending
  const auto& vectors = solver.eigenvectors();
  const double top = values(size - 1);

  Embedding e;
  e.keys = d.keys();
  e.coords.assign(n, Point2{0.0, 0.0});
  for (int axis = 0; axis < 2; ++axis) {
    const Eigen::Index k = size - 1 - axis;
    const double lambda = values(k);
    if (!(lambda > 0.0) || lambda <= kNegligibleEigen * std::abs(top)) continue;
    const double root = std::sqrt(lambda);
    for (std::size_t i = 0; i < n; ++i) e.coords[i][static_cast<std::size_t>(axis)] = root * vectors(static_cast<Eigen::Index>(i), k);
  }
  canonicalize(e.coords);
  e.stress = stress(d, e.coords);
  e.iterations = 0;
  return e;
}

Embedding smacof_refine(const DistanceMatrix& d, const Embedding& init, const SmacofOptions& options,
                        std::vector<double>* trace) {
  if (init.keys != d.keys()) throw Error(ErrorKind::DimensionMismatch, "initial layout keys differ from the distance matrix");
  check_coords(d, init.coords);
  if (!(options.tol > 0.0)) throw Error(ErrorKind::InvalidParams, "tolerance must be positive");

  const std::size_t n = d.size();
  std::vector<Point2> x = init.coords;
  std::vector<Point2> next(n);
  double current = normalized(stress_parts(d, x, options.threads));
  if (trace) {
    trace->clear();
    trace->push_back(current);
  }

  std::size_t iterations = 0;
  if (current > 0.0) {
    const double inv_n = 1.0 / static_cast<double>(n);
    for (std::size_t it = 1; it <= options.max_iter; ++it) {
      // Guttman transform: x_i <- (1/n) sum_j (d_ij / |x_i - x_j|) (x_i - x_j).
      parallel_for(n, options.threads, [&](std::size_t i) {
        Point2 acc{0.0, 0.0};
        for (std::size_t j = 0; j < n; ++j) {
          if (j == i) continue;
          const double dij = dist(x[i], x[j]);
          if (dij <= 0.0) continue;
          const double ratio = d(i, j) / dij;
          acc[0] += ratio * (x[i][0] - x[j][0]);
          acc[1] += ratio * (x[i][1] - x[j][1]);
        }
        next[i] = {acc[0] * inv_n, acc[1] * inv_n};
      }, kRowsPerWorker);
      x.swap(next);
      const double updated = normalized(stress_parts(d, x, options.threads));
      if (trace) trace->push_back(updated);
      iterations = it;
      const bool converged = current - updated < options.tol * current;
      current = updated;
      if (converged || current == 0.0) break;
    }
  }

  canonicalize(x);
  Embedding out;
  out.keys = init.keys;
  out.coords = std::move(x);
  out.stress = normalized(stress_parts(d, out.coords, options.threads));
  out.iterations = iterations;
  return out;
}

Layout compute_layout(std::span<const DenseSeries> cube_rooted, const SmacofOptions& options) {
  Layout layout;
  if (cube_rooted.size() < 3) {
    layout.empty = true;
    layout.reason = "fewer than 3 series (" + std::to_string(cube_rooted.size()) + ")";
    return layout;
  }
  const auto d = pairwise_distances(cube_rooted, options.threads);
  layout.embedding = smacof_refine(d, classical_mds(d), options);
  return layout;
}

}  // namespace atlas
