#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "atlas/types.hpp"

namespace atlas {

using Point2 = std::array<double, 2>;

/// Symmetric, non-negative, zero-diagonal n x n matrix over ordered keys.
class DistanceMatrix {
 public:
  DistanceMatrix() = default;

  /// Validates `row_major` (n*n entries) against the matrix invariants.
  static DistanceMatrix from_rows(std::vector<SeriesKey> keys, std::vector<double> row_major);

  std::size_t size() const noexcept { return keys_.size(); }
  const std::vector<SeriesKey>& keys() const noexcept { return keys_; }
  double operator()(std::size_t i, std::size_t j) const noexcept { return d_[i * keys_.size() + j]; }
  std::span<const double> row(std::size_t i) const { return {d_.data() + i * size(), size()}; }

 private:
  friend DistanceMatrix pairwise_distances(std::span<const DenseSeries>, unsigned);
  std::vector<SeriesKey> keys_;
  std::vector<double> d_;
};

struct Embedding {
  std::vector<SeriesKey> keys;
  std::vector<Point2> coords;
  double stress = 0.0;
  std::size_t iterations = 0;

  friend bool operator==(const Embedding&, const Embedding&) = default;
};

/// Euclidean distances between aligned dense series (already cube-rooted by
/// the caller). Rows are filled in parallel; each entry is summed in year
/// order so results do not depend on `threads`.
DistanceMatrix pairwise_distances(std::span<const DenseSeries> series, unsigned threads = 1);

/// Normalized stress-1: sqrt(sum (|xi - xj| - dij)^2 / sum dij^2) over i < j.
/// An all-zero D returns 0 for coincident points and 1 otherwise.
double stress(const DistanceMatrix& d, std::span<const Point2> coords);

/// Torgerson scaling: top two eigenpairs of -1/2 J D^2 J. Eigenvalues that are
/// negative or negligible against the largest give an all-zero coordinate.
Embedding classical_mds(const DistanceMatrix& d);

struct SmacofOptions {
  std::size_t max_iter = 500;
  /// Stop once (previous - current) < tol * previous.
  double tol = 1e-8;
  unsigned threads = 1;
};

/// Guttman-transform majorization with unit weights, starting from `init`.
/// If `trace` is given it receives the stress before the first step followed
/// by the stress after every step.
Embedding smacof_refine(const DistanceMatrix& d, const Embedding& init, const SmacofOptions& options = {},
                        std::vector<double>* trace = nullptr);

/// Centers the layout, rotates it onto its principal axes (largest first) and
/// flips each axis so the lowest-index point with a nonzero coordinate on it
/// is positive.
void canonicalize(std::vector<Point2>& coords);

/// A layout ready for export. Fewer than three series give an empty layout
/// with a reason instead of an error.
struct Layout {
  Embedding embedding;
  bool empty = false;
  std::string reason;

  friend bool operator==(const Layout&, const Layout&) = default;
};

/// Distances over `cube_rooted`, classical initialization, SMACOF refinement.
Layout compute_layout(std::span<const DenseSeries> cube_rooted, const SmacofOptions& options = {});

}  // namespace atlas
