#pragma once

#include <optional>

#include "atlas/types.hpp"

namespace atlas {

/// Per-series summaries used to order the dot-plot view. "Measured" means
/// present; reported zeros count. Pair-based fields use adjacent calendar
/// years only and are absent when no such pair exists.
struct CognosticVector {
  SeriesKey key;
  double net_change = 0.0;
  std::optional<double> max_annual_increase;
  /// Minimum consecutive difference; negative when some year decreased.
  std::optional<double> max_annual_decrease;
  double mean_level = 0.0;
  double latest_value = 0.0;

  friend bool operator==(const CognosticVector&, const CognosticVector&) = default;
};

/// Last measured value minus first measured value.
double net_change(const Series& s);
std::optional<double> max_annual_increase(const Series& s);
std::optional<double> max_annual_decrease(const Series& s);

CognosticVector compute_cognostics(const Series& s);

}  // namespace atlas
