#include "atlas/cognostics.hpp"

#include <algorithm>

#include "atlas/error.hpp"

namespace atlas {
namespace {

std::size_t first_present(const Series& s) {
  for (std::size_t i = 0; i < s.values.size(); ++i) {
    if (s.values[i]) return i;
  }
  throw Error(ErrorKind::EmptySeries, s.key.str());
}

std::size_t last_present(const Series& s) {
  for (std::size_t i = s.values.size(); i-- > 0;) {
    if (s.values[i]) return i;
  }
  throw Error(ErrorKind::EmptySeries, s.key.str());
}

template <class Pick>
std::optional<double> extreme_step(const Series& s, Pick pick) {
  std::optional<double> best;
  for (std::size_t i = 0; i + 1 < s.values.size(); ++i) {
    const auto& a = s.values[i];
    const auto& b = s.values[i + 1];
    if (!a || !b) continue;
    const double diff = *b - *a;
    best = best ? pick(*best, diff) : diff;
  }
  return best;
}

}  // namespace

double net_change(const Series& s) {
  return *s.values[last_present(s)] - *s.values[first_present(s)];
}

std::optional<double> max_annual_increase(const Series& s) {
  return extreme_step(s, [](double a, double b) { return std::max(a, b); });
}

std::optional<double> max_annual_decrease(const Series& s) {
  return extreme_step(s, [](double a, double b) { return std::min(a, b); });
}

CognosticVector compute_cognostics(const Series& s) {
  CognosticVector c;
  c.key = s.key;
  c.net_change = net_change(s);
  c.max_annual_increase = max_annual_increase(s);
  c.max_annual_decrease = max_annual_decrease(s);
  double sum = 0.0;
  std::size_t count = 0;
  for (const auto& v : s.values) {
    if (!v) continue;
    sum += *v;
    ++count;
  }
  c.mean_level = sum / static_cast<double>(count);
  c.latest_value = *s.values[last_present(s)];
  return c;
}

}  // namespace atlas
