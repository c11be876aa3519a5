#include "atlas/types.hpp"

#include <algorithm>

#include "atlas/error.hpp"

namespace atlas {

SeriesKey SeriesKey::parse(const std::string& text) {
  const auto colon = text.find(':');
  if (colon == std::string::npos || colon == 0 || colon + 1 == text.size()) {
    throw Error(ErrorKind::SchemaViolation, "malformed series key '" + text + "'");
  }
  return SeriesKey{text.substr(0, colon), text.substr(colon + 1)};
}

std::size_t Series::present_count() const {
  return static_cast<std::size_t>(
      std::count_if(values.begin(), values.end(), [](const auto& v) { return v.has_value(); }));
}

}  // namespace atlas
