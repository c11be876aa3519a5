#pragma once

#include <nlohmann/json_fwd.hpp>

namespace atlas {
using Json = nlohmann::json;
}
