#pragma once

#include <ostream>

namespace atlas {

/// Entry point of the `atlas` tool. Returns the process exit status:
/// 0 success, 2 configuration error, 3 data error, 4 numeric failure.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace atlas
