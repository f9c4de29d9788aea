#pragma once

#include <iosfwd>

namespace spdc {

/// Entry point of the spdcsim tool. Returns the process exit status:
/// 0 success, 1 runtime or analysis failure, 2 configuration or usage error.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace spdc
