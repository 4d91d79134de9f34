#pragma once

#include <string>
#include <vector>

namespace cosim {

/// Command-line driver behind the cosim tool. Exit codes: 0 success,
/// 1 parse or validation error, 2 runtime simulation failure,
/// 3 unsupported analysis topology.
int run_cli(const std::vector<std::string>& args);

int run_cli(int argc, const char* const* argv);

} // namespace cosim
