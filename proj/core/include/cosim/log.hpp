#pragma once

#include <string>

namespace cosim {

enum class LogLevel { Quiet = 0, Info = 1, Debug = 2 };

void set_log_level(LogLevel level);
LogLevel log_level();

/// Read COSIM_LOG (quiet | info | debug) and apply it; unknown or unset
/// values leave the level at quiet.
void set_log_level_from_env();

/// Diagnostics go to standard error; results never do.
void log_info(const std::string& message);
void log_debug(const std::string& message);

} // namespace cosim
