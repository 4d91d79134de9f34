#include "cosim/log.hpp"

#include <atomic>
#include <cstdlib>
#include <cstring>
#include <iostream>

namespace cosim {

namespace {
std::atomic<LogLevel> g_level{LogLevel::Quiet};
}

void set_log_level(LogLevel level) { g_level.store(level); }

LogLevel log_level() { return g_level.load(); }

void set_log_level_from_env() {
    const char* v = std::getenv("COSIM_LOG");
    if (!v) return;
    if (std::strcmp(v, "debug") == 0) set_log_level(LogLevel::Debug);
    else if (std::strcmp(v, "info") == 0) set_log_level(LogLevel::Info);
    else if (std::strcmp(v, "quiet") == 0) set_log_level(LogLevel::Quiet);
}

void log_info(const std::string& message) {
    if (g_level.load() >= LogLevel::Info) std::cerr << "[cosim] " << message << "\n";
}

void log_debug(const std::string& message) {
    if (g_level.load() >= LogLevel::Debug) std::cerr << "[cosim] " << message << "\n";
}

} // namespace cosim
