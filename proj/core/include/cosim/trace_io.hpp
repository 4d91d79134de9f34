#pragma once

#include <filesystem>

#include "cosim/orchestration.hpp"

namespace cosim {

/// Write a trace as CSV: header "t" then "unit.y[i]" and "unit.x[j]"
/// columns grouped per unit in sigma order, one row per communication
/// point. Values carry 17 significant digits so re-parsing is bit-exact.
void write_trace_csv(const Trace& trace, const std::filesystem::path& path);

/// Write the recorded internal solver steps, one file per unit named
/// "<out>.<unit>.csv" next to the main trace.
void write_internal_traces(const Trace& trace, const std::filesystem::path& trace_path);

struct ParsedCsv {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;
};

ParsedCsv read_csv(const std::filesystem::path& path);

} // namespace cosim
