#include "cosim/trace_io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "cosim/errors.hpp"

namespace cosim {

namespace {

void append_double(std::string& out, double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
    out.append(buf, res.ptr);
}

} // namespace

void write_trace_csv(const Trace& trace, const std::filesystem::path& path) {
    std::string out;
    out += "t";
    for (const auto& name : trace.order) {
        const UnitSeries& series = trace.series.at(name);
        const std::size_t p = series.outputs.empty() ? 0 : series.outputs.front().size();
        const std::size_t n = series.states.empty() ? 0 : series.states.front().size();
        for (std::size_t i = 0; i < p; ++i) out += "," + name + ".y[" + std::to_string(i) + "]";
        for (std::size_t i = 0; i < n; ++i) out += "," + name + ".x[" + std::to_string(i) + "]";
    }
    out += "\n";

    for (std::size_t row = 0; row < trace.times.size(); ++row) {
        append_double(out, trace.times[row]);
        for (const auto& name : trace.order) {
            const UnitSeries& series = trace.series.at(name);
            for (double v : series.outputs[row]) {
                out += ",";
                append_double(out, v);
            }
            for (double v : series.states[row]) {
                out += ",";
                append_double(out, v);
            }
        }
        out += "\n";
    }

    std::ofstream f(path, std::ios::binary);
    if (!f) throw SimulationError("cannot write trace file '" + path.string() + "'");
    f << out;
}

void write_internal_traces(const Trace& trace, const std::filesystem::path& trace_path) {
    for (const auto& [name, samples] : trace.internal) {
        std::string out = "t";
        const std::size_t n = samples.empty() ? 0 : samples.front().value.size();
        for (std::size_t i = 0; i < n; ++i) out += "," + name + ".x[" + std::to_string(i) + "]";
        out += "\n";
        for (const auto& s : samples) {
            append_double(out, s.time);
            for (double v : s.value) {
                out += ",";
                append_double(out, v);
            }
            out += "\n";
        }
        std::filesystem::path p = trace_path;
        p += "." + name + ".csv";
        std::ofstream f(p, std::ios::binary);
        if (!f) throw SimulationError("cannot write trace file '" + p.string() + "'");
        f << out;
    }
}

ParsedCsv read_csv(const std::filesystem::path& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw ValidationError("cannot read csv file '" + path.string() + "'");
    ParsedCsv csv;
    std::string line;
    if (!std::getline(f, line)) return csv;
    {
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) csv.header.push_back(cell);
    }
    while (std::getline(f, line)) {
        if (line.empty()) continue;
        std::vector<double> row;
        std::size_t pos = 0;
        while (pos <= line.size()) {
            std::size_t next = line.find(',', pos);
            if (next == std::string::npos) next = line.size();
            double v = 0.0;
            auto res = std::from_chars(line.data() + pos, line.data() + next, v);
            if (res.ec != std::errc{})
                throw ValidationError("bad number in csv file '" + path.string() + "'");
            row.push_back(v);
            pos = next + 1;
            if (next == line.size()) break;
        }
        csv.rows.push_back(std::move(row));
    }
    return csv;
}

} // namespace cosim
