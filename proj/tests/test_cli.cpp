#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "cosim/builtin_scenarios.hpp"
#include "cosim/cli.hpp"
#include "cosim/errors.hpp"
#include "cosim/log.hpp"
#include "cosim/orchestration.hpp"
#include "cosim/scenario_io.hpp"
#include "cosim/trace_io.hpp"

using namespace cosim;

namespace {

namespace fs = std::filesystem;

fs::path temp_dir() {
    const fs::path dir = fs::temp_directory_path() / "cosim_cli_tests";
    fs::create_directories(dir);
    return dir;
}

fs::path write_file(const std::string& name, const std::string& content) {
    const fs::path p = temp_dir() / name;
    std::ofstream f(p);
    f << content;
    return p;
}

const char* kSplitMsdJson = R"({
  "units": {
    "pos": {
      "model": {"A": [[0.0]], "B": [[1.0]], "C": [[1.0]], "D": [[0.0]], "x0": [1.0]},
      "solver": "explicit_euler", "h": 0.1, "output_reactive": true
    },
    "vel": {
      "model": {"A": [[-0.0001]], "B": [[-1.0]], "C": [[1.0]], "D": [[0.0]], "x0": [0.0]},
      "solver": "explicit_euler", "h": 0.1, "output_reactive": true
    }
  },
  "connections": [
    {"from": "vel.y[0]", "to": "pos.u[0]"},
    {"from": "pos.y[0]", "to": "vel.u[0]"}
  ],
  "H": 0.1, "T": 1.0,
  "orchestrator": {"kind": "jacobi"}
})";

} // namespace

TEST_CASE("scenario json round-trips to a bit-identical trace") {
    const Scenario original = scenario_from_json(kSplitMsdJson);
    const std::string serialized = scenario_to_json(original);
    const Scenario reloaded = scenario_from_json(serialized);

    const Trace a = run(scenario_from_json(kSplitMsdJson));
    const Trace b = run(reloaded);
    REQUIRE(a.times == b.times);
    for (const auto& [name, series] : a.series) {
        CHECK(series.states == b.series.at(name).states);
        CHECK(series.outputs == b.series.at(name).outputs);
    }
}

TEST_CASE("a round-tripped scenario rebuilds the identical dependency graph") {
    const Scenario original = scenario_from_json(kSplitMsdJson);
    const Scenario reloaded = scenario_from_json(scenario_to_json(original));
    for (Granularity g : {Granularity::Vector, Granularity::Scalar}) {
        const DependencyGraph ga = build_dependency_graph(original, g);
        const DependencyGraph gb = build_dependency_graph(reloaded, g);
        CHECK(ga.nodes == gb.nodes);
        CHECK(ga.edges == gb.edges);
    }
}

TEST_CASE("builtin car scenario survives serialization") {
    Scenario s = scenarios::car();
    const Trace a = run(scenarios::car());
    const Scenario reloaded = scenario_from_json(scenario_to_json(s));
    const Trace b = run(reloaded);
    CHECK(a.times == b.times);
    CHECK(a.series.at("car").states == b.series.at("car").states);
}

TEST_CASE("trace csv re-parses bit-exactly") {
    const Trace t = run(scenario_from_json(kSplitMsdJson));
    const fs::path p = temp_dir() / "trace_roundtrip.csv";
    write_trace_csv(t, p);

    const ParsedCsv csv = read_csv(p);
    REQUIRE(csv.header.size() == 1 + 2 * 2);  // t + (y, x) per unit
    CHECK(csv.header[0] == "t");
    CHECK(csv.header[1] == "pos.y[0]");
    CHECK(csv.header[2] == "pos.x[0]");
    REQUIRE(csv.rows.size() == t.times.size());
    for (std::size_t i = 0; i < t.times.size(); ++i) {
        CHECK(csv.rows[i][0] == t.times[i]);
        CHECK(csv.rows[i][1] == t.series.at("pos").outputs[i][0]);
        CHECK(csv.rows[i][2] == t.series.at("pos").states[i][0]);
        CHECK(csv.rows[i][3] == t.series.at("vel").outputs[i][0]);
        CHECK(csv.rows[i][4] == t.series.at("vel").states[i][0]);
    }
    // strictly increasing first column
    for (std::size_t i = 1; i < csv.rows.size(); ++i)
        CHECK(csv.rows[i][0] > csv.rows[i - 1][0]);
}

TEST_CASE("malformed json exits 1 and writes nothing") {
    const fs::path bad = write_file("bad.json", "{ not json");
    const fs::path out = temp_dir() / "never.csv";
    fs::remove(out);
    const int rc = run_cli({"simulate", bad.string(), "--out", out.string()});
    CHECK(rc == 1);
    CHECK_FALSE(fs::exists(out));
}

TEST_CASE("unknown units in connections exit 1 and name the unit") {
    const std::string text = R"({
      "units": {"a": {"model": "msd", "solver": "explicit_euler", "h": 0.1}},
      "connections": [{"from": "ghost.y[0]", "to": "a.u[0]"}],
      "H": 0.1, "T": 1.0
    })";
    CHECK_THROWS_WITH_AS(scenario_from_json(text), doctest::Contains("ghost"), ValidationError);
    const fs::path p = write_file("ghost.json", text);
    CHECK(run_cli({"simulate", p.string()}) == 1);
}

TEST_CASE("parse errors name the offending key") {
    CHECK_THROWS_WITH_AS(
        scenario_from_json(R"({"units": {"a": {"model": "msd", "solver": "rk4", "h": 0.1}},
                               "H": 0.1, "T": 1})"),
        doctest::Contains("solver"), ValidationError);
    CHECK_THROWS_WITH_AS(
        scenario_from_json(R"({"units": {"a": {"model": "nope", "solver": "euler", "h": 0.1}},
                               "H": 0.1, "T": 1})"),
        doctest::Contains("nope"), ValidationError);
    CHECK_THROWS_WITH_AS(scenario_from_json(R"({"units": {}, "H": 0.1, "T": 1})"),
                         doctest::Contains("units"), ValidationError);
}

TEST_CASE("simulate writes the trace and the internal logs on request") {
    const fs::path scenario = write_file("split.json", kSplitMsdJson);
    const fs::path out = temp_dir() / "split_trace.csv";
    const int rc =
        run_cli({"simulate", scenario.string(), "--out", out.string(), "--trace-internal"});
    CHECK(rc == 0);
    CHECK(fs::exists(out));
    CHECK(fs::exists(out.string() + ".pos.csv"));
    CHECK(fs::exists(out.string() + ".vel.csv"));

    const ParsedCsv internal = read_csv(out.string() + ".pos.csv");
    CHECK(internal.header[0] == "t");
    CHECK(internal.rows.size() == 11);  // initial point + 10 internal steps
}

TEST_CASE("analyze-stability classifies the split pair and a stable unit") {
    const fs::path split = write_file("split2.json", kSplitMsdJson);
    CHECK(run_cli({"analyze-stability", split.string()}) == 0);

    const std::string implicit_msd = R"({
      "units": {"msd": {"model": "msd", "solver": "implicit_euler", "h": 0.1}},
      "H": 0.1, "T": 1.0
    })";
    const fs::path stable = write_file("implicit_msd.json", implicit_msd);
    CHECK(run_cli({"analyze-stability", stable.string()}) == 0);
}

TEST_CASE("analyze-stability exits 3 on unsupported topologies") {
    const std::string nonlinear = R"({
      "units": {"motor": {"model": "motor", "solver": "godunov", "h": 0.001}},
      "H": 0.01, "T": 0.1
    })";
    const fs::path p = write_file("nonlinear.json", nonlinear);
    CHECK(run_cli({"analyze-stability", p.string()}) == 3);
}

TEST_CASE("order command validates its inputs") {
    CHECK(run_cli({"order", "msd", "--points", "1"}) == 1);
    CHECK(run_cli({"order", "no-such-thing"}) == 1);
}

TEST_CASE("examples subcommand lists and rejects unknown names") {
    CHECK(run_cli({"examples", "list"}) == 0);
    CHECK(run_cli({"examples", "run", "does-not-exist"}) == 1);
}

TEST_CASE("the installed tool runs end to end") {
    const std::string tool = COSIM_TOOL_PATH;
    REQUIRE(fs::exists(tool));
    CHECK(std::system((tool + " examples run table2 > /dev/null 2>&1").c_str()) == 0);
    CHECK(std::system((tool + " examples list > /dev/null 2>&1").c_str()) == 0);

    const fs::path scenario = write_file("split3.json", kSplitMsdJson);
    const fs::path out = temp_dir() / "tool_trace.csv";
    const std::string cmd =
        tool + " simulate " + scenario.string() + " --out " + out.string() + " > /dev/null 2>&1";
    CHECK(std::system(cmd.c_str()) == 0);
    CHECK(fs::exists(out));
}

TEST_CASE("builtin car trace final speed matches the hand-rolled recursion") {
    Scenario s = scenarios::car();
    const Trace t = run(std::move(s));
    // v' = v (1 - h (k + cf)/m) + h k vd / m iterated over 50 steps
    double v = 0.0;
    const double h = 0.2, m = 1576.0, k = 1e3, cf = 0.5, vd = 40.0;
    for (int i = 0; i < 50; ++i) v = v * (1.0 - h * (k + cf) / m) + h * k * vd / m;
    CHECK(t.series.at("car").states.back()[0] == doctest::Approx(v).epsilon(1e-6 / v));
}

TEST_CASE("runtime failures exit 2 with the unit and step time in the message") {
    const std::string stiff = R"({
      "units": {"stiff": {"model": {"A": [[-400.0]], "x0": [1.0]},
                           "solver": "implicit_euler", "h": 0.1}},
      "H": 0.1, "T": 1.0
    })";
    const fs::path p = write_file("stiff.json", stiff);
    CHECK(run_cli({"simulate", p.string()}) == 2);
}

TEST_CASE("order accepts a closed single-unit scenario file") {
    const std::string decay = R"({
      "units": {"d": {"model": {"A": [[-1.0]], "x0": [1.0]},
                      "solver": "explicit_euler", "h": 0.1}},
      "H": 0.1, "T": 1.0
    })";
    const fs::path p = write_file("decay.json", decay);
    CHECK(run_cli({"order", p.string(), "--methods", "euler", "--points", "5"}) == 0);
}

TEST_CASE("every shipped scenario file loads, validates, and runs") {
    const fs::path dir = COSIM_SCENARIO_DIR;
    REQUIRE(fs::exists(dir));
    std::size_t count = 0;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (entry.path().extension() != ".json") continue;
        ++count;
        const Scenario s = load_scenario(entry.path());
        const Trace t = run(s);
        CHECK(t.times.size() >= 2);
    }
    CHECK(count >= 5);
}

TEST_CASE("COSIM_LOG selects the diagnostics level") {
    setenv("COSIM_LOG", "debug", 1);
    set_log_level_from_env();
    CHECK(log_level() == LogLevel::Debug);
    setenv("COSIM_LOG", "quiet", 1);
    set_log_level_from_env();
    CHECK(log_level() == LogLevel::Quiet);
    unsetenv("COSIM_LOG");
}

TEST_CASE("order reports a first-order slope for Euler on exponential decay") {
    const std::string decay = R"({
      "units": {"d": {"model": {"A": [[-1.0]], "x0": [1.0]},
                      "solver": "explicit_euler", "h": 0.1}},
      "H": 0.1, "T": 1.0
    })";
    const fs::path p = write_file("decay_slope.json", decay);
    const std::string cmd = std::string(COSIM_TOOL_PATH) + " order " + p.string() +
                            " --methods euler --points 6 2>/dev/null";
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    std::string out;
    char buf[256];
    while (fgets(buf, sizeof(buf), pipe)) out += buf;
    REQUIRE(pclose(pipe) == 0);

    const auto at = out.find("slope,explicit_euler,");
    REQUIRE(at != std::string::npos);
    const double slope = std::stod(out.substr(at + std::string("slope,explicit_euler,").size()));
    CHECK(slope > 0.9);
    CHECK(slope < 1.1);
}
