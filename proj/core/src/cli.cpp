#include "cosim/cli.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "cosim/analysis.hpp"
#include "cosim/builtin_models.hpp"
#include "cosim/builtin_scenarios.hpp"
#include "cosim/errors.hpp"
#include "cosim/log.hpp"
#include "cosim/orchestration.hpp"
#include "cosim/scenario_io.hpp"
#include "cosim/trace_io.hpp"

namespace cosim {

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitRuntime = 2;
constexpr int kExitUnsupported = 3;

int cmd_simulate(const std::string& scenario_path, const std::string& out_path,
                 bool trace_internal) {
    Scenario s;
    try {
        s = load_scenario(scenario_path);
    } catch (const ValidationError& e) {
        std::cerr << e.what() << "\n";
        return kExitValidation;
    }
    try {
        RunOptions opts;
        opts.record_internal = trace_internal;
        log_info("simulating " + scenario_path + " with " +
                 std::string(to_string(s.orchestrator.kind)));
        Trace trace = run(std::move(s), opts);
        write_trace_csv(trace, out_path);
        if (trace_internal) write_internal_traces(trace, out_path);
        std::cout << out_path << "\n";
        return kExitOk;
    } catch (const ValidationError& e) {
        std::cerr << e.what() << "\n";
        return kExitValidation;
    } catch (const std::exception& e) {
        std::cerr << e.what() << "\n";
        return kExitRuntime;
    }
}

// The step-map assembly covers closed linear scenarios (block diagonal)
// and the two-unit feedback pair of the Jacobi orchestrators.
int cmd_analyze_stability(const std::string& scenario_path) {
    Scenario s;
    try {
        s = load_scenario(scenario_path);
    } catch (const ValidationError& e) {
        std::cerr << e.what() << "\n";
        return kExitValidation;
    }

    try {
        for (const auto& [name, u] : s.units)
            if (!u.linear_model())
                throw UnsupportedTopology("unit '" + name +
                                          "' is not linear; stability assembly needs linear "
                                          "models");

        Matrix step;
        if (s.couplings.empty()) {
            // block diagonal of the per-unit state maps
            std::size_t dim = 0;
            for (const auto& [name, u] : s.units) dim += u.state_dim();
            step = Matrix(dim, dim);
            std::size_t at = 0;
            for (const auto& [name, u] : s.units) {
                if (u.input_dim() != 0)
                    throw UnsupportedTopology("unit '" + name +
                                              "' has undriven inputs; cannot assemble");
                const Matrix one =
                    standalone_step_matrix(u.stepper(), u.linear_model()->A, u.internal_step())
                        .matrix;
                const Matrix m = matrix_power(one, u.internal_steps_for(s.H));
                for (std::size_t i = 0; i < m.rows(); ++i)
                    for (std::size_t j = 0; j < m.cols(); ++j) step(at + i, at + j) = m(i, j);
                at += m.rows();
            }
        } else if (s.units.size() == 2) {
            auto it = s.units.begin();
            const SimulationUnit* a = &it->second;
            const SimulationUnit* b = &std::next(it)->second;

            auto full_swap = [&](const SimulationUnit& p, const SimulationUnit& q) {
                // every input of p driven index-wise by q and vice versa
                if (p.input_dim() != q.output_dim() || q.input_dim() != p.output_dim())
                    return false;
                std::vector<bool> got_p(p.input_dim(), false), got_q(q.input_dim(), false);
                for (const auto& c : s.couplings) {
                    if (c.to_unit == p.reference() && c.from_unit == q.reference() &&
                        c.from_index == c.to_index)
                        got_p[c.to_index] = true;
                    else if (c.to_unit == q.reference() && c.from_unit == p.reference() &&
                             c.from_index == c.to_index)
                        got_q[c.to_index] = true;
                    else
                        return false;
                }
                auto all = [](const std::vector<bool>& v) {
                    return std::all_of(v.begin(), v.end(), [](bool x) { return x; });
                };
                return all(got_p) && all(got_q);
            };
            if (!full_swap(*a, *b))
                throw UnsupportedTopology(
                    "two-unit assembly expects the full feedback coupling u1 = y2, u2 = y1");

            // pick roles so that D of the second unit is zero
            const SimulationUnit* u1 = a;
            const SimulationUnit* u2 = b;
            if (max_abs_entry(u2->linear_model()->D) != 0.0) std::swap(u1, u2);

            switch (s.orchestrator.kind) {
                case OrchestratorKind::Jacobi:
                    step = cosim_step_matrix_jacobi(*u1, *u2, s.H).matrix;
                    break;
                case OrchestratorKind::IterativeJacobi:
                    step = cosim_step_matrix_iterative_jacobi(*u1, *u2, s.H).matrix;
                    break;
                default:
                    throw UnsupportedTopology(
                        "stability assembly is derived for the jacobi orchestrators only");
            }
        } else {
            throw UnsupportedTopology(
                "stability assembly covers decoupled scenarios and two-unit feedback pairs");
        }

        const double rho = spectral_radius(step);
        const char* verdict =
            std::abs(rho - 1.0) < 1e-6 ? "MARGINAL" : (rho < 1.0 ? "STABLE" : "UNSTABLE");
        char buf[64];
        std::snprintf(buf, sizeof(buf), "%.6f", rho);
        std::cout << "step matrix dimension: " << step.rows() << "\n";
        std::cout << "spectral radius: " << buf << "\n";
        std::cout << "verdict: " << verdict << "\n";
        return kExitOk;
    } catch (const UnsupportedTopology& e) {
        std::cerr << e.what() << "\n";
        return kExitUnsupported;
    } catch (const std::exception& e) {
        std::cerr << e.what() << "\n";
        return kExitRuntime;
    }
}

struct OrderTarget {
    LinearSystemModel model;
    std::string name;
};

OrderTarget order_target(const std::string& target) {
    if (target == "msd") return {models::mass_spring_damper(), "msd"};
    if (target == "car") return {models::cruise_car(), "car"};
    if (std::filesystem::exists(target)) {
        Scenario s = load_scenario(target);
        if (s.units.size() != 1 || !s.couplings.empty())
            throw ValidationError(
                "order: the scenario must contain a single unit without couplings");
        const SimulationUnit& u = s.units.begin()->second;
        const LinearSystemModel* lin = u.linear_model();
        if (!lin || lin->input_dim() != 0)
            throw ValidationError("order: the analytical oracle needs a closed linear model");
        return {*lin, u.reference()};
    }
    throw ValidationError("order: '" + target + "' is neither a built-in model nor a file");
}

Vec run_monolithic_step(StepperKind method, const LinearSystemModel& m, const Vec& x, double t,
                        double h) {
    DerivFn f = [&m](const Vec& state, const Vec&) { return m.A * state; };
    InputFn u = [](double) { return Vec{}; };
    switch (method) {
        case StepperKind::ExplicitEuler: return explicit_euler_step(f, x, u, t, h);
        case StepperKind::Midpoint: return midpoint_step(f, x, u, t, h);
        case StepperKind::ImplicitEuler: {
            IterationConfig cfg;
            cfg.epsilon = 1e-13;
            cfg.max_iterations = 200;
            return implicit_euler_step(f, x, u, t, h, cfg);
        }
        default: throw ValidationError("order: unsupported method");
    }
}

int cmd_order(const std::string& target, const std::string& methods_arg, double h_min,
              double h_max, int points, double horizon) {
    try {
        if (points < 4) throw ValidationError("order: need at least 4 points for a slope");
        if (!(h_min > 0.0) || !(h_max > h_min))
            throw ValidationError("order: need 0 < h-min < h-max");

        OrderTarget tgt = order_target(target);

        std::vector<StepperKind> methods;
        {
            std::stringstream ss(methods_arg);
            std::string tok;
            while (std::getline(ss, tok, ',')) {
                if (tok == "euler" || tok == "explicit_euler")
                    methods.push_back(StepperKind::ExplicitEuler);
                else if (tok == "midpoint") methods.push_back(StepperKind::Midpoint);
                else if (tok == "implicit_euler") methods.push_back(StepperKind::ImplicitEuler);
                else throw ValidationError("order: unknown method '" + tok + "'");
            }
            if (methods.empty()) throw ValidationError("order: no methods given");
        }

        std::cout << "method,h,error\n";
        std::ostringstream slopes;
        for (StepperKind method : methods) {
            ErrorCurve curve;
            curve.T = horizon;
            for (int i = 0; i < points; ++i) {
                const double frac = points == 1 ? 0.0 : static_cast<double>(i) / (points - 1);
                const double h_raw = h_max * std::pow(h_min / h_max, frac);
                const auto steps = static_cast<std::size_t>(
                    std::max(1.0, std::round(horizon / h_raw)));
                const double h = horizon / static_cast<double>(steps);

                const std::vector<Vec> oracle =
                    analytical_grid(tgt.model, AffineDrive{}, h, steps);
                Vec x = tgt.model.x0;
                double err = 0.0;
                for (std::size_t k = 0; k < steps; ++k) {
                    x = run_monolithic_step(method, tgt.model, x,
                                            static_cast<double>(k) * h, h);
                    err = std::max(err, inf_norm(sub(x, oracle[k + 1])));
                }
                curve.points.emplace_back(h, err);
                char hb[64], eb[64];
                std::snprintf(hb, sizeof(hb), "%.12g", h);
                std::snprintf(eb, sizeof(eb), "%.12g", err);
                std::cout << to_string(method) << "," << hb << "," << eb << "\n";
            }
            const double slope = estimate_order(curve);
            char sb[64];
            std::snprintf(sb, sizeof(sb), "%.4f", slope);
            slopes << "slope," << to_string(method) << "," << sb << "\n";
        }
        std::cout << slopes.str();
        return kExitOk;
    } catch (const ValidationError& e) {
        std::cerr << e.what() << "\n";
        return kExitValidation;
    } catch (const std::exception& e) {
        std::cerr << e.what() << "\n";
        return kExitRuntime;
    }
}

// Reproduces the direct-iteration table of the cruise-control example:
// two implicit-Euler steps of h=0.2, five substitutions each, the first
// seeded with the rounded explicit-Euler guess 5, the second with the
// previous result.
int cmd_table2() {
    const double h = 0.2;
    const double vd = models::kCarTargetSpeed;
    auto f = [](double v, double target) {
        return (models::kCarGain * (target - v) - models::kCarFriction * v) / models::kCarMass;
    };

    const std::vector<std::vector<double>> expected = {
        {4.4413, 4.5122, 4.5032, 4.5044, 4.5042},
        {9.0085, 8.4366, 8.5092, 8.5000, 8.5012},
    };
    const char* row_label[2] = {"v(0.2)", "v(0.4)"};

    IterationConfig cfg;
    cfg.max_iterations = 5;
    cfg.check_convergence = false;

    bool ok = true;
    double v_prev = 0.0;     // v(0)
    double guess = 5.0;      // the rounded explicit-Euler predictor
    std::printf("%-8s %10s %10s %10s %10s %10s %10s\n", "step", "guess", "1", "2", "3", "4", "5");
    for (int row = 0; row < 2; ++row) {
        auto g = [&](const Vec& z) { return Vec{v_prev + h * f(z[0], vd)}; };
        DirectIterationResult res = direct_iteration(g, Vec{guess}, cfg);
        std::printf("%-8s %10.4f", row_label[row], res.iterates[0][0]);
        for (int i = 1; i <= 5; ++i) {
            const double v = res.iterates[i][0];
            std::printf(" %10.4f", v);
            if (std::abs(v - expected[row][i - 1]) > 1e-3) ok = false;
        }
        std::printf("\n");
        v_prev = res.value[0];
        guess = v_prev;
    }
    if (!ok) {
        std::cerr << "direct-iteration table does not match the reference values\n";
        return kExitRuntime;
    }
    return kExitOk;
}

int cmd_examples(const std::string& action, const std::string& name, std::string out_path) {
    if (action == "list") {
        std::cout << "car\nmsd\ncar-passenger\ntable2\n";
        return kExitOk;
    }
    if (name == "table2") return cmd_table2();

    Scenario s;
    if (name == "car") s = scenarios::car();
    else if (name == "msd") s = scenarios::msd();
    else if (name == "car-passenger") s = scenarios::car_passenger();
    else {
        std::cerr << "unknown example '" << name << "'\n";
        return kExitValidation;
    }
    if (out_path.empty()) out_path = name + "-trace.csv";
    try {
        Trace trace = run(std::move(s));
        write_trace_csv(trace, out_path);
        std::cout << out_path << "\n";
        return kExitOk;
    } catch (const std::exception& e) {
        std::cerr << e.what() << "\n";
        return kExitRuntime;
    }
}

} // namespace

int run_cli(const std::vector<std::string>& args) {
    set_log_level_from_env();

    CLI::App app{"co-simulation of coupled ODE units"};
    app.require_subcommand(1);

    std::string scenario_path, out_path = "trace.csv";
    bool trace_internal = false;
    auto* simulate = app.add_subcommand("simulate", "run a scenario file and write the trace");
    simulate->add_option("scenario", scenario_path, "scenario JSON file")->required();
    simulate->add_option("--out", out_path, "trace CSV path");
    simulate->add_flag("--trace-internal", trace_internal,
                       "also record the internal solver steps per unit");

    std::string stability_path;
    auto* stability =
        app.add_subcommand("analyze-stability", "assemble the step matrix and report rho");
    stability->add_option("scenario", stability_path, "scenario JSON file")->required();

    std::string order_target_arg, methods = "euler,midpoint";
    double h_min = 1e-4, h_max = 1e-1, horizon = 1.0;
    int points = 8;
    auto* order = app.add_subcommand("order", "experimental error-vs-step study with slopes");
    order->add_option("target", order_target_arg, "built-in model (msd, car) or scenario file")
        ->required();
    order->add_option("--methods", methods, "comma list: euler, midpoint, implicit_euler");
    order->add_option("--h-min", h_min, "smallest step size");
    order->add_option("--h-max", h_max, "largest step size");
    order->add_option("--points", points, "number of step sizes");
    order->add_option("--T", horizon, "error horizon");

    std::string ex_action, ex_name, ex_out;
    auto* examples = app.add_subcommand("examples", "built-in example runs");
    examples->add_option("action", ex_action, "list | run")->required();
    examples->add_option("name", ex_name, "example name for run");
    examples->add_option("--out", ex_out, "trace CSV path");

    std::vector<const char*> argv;
    argv.push_back("cosim");
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kExitOk : kExitValidation;
    }

    if (simulate->parsed()) return cmd_simulate(scenario_path, out_path, trace_internal);
    if (stability->parsed()) return cmd_analyze_stability(stability_path);
    if (order->parsed())
        return cmd_order(order_target_arg, methods, h_min, h_max, points, horizon);
    if (examples->parsed()) {
        if (ex_action == "list") return cmd_examples("list", "", "");
        if (ex_action == "run") {
            if (ex_name.empty()) {
                std::cerr << "examples run: missing example name\n";
                return kExitValidation;
            }
            return cmd_examples("run", ex_name, ex_out);
        }
        std::cerr << "examples: unknown action '" << ex_action << "'\n";
        return kExitValidation;
    }
    return kExitValidation;
}

int run_cli(int argc, const char* const* argv) {
    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
    return run_cli(args);
}

} // namespace cosim
