#include "cosim/orchestration.hpp"

#include <algorithm>
#include <optional>
#include <set>
#include <sstream>
#include <thread>

#include "cosim/errors.hpp"
#include "cosim/log.hpp"

namespace cosim {

bool has_converged(const std::vector<std::pair<Vec, Vec>>& current_and_aux,
                   const ConvergenceSpec& spec, int call_index) {
    if (spec.mode == ConvergenceMode::SemiImplicit) return call_index >= spec.iterations;
    double worst = 0.0;
    for (const auto& [uc, aux] : current_and_aux) {
        const double rel = inf_norm(sub(uc, aux)) / (1.0 + inf_norm(aux));
        worst = std::max(worst, rel);
    }
    return worst < spec.epsilon;
}

namespace {

std::string loop_summary(const LoopReport& rep) {
    std::ostringstream os;
    os << rep.cycles.size() << " algebraic loop(s):";
    for (const auto& c : rep.cycles) {
        os << (c.kind == LoopKind::StateLoop ? " state loop {" : " output loop {");
        for (std::size_t i = 0; i < c.nodes.size(); ++i)
            os << (i ? ", " : "") << to_string(c.nodes[i]);
        os << "}";
    }
    return os.str();
}

struct Engine {
    Scenario s;
    RunOptions opts;
    std::vector<std::string> sigma;
    bool scalar_resolved = false;  // outputs need multi-pass settling

    // to_index-ordered assignments per consuming unit
    std::map<std::string, std::vector<Coupling>> wiring;
    std::map<std::string, Vec> y, uc, up;
    Trace trace;

    explicit Engine(Scenario&& scenario, const RunOptions& options)
        : s(std::move(scenario)), opts(options) {
        validate(s);
        for (const auto& c : s.couplings) wiring[c.to_unit].push_back(c);
        for (auto& [name, unit] : s.units) {
            y[name] = Vec(unit.output_dim(), 0.0);
            uc[name] = Vec(unit.input_dim(), 0.0);
            up[name] = Vec(unit.input_dim(), 0.0);
            unit.enable_internal_log(opts.record_internal);
        }
        resolve_order();
        trace.order = sigma;
    }

    SimulationUnit& unit(const std::string& name) { return s.units.at(name); }

    // Order on every coupling edge, reactive or not, when one exists.
    // It satisfies the reactive-source constraints by construction and
    // hands delayed units fresh sources already during initialization.
    std::optional<std::vector<std::string>> full_coupling_order() const {
        std::map<std::string, std::set<std::string>> succ;
        std::map<std::string, int> indegree;
        for (const auto& [name, u] : s.units) indegree[name] = 0;
        for (const auto& c : s.couplings) {
            if (c.from_unit == c.to_unit) return std::nullopt;
            if (succ[c.from_unit].insert(c.to_unit).second) indegree[c.to_unit] += 1;
        }
        std::set<std::string> ready;
        for (const auto& [name, d] : indegree)
            if (d == 0) ready.insert(name);
        std::vector<std::string> order;
        while (!ready.empty()) {
            const std::string u = *ready.begin();
            ready.erase(ready.begin());
            order.push_back(u);
            for (const auto& w : succ[u])
                if (--indegree[w] == 0) ready.insert(w);
        }
        if (order.size() != s.units.size()) return std::nullopt;
        return order;
    }

    void resolve_order() {
        const bool iterative = s.orchestrator.kind == OrchestratorKind::IterativeGaussSeidel ||
                               s.orchestrator.kind == OrchestratorKind::IterativeJacobi;
        const DependencyGraph g = build_dependency_graph(s, Granularity::Vector);
        auto sorted = topological_order(g);

        if (auto* order = std::get_if<std::vector<std::string>>(&sorted)) {
            if (s.sigma) {
                sigma = *s.sigma;
                // a user-specified order must still respect reactive sources
                if (!iterative) check_user_order(g);
            } else if (auto full = full_coupling_order()) {
                sigma = *full;
            } else {
                sigma = *order;
            }
            return;
        }

        // vector-level cycles
        if (!s.sigma)
            for (const auto& [name, u] : s.units) sigma.push_back(name);
        else
            sigma = *s.sigma;
        if (iterative) return;

        // virtual loops are still runnable by settling the outputs in
        // scalar dependency order; genuine loops need iteration
        const LoopReport rep = classify_loops(s);
        if (!rep.cycles.empty())
            throw ValidationError("scenario: " + loop_summary(rep) +
                                  "; use an iterative orchestrator");
        for (const auto& [name, u] : s.units)
            if (u.reactivity().input == InputContract::Reactive)
                throw ValidationError(
                    "scenario: virtual-loop resolution requires input-delayed units");
        scalar_resolved = true;
        log_debug("virtual algebraic loop resolved at scalar granularity");
    }

    void check_user_order(const DependencyGraph& g) {
        std::map<std::string, std::size_t> pos;
        for (std::size_t i = 0; i < sigma.size(); ++i) pos[sigma[i]] = i;
        std::vector<bool> input_used(g.nodes.size(), false);
        for (const auto& [a, b] : g.edges)
            if (g.nodes[a].kind == NodeKind::Input) input_used[a] = true;
        for (const auto& [a, b] : g.edges) {
            const Node& from = g.nodes[a];
            const Node& to = g.nodes[b];
            if (from.kind != NodeKind::Output || to.kind != NodeKind::Input) continue;
            if (!input_used[b] || from.unit == to.unit) continue;
            if (pos.at(from.unit) > pos.at(to.unit))
                throw ValidationError("scenario: \"sigma\" runs unit '" + to.unit +
                                      "' before its reactive source '" + from.unit + "'");
        }
    }

    Vec assemble_input(const std::string& name) {
        Vec u(unit(name).input_dim(), 0.0);
        auto it = wiring.find(name);
        if (it != wiring.end())
            for (const auto& c : it->second) u[c.to_index] = y.at(c.from_unit)[c.from_index];
        return u;
    }

    // one pass: uc_w := C_w(y); y_w := getOutput(w, uc_w)
    void output_sweep() {
        for (const auto& name : sigma) {
            uc[name] = assemble_input(name);
            y[name] = unit(name).get_output(uc[name]);
        }
    }

    // repeat sweeps until outputs are bit-stable; resolves feedthrough
    // chains whose scalar dependency graph is acyclic
    void settle_outputs() {
        for (std::size_t pass = 0; pass <= s.units.size(); ++pass) {
            bool changed = false;
            for (const auto& name : sigma) {
                uc[name] = assemble_input(name);
                Vec ny = unit(name).get_output(uc[name]);
                if (ny != y[name]) {
                    y[name] = std::move(ny);
                    changed = true;
                }
            }
            if (!changed) return;
        }
        throw SimulationError("output settling did not reach a fixed point");
    }

    void compute_outputs() {
        if (scalar_resolved) settle_outputs();
        else output_sweep();
    }

    // same evaluation, but without touching uc (the iterative Jacobi
    // convergence test compares the step inputs, which must survive the
    // end-of-step output computation)
    void compute_outputs_keep_uc() {
        for (std::size_t pass = 0; pass <= s.units.size(); ++pass) {
            bool changed = false;
            for (const auto& name : sigma) {
                Vec ui = assemble_input(name);
                Vec ny = unit(name).get_output(ui);
                if (ny != y[name]) {
                    y[name] = std::move(ny);
                    changed = true;
                }
            }
            if (!changed) return;
            if (!scalar_resolved) return;  // a single sweep is the contract here
        }
        throw SimulationError("output settling did not reach a fixed point");
    }

    void record(double t) {
        trace.times.push_back(t);
        for (const auto& [name, u] : s.units) {
            trace.series[name].outputs.push_back(y.at(name));
            trace.series[name].states.push_back(u.state());
        }
    }

    void finish() {
        if (opts.record_internal)
            for (const auto& [name, u] : s.units) trace.internal[name] = u.internal_log();
    }

    void step_all_jacobi(double H) {
        std::vector<SimulationUnit*> units;
        units.reserve(sigma.size());
        for (const auto& name : sigma) units.push_back(&unit(name));
        const unsigned threads = std::min<unsigned>(opts.jacobi_threads,
                                                    static_cast<unsigned>(units.size()));
        if (threads <= 1) {
            for (auto* u : units) u->do_step({H, uc.at(u->reference()), {}});
            return;
        }
        std::vector<std::thread> pool;
        std::vector<std::exception_ptr> errors(threads);
        for (unsigned w = 0; w < threads; ++w) {
            pool.emplace_back([&, w] {
                try {
                    for (std::size_t i = w; i < units.size(); i += threads)
                        units[i]->do_step({H, uc.at(units[i]->reference()), {}});
                } catch (...) {
                    errors[w] = std::current_exception();
                }
            });
        }
        for (auto& th : pool) th.join();
        for (auto& e : errors)
            if (e) std::rethrow_exception(e);
    }

    std::vector<std::pair<Vec, Vec>> convergence_pairs(
        const std::map<std::string, std::optional<Vec>>& aux) const {
        std::vector<std::pair<Vec, Vec>> pairs;
        pairs.reserve(uc.size());
        for (const auto& [name, cur] : uc) {
            const auto& a = aux.at(name);
            pairs.emplace_back(cur, a ? *a : Vec(cur.size(), 0.0));
        }
        return pairs;
    }
};

SimulationError step_failure(const std::exception& e, double t) {
    std::ostringstream os;
    os << "co-simulation step at t=" << t << " failed: " << e.what();
    return SimulationError(os.str());
}

} // namespace

Trace run_gauss_seidel(Scenario s, const RunOptions& options) {
    s.orchestrator.kind = OrchestratorKind::GaussSeidel;
    Engine e(std::move(s), options);
    const StepPlan plan = plan_steps(e.s.H, e.s.T);

    // initial outputs
    if (e.scalar_resolved) {
        e.settle_outputs();
        for (const auto& name : e.sigma) e.up[name] = e.uc[name];
    } else {
        for (const auto& name : e.sigma) {
            e.uc[name] = e.assemble_input(name);
            e.y[name] = e.unit(name).get_output(e.uc[name]);
            e.up[name] = e.uc[name];
        }
    }
    e.record(0.0);

    const unsigned long total = plan.full_steps + (plan.remainder > 0.0 ? 1 : 0);
    for (unsigned long i = 0; i < total; ++i) {
        const double t = plan.time_at(i, e.s.H);
        const double H = (i < plan.full_steps) ? e.s.H : plan.remainder;
        try {
            if (e.scalar_resolved) {
                for (const auto& name : e.sigma) {
                    e.uc[name] = e.assemble_input(name);
                    e.unit(name).do_step({H, e.uc[name], e.up[name]});
                }
                e.settle_outputs();
            } else {
                for (const auto& name : e.sigma) {
                    e.uc[name] = e.assemble_input(name);
                    e.unit(name).do_step({H, e.uc[name], e.up[name]});
                    e.y[name] = e.unit(name).get_output(e.uc[name]);
                }
            }
        } catch (const ValidationError& ex) {
            throw;
        } catch (const std::exception& ex) {
            throw step_failure(ex, t);
        }
        for (const auto& name : e.sigma) e.up[name] = e.uc[name];
        e.record(plan.time_at(i + 1, e.s.H));
        e.trace.iterations_per_step.push_back(1);
        log_debug("gauss-seidel: finished step to t=" + std::to_string(plan.time_at(i + 1, e.s.H)));
    }
    e.finish();
    return std::move(e.trace);
}

Trace run_jacobi(Scenario s, const RunOptions& options) {
    s.orchestrator.kind = OrchestratorKind::Jacobi;
    Engine e(std::move(s), options);
    const StepPlan plan = plan_steps(e.s.H, e.s.T);

    e.compute_outputs();
    e.record(0.0);

    const unsigned long total = plan.full_steps + (plan.remainder > 0.0 ? 1 : 0);
    for (unsigned long i = 0; i < total; ++i) {
        const double t = plan.time_at(i, e.s.H);
        const double H = (i < plan.full_steps) ? e.s.H : plan.remainder;
        try {
            // inputs at t_i from the settled outputs at t_i, then step all
            for (const auto& name : e.sigma) e.uc[name] = e.assemble_input(name);
            e.step_all_jacobi(H);
            e.compute_outputs();
        } catch (const ValidationError& ex) {
            throw;
        } catch (const std::exception& ex) {
            throw step_failure(ex, t);
        }
        e.record(plan.time_at(i + 1, e.s.H));
        e.trace.iterations_per_step.push_back(1);
    }
    e.finish();
    return std::move(e.trace);
}

Trace run_iterative_gauss_seidel(Scenario s, const RunOptions& options) {
    s.orchestrator.kind = OrchestratorKind::IterativeGaussSeidel;
    const ConvergenceSpec conv = s.orchestrator.convergence;
    Engine e(std::move(s), options);
    const StepPlan plan = plan_steps(e.s.H, e.s.T);

    std::map<std::string, std::optional<Vec>> aux;
    for (const auto& name : e.sigma) aux[name] = std::nullopt;
    auto reset_aux = [&] {
        for (auto& [name, a] : aux) a = std::nullopt;
    };
    auto converged_now = [&](int call_index) {
        // with no previous iterate there is nothing to compare against
        if (conv.mode == ConvergenceMode::Implicit &&
            std::any_of(aux.begin(), aux.end(), [](const auto& kv) { return !kv.second; }))
            return false;
        return has_converged(e.convergence_pairs(aux), conv, call_index);
    };

    // initial outputs may themselves close an algebraic loop
    int calls = 0;
    while (true) {
        for (const auto& name : e.sigma) {
            e.uc[name] = e.assemble_input(name);
            e.y[name] = e.unit(name).get_output(e.uc[name]);
            e.up[name] = e.uc[name];
        }
        ++calls;
        if (converged_now(calls)) break;
        if (calls >= conv.max_iterations)
            throw SimulationError("iterative gauss-seidel: initial outputs did not converge");
        for (const auto& name : e.sigma) aux[name] = e.uc[name];
    }
    e.record(0.0);

    const unsigned long total = plan.full_steps + (plan.remainder > 0.0 ? 1 : 0);
    for (unsigned long i = 0; i < total; ++i) {
        const double t = plan.time_at(i, e.s.H);
        const double H = (i < plan.full_steps) ? e.s.H : plan.remainder;
        reset_aux();
        calls = 0;
        while (true) {
            try {
                for (const auto& name : e.sigma) {
                    e.uc[name] = e.assemble_input(name);
                    e.unit(name).do_step({H, e.uc[name], e.up[name]});
                    e.y[name] = e.unit(name).get_output(e.uc[name]);
                }
            } catch (const ValidationError& ex) {
                throw;
            } catch (const std::exception& ex) {
                throw step_failure(ex, t);
            }
            ++calls;
            if (converged_now(calls)) {
                for (const auto& name : e.sigma) e.up[name] = e.uc[name];
                break;
            }
            if (calls >= conv.max_iterations) {
                std::ostringstream os;
                os << "iterative gauss-seidel: step at t=" << t << " did not converge within "
                   << conv.max_iterations << " iterations";
                throw SimulationError(os.str());
            }
            for (const auto& name : e.sigma) aux[name] = e.uc[name];
            for (const auto& name : e.sigma) e.unit(name).rollback();
        }
        e.record(plan.time_at(i + 1, e.s.H));
        e.trace.iterations_per_step.push_back(calls);
    }
    e.finish();
    return std::move(e.trace);
}

Trace run_iterative_jacobi(Scenario s, const RunOptions& options) {
    s.orchestrator.kind = OrchestratorKind::IterativeJacobi;
    const ConvergenceSpec conv = s.orchestrator.convergence;
    Engine e(std::move(s), options);
    const StepPlan plan = plan_steps(e.s.H, e.s.T);

    std::map<std::string, std::optional<Vec>> aux;
    for (const auto& name : e.sigma) aux[name] = std::nullopt;
    auto converged_now = [&](int call_index) {
        if (conv.mode == ConvergenceMode::Implicit &&
            std::any_of(aux.begin(), aux.end(), [](const auto& kv) { return !kv.second; }))
            return false;
        return has_converged(e.convergence_pairs(aux), conv, call_index);
    };

    // initial outputs, iterated like the main loop but without stepping
    int calls = 0;
    while (true) {
        e.compute_outputs();
        ++calls;
        if (converged_now(calls)) break;
        if (calls >= conv.max_iterations)
            throw SimulationError("iterative jacobi: initial outputs did not converge");
        for (const auto& name : e.sigma) aux[name] = e.uc[name];
    }
    e.record(0.0);

    const unsigned long total = plan.full_steps + (plan.remainder > 0.0 ? 1 : 0);
    for (unsigned long i = 0; i < total; ++i) {
        const double t = plan.time_at(i, e.s.H);
        const double H = (i < plan.full_steps) ? e.s.H : plan.remainder;
        for (auto& [name, a] : aux) a = std::nullopt;
        calls = 0;
        while (true) {
            try {
                // successive substitution: inputs from the freshest
                // outputs (at t_i on the first attempt, at t_{i+1} from
                // the rolled-back attempt afterwards)
                for (const auto& name : e.sigma) e.uc[name] = e.assemble_input(name);
                e.step_all_jacobi(H);
                e.compute_outputs_keep_uc();
            } catch (const ValidationError& ex) {
                throw;
            } catch (const std::exception& ex) {
                throw step_failure(ex, t);
            }
            ++calls;
            if (converged_now(calls)) break;
            if (calls >= conv.max_iterations) {
                std::ostringstream os;
                os << "iterative jacobi: step at t=" << t << " did not converge within "
                   << conv.max_iterations << " iterations";
                throw SimulationError(os.str());
            }
            for (const auto& name : e.sigma) aux[name] = e.uc[name];
            for (const auto& name : e.sigma) e.unit(name).rollback();
        }
        e.record(plan.time_at(i + 1, e.s.H));
        e.trace.iterations_per_step.push_back(calls);
    }
    e.finish();
    return std::move(e.trace);
}

Trace run(Scenario s, const RunOptions& options) {
    switch (s.orchestrator.kind) {
        case OrchestratorKind::GaussSeidel: return run_gauss_seidel(std::move(s), options);
        case OrchestratorKind::Jacobi: return run_jacobi(std::move(s), options);
        case OrchestratorKind::IterativeGaussSeidel:
            return run_iterative_gauss_seidel(std::move(s), options);
        case OrchestratorKind::IterativeJacobi: return run_iterative_jacobi(std::move(s), options);
    }
    throw ValidationError("run: unknown orchestrator kind");
}

} // namespace cosim
