#include "cosim/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "cosim/errors.hpp"

namespace cosim {

const char* to_string(OrchestratorKind k) {
    switch (k) {
        case OrchestratorKind::GaussSeidel: return "gauss_seidel";
        case OrchestratorKind::Jacobi: return "jacobi";
        case OrchestratorKind::IterativeGaussSeidel: return "iterative_gauss_seidel";
        case OrchestratorKind::IterativeJacobi: return "iterative_jacobi";
    }
    return "?";
}

double StepPlan::time_at(unsigned long i, double H) const {
    if (i <= full_steps) return static_cast<double>(i) * H;
    return static_cast<double>(full_steps) * H + remainder;
}

StepPlan plan_steps(double H, double T) {
    StepPlan p;
    const double ratio = T / H;
    const auto n = static_cast<long long>(std::llround(ratio));
    if (n >= 1 && std::abs(static_cast<double>(n) * H - T) <= 1e-9 * std::max(T, H)) {
        p.full_steps = static_cast<unsigned long>(n);
        p.remainder = 0.0;
        return p;
    }
    p.full_steps = static_cast<unsigned long>(std::floor(ratio));
    p.remainder = T - static_cast<double>(p.full_steps) * H;
    return p;
}

void validate(const Scenario& s) {
    if (s.units.empty()) throw ValidationError("scenario: \"units\" must not be empty");
    if (!(s.H > 0.0)) throw ValidationError("scenario: \"H\" must be positive");
    if (!(s.T >= s.H)) throw ValidationError("scenario: \"T\" must be at least H");

    const StepPlan plan = plan_steps(s.H, s.T);
    for (const auto& [name, unit] : s.units) {
        unit.internal_steps_for(s.H);
        if (plan.remainder > 0.0) unit.internal_steps_for(plan.remainder);
    }

    // every coupling endpoint must exist and every input index must be
    // driven exactly once
    std::map<std::string, std::vector<int>> drive_count;
    for (const auto& [name, unit] : s.units)
        drive_count[name] = std::vector<int>(unit.input_dim(), 0);

    for (const auto& c : s.couplings) {
        auto from = s.units.find(c.from_unit);
        if (from == s.units.end())
            throw ValidationError("scenario: connection references unknown unit '" + c.from_unit +
                                  "'");
        auto to = s.units.find(c.to_unit);
        if (to == s.units.end())
            throw ValidationError("scenario: connection references unknown unit '" + c.to_unit +
                                  "'");
        if (c.from_index >= from->second.output_dim())
            throw ValidationError("scenario: connection output index out of range for unit '" +
                                  c.from_unit + "'");
        if (c.to_index >= to->second.input_dim())
            throw ValidationError("scenario: connection input index out of range for unit '" +
                                  c.to_unit + "'");
        drive_count[c.to_unit][c.to_index] += 1;
    }
    for (const auto& [name, counts] : drive_count) {
        for (std::size_t i = 0; i < counts.size(); ++i) {
            if (counts[i] == 0) {
                std::ostringstream os;
                os << "scenario: input " << name << ".u[" << i << "] is not driven";
                throw ValidationError(os.str());
            }
            if (counts[i] > 1) {
                std::ostringstream os;
                os << "scenario: input " << name << ".u[" << i << "] is driven more than once";
                throw ValidationError(os.str());
            }
        }
    }

    if (s.sigma) {
        if (s.sigma->size() != s.units.size())
            throw ValidationError("scenario: \"sigma\" must list every unit exactly once");
        std::set<std::string> seen;
        for (const auto& name : *s.sigma) {
            if (!s.units.count(name))
                throw ValidationError("scenario: \"sigma\" references unknown unit '" + name +
                                      "'");
            if (!seen.insert(name).second)
                throw ValidationError("scenario: \"sigma\" repeats unit '" + name + "'");
        }
    }

    const auto kind = s.orchestrator.kind;
    const bool jacobi_family =
        kind == OrchestratorKind::Jacobi || kind == OrchestratorKind::IterativeJacobi;
    const bool iterative = kind == OrchestratorKind::IterativeGaussSeidel ||
                           kind == OrchestratorKind::IterativeJacobi;
    for (const auto& [name, unit] : s.units) {
        if (jacobi_family && unit.reactivity().input == InputContract::Reactive)
            throw ValidationError("scenario: input-reactive unit '" + name +
                                  "' cannot run under a jacobi orchestrator");
        if (iterative && !unit.options().rollbackable)
            throw ValidationError("scenario: unit '" + name +
                                  "' is not rollbackable; iterative orchestration needs rollback");
    }

    const auto& conv = s.orchestrator.convergence;
    if (conv.max_iterations < 1)
        throw ValidationError("scenario: orchestrator \"max_iterations\" must be >= 1");
    if (iterative && conv.mode == ConvergenceMode::Implicit && !(conv.epsilon > 0.0))
        throw ValidationError("scenario: orchestrator \"epsilon\" must be positive");
    if (iterative && conv.mode == ConvergenceMode::SemiImplicit &&
        (conv.iterations < 1 || conv.iterations > conv.max_iterations))
        throw ValidationError("scenario: orchestrator \"iterations\" must be in [1, max_iterations]");
}

std::string to_string(const Node& n) {
    const char* k = n.kind == NodeKind::Input ? "u" : (n.kind == NodeKind::State ? "x" : "y");
    std::ostringstream os;
    os << n.unit << "." << k;
    if (n.index >= 0) os << "[" << n.index << "]";
    return os.str();
}

namespace {

// boolean dependency masks of one unit
struct Masks {
    std::size_t n = 0, m = 0, p = 0;     // state, input, output dims
    std::vector<std::vector<bool>> c;    // p x n: output <- state
    std::vector<std::vector<bool>> d;    // p x m: output <- input (feedthrough)
    std::vector<std::vector<bool>> r;    // n x m: state <- input over one interval
};

std::vector<std::vector<bool>> pattern(const Matrix& a) {
    std::vector<std::vector<bool>> m(a.rows(), std::vector<bool>(a.cols(), false));
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) m[i][j] = a(i, j) != 0.0;
    return m;
}

std::vector<std::vector<bool>> dense(std::size_t rows, std::size_t cols) {
    return std::vector<std::vector<bool>>(rows, std::vector<bool>(cols, true));
}

// structural reachability input -> state: pattern of B, closed under A
std::vector<std::vector<bool>> input_reach(const Matrix& a, const Matrix& b) {
    auto reach = pattern(b);
    auto ap = pattern(a);
    const std::size_t n = a.rows(), m = b.cols();
    for (std::size_t pass = 0; pass < n; ++pass) {
        bool changed = false;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t k = 0; k < n; ++k) {
                if (!ap[i][k]) continue;
                for (std::size_t j = 0; j < m; ++j)
                    if (reach[k][j] && !reach[i][j]) {
                        reach[i][j] = true;
                        changed = true;
                    }
            }
        if (!changed) break;
    }
    return reach;
}

Masks unit_masks(const SimulationUnit& u) {
    Masks mk;
    mk.n = u.state_dim();
    mk.m = u.input_dim();
    mk.p = u.output_dim();
    if (const auto* lin = u.linear_model()) {
        mk.c = pattern(lin->C);
        mk.d = pattern(lin->D);
        mk.r = input_reach(lin->A, lin->B);
    } else if (std::holds_alternative<SecondOrderModel>(u.model())) {
        // outputs are [position; velocity] = the state, no feedthrough
        mk.c.assign(mk.p, std::vector<bool>(mk.n, false));
        for (std::size_t i = 0; i < mk.p && i < mk.n; ++i) mk.c[i][i] = true;
        mk.d.assign(mk.p, std::vector<bool>(mk.m, false));
        mk.r = dense(mk.n, mk.m);
    } else {
        // opaque evaluation rules: fully dense by default
        mk.c = dense(mk.p, mk.n);
        mk.d = dense(mk.p, mk.m);
        mk.r = dense(mk.n, mk.m);
    }
    return mk;
}

bool any(const std::vector<std::vector<bool>>& m) {
    for (const auto& row : m)
        for (bool b : row)
            if (b) return true;
    return false;
}

} // namespace

DependencyGraph build_dependency_graph(const Scenario& s, Granularity granularity) {
    DependencyGraph g;
    g.granularity = granularity;

    std::map<Node, std::size_t> index;
    auto node_id = [&](const Node& n) {
        auto it = index.find(n);
        if (it != index.end()) return it->second;
        const std::size_t id = g.nodes.size();
        g.nodes.push_back(n);
        index.emplace(n, id);
        return id;
    };
    std::set<std::pair<std::size_t, std::size_t>> edges;
    auto add_edge = [&](const Node& from, const Node& to) {
        edges.emplace(node_id(from), node_id(to));
    };

    for (const auto& [name, unit] : s.units) {
        const Masks mk = unit_masks(unit);
        const bool out_reactive = unit.reactivity().output == OutputContract::Reactive;
        const bool in_reactive = unit.reactivity().input == InputContract::Reactive;

        if (granularity == Granularity::Vector) {
            Node u{name, NodeKind::Input, -1};
            Node x{name, NodeKind::State, -1};
            Node y{name, NodeKind::Output, -1};
            if (mk.m > 0) node_id(u);
            if (mk.n > 0) node_id(x);
            if (mk.p > 0) node_id(y);
            if (mk.p > 0 && mk.n > 0 && any(mk.c)) add_edge(x, y);
            if (mk.p > 0 && mk.m > 0 && out_reactive && any(mk.d)) add_edge(u, y);
            if (mk.n > 0 && mk.m > 0 && in_reactive && any(mk.r)) add_edge(u, x);
        } else {
            for (std::size_t j = 0; j < mk.m; ++j) node_id({name, NodeKind::Input, (int)j});
            for (std::size_t j = 0; j < mk.n; ++j) node_id({name, NodeKind::State, (int)j});
            for (std::size_t j = 0; j < mk.p; ++j) node_id({name, NodeKind::Output, (int)j});
            for (std::size_t i = 0; i < mk.p; ++i) {
                for (std::size_t j = 0; j < mk.n; ++j)
                    if (mk.c[i][j])
                        add_edge({name, NodeKind::State, (int)j}, {name, NodeKind::Output, (int)i});
                if (out_reactive)
                    for (std::size_t j = 0; j < mk.m; ++j)
                        if (mk.d[i][j])
                            add_edge({name, NodeKind::Input, (int)j},
                                     {name, NodeKind::Output, (int)i});
            }
            if (in_reactive)
                for (std::size_t i = 0; i < mk.n; ++i)
                    for (std::size_t j = 0; j < mk.m; ++j)
                        if (mk.r[i][j])
                            add_edge({name, NodeKind::Input, (int)j},
                                     {name, NodeKind::State, (int)i});
        }
    }

    for (const auto& c : s.couplings) {
        if (granularity == Granularity::Vector) {
            add_edge({c.from_unit, NodeKind::Output, -1}, {c.to_unit, NodeKind::Input, -1});
        } else {
            add_edge({c.from_unit, NodeKind::Output, (int)c.from_index},
                     {c.to_unit, NodeKind::Input, (int)c.to_index});
        }
    }

    g.edges.assign(edges.begin(), edges.end());
    return g;
}

namespace {

// Tarjan strongly connected components, deterministic over node order.
std::vector<std::vector<std::size_t>> strongly_connected(const DependencyGraph& g) {
    const std::size_t n = g.nodes.size();
    std::vector<std::vector<std::size_t>> adj(n);
    for (const auto& [a, b] : g.edges) adj[a].push_back(b);

    std::vector<int> idx(n, -1), low(n, 0);
    std::vector<bool> on_stack(n, false);
    std::vector<std::size_t> stack;
    std::vector<std::vector<std::size_t>> comps;
    int counter = 0;

    struct Frame {
        std::size_t v;
        std::size_t next_child = 0;
    };

    for (std::size_t root = 0; root < n; ++root) {
        if (idx[root] != -1) continue;
        std::vector<Frame> call;
        call.push_back({root});
        idx[root] = low[root] = counter++;
        stack.push_back(root);
        on_stack[root] = true;

        while (!call.empty()) {
            Frame& f = call.back();
            if (f.next_child < adj[f.v].size()) {
                const std::size_t w = adj[f.v][f.next_child++];
                if (idx[w] == -1) {
                    idx[w] = low[w] = counter++;
                    stack.push_back(w);
                    on_stack[w] = true;
                    call.push_back({w});
                } else if (on_stack[w]) {
                    low[f.v] = std::min(low[f.v], idx[w]);
                }
            } else {
                if (low[f.v] == idx[f.v]) {
                    std::vector<std::size_t> comp;
                    while (true) {
                        const std::size_t w = stack.back();
                        stack.pop_back();
                        on_stack[w] = false;
                        comp.push_back(w);
                        if (w == f.v) break;
                    }
                    comps.push_back(std::move(comp));
                }
                const std::size_t v = f.v;
                call.pop_back();
                if (!call.empty()) low[call.back().v] = std::min(low[call.back().v], low[v]);
            }
        }
    }
    return comps;
}

bool has_self_edge(const DependencyGraph& g, std::size_t v) {
    return std::any_of(g.edges.begin(), g.edges.end(),
                       [v](const auto& e) { return e.first == v && e.second == v; });
}

// nontrivial SCCs (a cycle exists inside) as sorted node lists
std::vector<std::vector<Node>> cycle_components(const DependencyGraph& g) {
    std::vector<std::vector<Node>> out;
    for (const auto& comp : strongly_connected(g)) {
        if (comp.size() < 2 && !(comp.size() == 1 && has_self_edge(g, comp[0]))) continue;
        std::vector<Node> nodes;
        nodes.reserve(comp.size());
        for (std::size_t id : comp) nodes.push_back(g.nodes[id]);
        std::sort(nodes.begin(), nodes.end());
        out.push_back(std::move(nodes));
    }
    std::sort(out.begin(), out.end());
    return out;
}

} // namespace

std::variant<std::vector<std::string>, LoopReport> topological_order(const DependencyGraph& g) {
    // Unit-level precedence: v before w whenever an output of v feeds an
    // input of w that the graph shows is needed at the same communication
    // time (the input node has an outgoing edge).
    std::set<std::string> units;
    for (const auto& n : g.nodes) units.insert(n.unit);

    std::vector<bool> input_used(g.nodes.size(), false);
    for (const auto& [a, b] : g.edges)
        if (g.nodes[a].kind == NodeKind::Input) input_used[a] = true;

    std::map<std::string, std::set<std::string>> succ;
    std::map<std::string, int> indegree;
    for (const auto& u : units) indegree[u] = 0;
    for (const auto& [a, b] : g.edges) {
        const Node& from = g.nodes[a];
        const Node& to = g.nodes[b];
        if (from.kind != NodeKind::Output || to.kind != NodeKind::Input) continue;
        if (!input_used[b]) continue;
        if (from.unit == to.unit) {
            // a same-time self dependency can never be ordered away
            return find_loops(g);
        }
        if (succ[from.unit].insert(to.unit).second) indegree[to.unit] += 1;
    }

    std::set<std::string> ready;
    for (const auto& [u, d] : indegree)
        if (d == 0) ready.insert(u);

    std::vector<std::string> order;
    while (!ready.empty()) {
        const std::string u = *ready.begin();
        ready.erase(ready.begin());
        order.push_back(u);
        for (const auto& w : succ[u])
            if (--indegree[w] == 0) ready.insert(w);
    }
    if (order.size() != units.size()) return find_loops(g);
    return order;
}

LoopReport find_loops(const DependencyGraph& g) {
    LoopReport rep;
    for (auto& nodes : cycle_components(g)) {
        LoopInfo info;
        info.kind = std::any_of(nodes.begin(), nodes.end(),
                                [](const Node& n) { return n.kind == NodeKind::State; })
                        ? LoopKind::StateLoop
                        : LoopKind::OutputLoop;
        info.nodes = std::move(nodes);
        rep.cycles.push_back(std::move(info));
    }
    return rep;
}

LoopReport classify_loops(const Scenario& s) {
    const DependencyGraph gv = build_dependency_graph(s, Granularity::Vector);
    const DependencyGraph gs = build_dependency_graph(s, Granularity::Scalar);

    const auto vector_cycles = cycle_components(gv);
    const auto scalar_cycles = cycle_components(gs);

    // a vector cycle is real when some scalar cycle projects into it
    auto member = [](const std::vector<Node>& comp, const std::string& unit, NodeKind kind) {
        return std::any_of(comp.begin(), comp.end(), [&](const Node& n) {
            return n.unit == unit && n.kind == kind;
        });
    };

    LoopReport rep;
    for (const auto& vcomp : vector_cycles) {
        const bool real = std::any_of(
            scalar_cycles.begin(), scalar_cycles.end(), [&](const std::vector<Node>& scomp) {
                return std::all_of(scomp.begin(), scomp.end(), [&](const Node& n) {
                    return member(vcomp, n.unit, n.kind);
                });
            });
        if (real) {
            LoopInfo info;
            info.nodes = vcomp;
            info.kind = std::any_of(vcomp.begin(), vcomp.end(),
                                    [](const Node& n) { return n.kind == NodeKind::State; })
                            ? LoopKind::StateLoop
                            : LoopKind::OutputLoop;
            rep.cycles.push_back(std::move(info));
        } else {
            rep.virtual_loops.push_back(vcomp);
        }
    }
    return rep;
}

} // namespace cosim
