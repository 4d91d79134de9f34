#pragma once

#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "cosim/unit.hpp"

namespace cosim {

/// Index-wise assignment coupling: from_unit.y[from_index] drives
/// to_unit.u[to_index].
struct Coupling {
    std::string from_unit;
    std::size_t from_index = 0;
    std::string to_unit;
    std::size_t to_index = 0;

    bool operator==(const Coupling&) const = default;
};

enum class OrchestratorKind { GaussSeidel, Jacobi, IterativeGaussSeidel, IterativeJacobi };
enum class ConvergenceMode { Implicit, SemiImplicit };

const char* to_string(OrchestratorKind k);

struct ConvergenceSpec {
    ConvergenceMode mode = ConvergenceMode::Implicit;
    double epsilon = 1e-6;  ///< Implicit: relative input-change tolerance
    int iterations = 1;     ///< SemiImplicit: fixed sweep count per step
    int max_iterations = 100;
};

struct OrchestratorSpec {
    OrchestratorKind kind = OrchestratorKind::GaussSeidel;
    ConvergenceSpec convergence{};
};

struct Scenario {
    std::map<std::string, SimulationUnit> units;
    std::vector<Coupling> couplings;
    double H = 0.0;
    double T = 0.0;
    OrchestratorSpec orchestrator{};
    std::optional<std::vector<std::string>> sigma;
};

/// Number of full H steps plus an optional truncated final step landing
/// exactly on T.
struct StepPlan {
    unsigned long full_steps = 0;
    double remainder = 0.0;  ///< 0 when T is a multiple of H
    double time_at(unsigned long i, double H) const;
};

StepPlan plan_steps(double H, double T);

/// Check the scenario invariants; throws ValidationError naming the
/// offending unit or key.
void validate(const Scenario& s);

enum class Granularity { Vector, Scalar };
enum class NodeKind { Input, State, Output };

/// A dependency-graph node: a whole vector (index -1) or one component.
struct Node {
    std::string unit;
    NodeKind kind = NodeKind::Input;
    int index = -1;

    auto operator<=>(const Node&) const = default;
};

std::string to_string(const Node& n);

struct DependencyGraph {
    Granularity granularity = Granularity::Vector;
    std::vector<Node> nodes;
    /// (from, to) index pairs into nodes: data flows from -> to.
    std::vector<std::pair<std::size_t, std::size_t>> edges;
};

/// Same-communication-time dependencies:
///   output <- state where the output map uses the state,
///   output <- input where an output-reactive unit has feedthrough,
///   input <- output along couplings,
///   state <- input for input-reactive units (interpolation endpoint).
/// Scalar granularity applies per-component sparsity masks.
DependencyGraph build_dependency_graph(const Scenario& s, Granularity granularity);

enum class LoopKind { OutputLoop, StateLoop };

struct LoopInfo {
    std::vector<Node> nodes;  ///< the strongly connected node set, sorted
    LoopKind kind = LoopKind::OutputLoop;
};

struct LoopReport {
    std::vector<LoopInfo> cycles;
    /// Vector-level cycles with no underlying scalar-level cycle.
    std::vector<std::vector<Node>> virtual_loops;
};

/// Unit execution order, or the loop report when the units cannot be
/// sorted. Ties break on the unit reference, ascending.
std::variant<std::vector<std::string>, LoopReport> topological_order(const DependencyGraph& g);

/// Cycles of a single graph (no cross-granularity comparison).
LoopReport find_loops(const DependencyGraph& g);

/// Find vector-level cycles, re-test them at scalar granularity, report
/// the survivors classified as output or state loops and the vanished
/// ones as virtual.
LoopReport classify_loops(const Scenario& s);

} // namespace cosim
