#pragma once

#include <map>
#include <string>
#include <vector>

#include "cosim/scenario.hpp"

namespace cosim {

struct UnitSeries {
    std::vector<Vec> outputs;
    std::vector<Vec> states;
};

/// Time-indexed record of every unit's outputs and states at the
/// communication points, plus per-step iteration counts.
struct Trace {
    std::vector<double> times;
    std::vector<std::string> order;  ///< sigma used by the run
    std::map<std::string, UnitSeries> series;
    std::vector<int> iterations_per_step;  ///< one entry per communication step
    std::map<std::string, std::vector<Sample>> internal;  ///< per-unit internal steps, if recorded
};

struct RunOptions {
    bool record_internal = false;
    /// Worker threads for the Jacobi do_step phase. Units share nothing,
    /// so the trace is bit-identical to the sequential run.
    unsigned jacobi_threads = 1;
};

/// Input-change convergence test of the iterative orchestrators.
/// Implicit mode: max_w ||uc_w - aux_w||_inf / (1 + ||aux_w||_inf) < eps.
/// SemiImplicit(m): true on the m-th call of the current step.
bool has_converged(const std::vector<std::pair<Vec, Vec>>& current_and_aux,
                   const ConvergenceSpec& spec, int call_index);

Trace run_gauss_seidel(Scenario s, const RunOptions& options = {});
Trace run_jacobi(Scenario s, const RunOptions& options = {});
Trace run_iterative_gauss_seidel(Scenario s, const RunOptions& options = {});
Trace run_iterative_jacobi(Scenario s, const RunOptions& options = {});

/// Dispatch on s.orchestrator.kind.
Trace run(Scenario s, const RunOptions& options = {});

} // namespace cosim
