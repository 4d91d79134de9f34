#pragma once

#include <functional>
#include <utility>

#include "cosim/unit.hpp"

namespace cosim {

/// One communication or integration step as a linear map x(t+h) ~ M x(t).
struct StepMatrix {
    Matrix matrix;
};

/// Step map of a method applied to x' = A x:
/// explicit Euler I + hA, implicit Euler (I - hA)^{-1}.
StepMatrix standalone_step_matrix(StepperKind method, const Matrix& a, double h);

/// Largest step size keeping explicit Euler stable on the unit-mass
/// mass-spring-damper (|1+h lambda|^2 = 1 - c_f h + c^2 h^2 <= 1 gives
/// h_max = c_f / c^2 in the underdamped regime); overdamped parameters
/// fall back to a numeric sweep.
double explicit_euler_msd_hmax(double c, double c_f);

/// Per-communication-step map of one linear unit on the augmented state
/// [x; u_held]: Ahat = I + h [[A, B], [0, 0]] (or its implicit-Euler
/// counterpart) raised to H / h.
StepMatrix unit_step_matrix(const SimulationUnit& unit, double H);

/// One-communication-step Jacobi co-simulation map for the feedback pair
/// u1 = y2, u2 = y1 with D2 = 0, acting on the stacked states [x1; x2].
StepMatrix cosim_step_matrix_jacobi(const SimulationUnit& u1, const SimulationUnit& u2, double H);

/// Converged iterative-Jacobi map (I - Mbar_next)^{-1} Mbar_now on the
/// stacked vector [x1; u1; x2; u2] of the same feedback pair.
StepMatrix cosim_step_matrix_iterative_jacobi(const SimulationUnit& u1, const SimulationUnit& u2,
                                              double H);

/// max over grid points of ||series - oracle||_inf.
double max_error(const std::vector<double>& times, const std::vector<Vec>& values,
                 const std::function<Vec(double)>& oracle);

struct ErrorCurve {
    std::vector<std::pair<double, double>> points;  ///< (h, e_maxT)
    double T = 0.0;
};

/// Least-squares slope of log e over log h. Points with error below 1e-12
/// are dropped as round-off floor. Needs at least 4 points spanning two
/// decades of h.
double estimate_order(const ErrorCurve& curve);

} // namespace cosim
