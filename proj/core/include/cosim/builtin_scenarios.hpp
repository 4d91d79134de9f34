#pragma once

#include "cosim/scenario.hpp"

namespace cosim::scenarios {

/// Cruise-controlled car alone: explicit Euler, h = H = 0.2, T = 10.
Scenario car(StepperKind solver = StepperKind::ExplicitEuler);

/// Mass-spring-damper alone (m = c = 1, c_f = 1e-4): h = H = 0.1, T = 10.
Scenario msd(StepperKind solver = StepperKind::ExplicitEuler, double h = 0.1, double H = 0.1,
             double T = 10.0);

/// Motor -> car -> passenger chain under Gauss-Seidel: H = 0.01, T = 1,
/// Godunov motor at h = 1e-3, explicit-Euler car at h = 0.01 and
/// passenger at h = 1e-4 (one step vs a hundred per communication step).
Scenario car_passenger();

/// Undamped-ish mass-spring-damper split into an integrator pair
/// (x' = u from the velocity unit, v' = -x - c_f v from the position),
/// coupled in feedback, ZOH, co-located steps h = H. Jacobi by default.
Scenario split_msd(double c_f, double H, StepperKind solver = StepperKind::ExplicitEuler,
                   OrchestratorKind kind = OrchestratorKind::Jacobi, double T = 1.0);

} // namespace cosim::scenarios
