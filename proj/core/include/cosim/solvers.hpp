#pragma once

#include <functional>

#include "cosim/ode.hpp"
#include "cosim/numerics.hpp"

namespace cosim {

enum class StepperKind { ExplicitEuler, ImplicitEuler, Midpoint, Godunov };

const char* to_string(StepperKind k);

/// Stop tolerance of the direct (fixed-point) iteration. Disabling the
/// convergence check runs exactly max_iterations substitutions, which is
/// how fixed-iteration-count experiments are reproduced.
struct IterationConfig {
    double epsilon = 1e-6;
    int max_iterations = 100;
    bool check_convergence = true;
};

using InputFn = std::function<Vec(double t)>;
using DerivFn = std::function<Vec(const Vec& state, const Vec& input)>;

/// x(t+h) ~ x(t) + F(x(t), u(t)) h
Vec explicit_euler_step(const DerivFn& f, const Vec& x, const InputFn& u, double t, double h);

/// x(t+h) ~ x(t) + F(x(t) + F(x(t), u(t)) 0.5 h, u(t + 0.5 h)) h
Vec midpoint_step(const DerivFn& f, const Vec& x, const InputFn& u, double t, double h);

struct DirectIterationResult {
    Vec value;                  ///< last iterate
    std::vector<Vec> iterates;  ///< history; iterates[0] is the initial guess
    bool converged = false;
};

/// Successive substitution x^{i+1} = g(x^i) until the inf-norm difference
/// drops below epsilon or max_iterations pass. Non-convergence is flagged,
/// not thrown; the last iterate is still returned.
DirectIterationResult direct_iteration(const std::function<Vec(const Vec&)>& g, Vec guess,
                                       const IterationConfig& cfg);

enum class GuessMode { PreviousValue, ExplicitPredictor };

/// x(t+h) ~ x(t) + F(x(t+h), u(t+h)) h, solved by direct iteration.
/// Throws SimulationError if the iteration does not converge.
Vec implicit_euler_step(const DerivFn& f, const Vec& x, const InputFn& u, double t, double h,
                        const IterationConfig& cfg,
                        GuessMode guess = GuessMode::ExplicitPredictor);

/// Per-step ratios |x^{i+2} - x^{i+1}| / |x^{i+1} - x^i| of an iterate
/// history. A zero difference means the iteration converged; the ratio is
/// omitted. Needs at least 3 iterates.
std::vector<double> contraction_ratio(const std::vector<Vec>& iterates);

/// Largest step size for which the implicit-Euler direct iteration
/// contracts: h < 1 / |df/dx|. A zero bound yields +infinity.
double max_contraction_step(double dfdx_bound);

struct GodunovResult {
    Vec position;  ///< x(t+h)
    Vec velocity;  ///< central difference (x(t+h) - x(t-h)) / (2h), the velocity at t
};

/// Two-step position update x(t+h) = 2 x(t) - x(t-h) + F2(x(t), u(t)) h^2.
/// F2 receives a backward-difference velocity estimate; the method itself
/// assumes the acceleration does not depend on it.
GodunovResult godunov_step(const AccelFn& f2, const Vec& x_t, const Vec& x_prev, const InputFn& u,
                           double t, double h);

} // namespace cosim
