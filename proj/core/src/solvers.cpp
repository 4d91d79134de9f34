#include "cosim/solvers.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "cosim/errors.hpp"

namespace cosim {

const char* to_string(StepperKind k) {
    switch (k) {
        case StepperKind::ExplicitEuler: return "explicit_euler";
        case StepperKind::ImplicitEuler: return "implicit_euler";
        case StepperKind::Midpoint: return "midpoint";
        case StepperKind::Godunov: return "godunov";
    }
    return "?";
}

namespace {

void require_step(double h) {
    if (!(h > 0.0)) throw ValidationError("stepper: step size must be positive");
}

void require_finite(const Vec& v, const char* what) {
    if (!all_finite(v)) {
        std::ostringstream os;
        os << what << " evaluated to a non-finite value";
        throw SimulationError(os.str());
    }
}

} // namespace

Vec explicit_euler_step(const DerivFn& f, const Vec& x, const InputFn& u, double t, double h) {
    require_step(h);
    Vec d = f(x, u(t));
    require_finite(d, "derivative");
    return add_scaled(x, h, d);
}

Vec midpoint_step(const DerivFn& f, const Vec& x, const InputFn& u, double t, double h) {
    require_step(h);
    Vec d0 = f(x, u(t));
    require_finite(d0, "derivative");
    Vec mid = add_scaled(x, 0.5 * h, d0);
    Vec d1 = f(mid, u(t + 0.5 * h));
    require_finite(d1, "derivative");
    return add_scaled(x, h, d1);
}

DirectIterationResult direct_iteration(const std::function<Vec(const Vec&)>& g, Vec guess,
                                       const IterationConfig& cfg) {
    if (!(cfg.epsilon > 0.0)) throw ValidationError("direct_iteration: epsilon must be positive");
    if (cfg.max_iterations < 1)
        throw ValidationError("direct_iteration: max_iterations must be >= 1");

    DirectIterationResult res;
    res.iterates.push_back(guess);
    Vec current = std::move(guess);
    for (int i = 0; i < cfg.max_iterations; ++i) {
        Vec next = g(current);
        require_finite(next, "fixed-point map");
        res.iterates.push_back(next);
        const double diff = inf_norm(sub(next, current));
        current = std::move(next);
        if (cfg.check_convergence && diff < cfg.epsilon) {
            res.converged = true;
            break;
        }
    }
    if (!cfg.check_convergence) res.converged = true;
    res.value = current;
    return res;
}

Vec implicit_euler_step(const DerivFn& f, const Vec& x, const InputFn& u, double t, double h,
                        const IterationConfig& cfg, GuessMode guess) {
    require_step(h);
    const Vec u_next = u(t + h);
    auto g = [&](const Vec& z) {
        Vec d = f(z, u_next);
        require_finite(d, "derivative");
        return add_scaled(x, h, d);
    };
    Vec start = (guess == GuessMode::PreviousValue) ? x : explicit_euler_step(f, x, u, t, h);
    DirectIterationResult res = direct_iteration(g, std::move(start), cfg);
    if (!res.converged) {
        std::ostringstream os;
        os << "implicit Euler: direct iteration did not converge within " << cfg.max_iterations
           << " iterations at t=" << t + h;
        throw SimulationError(os.str());
    }
    return res.value;
}

std::vector<double> contraction_ratio(const std::vector<Vec>& iterates) {
    if (iterates.size() < 3)
        throw ValidationError("contraction_ratio: need at least 3 iterates");
    std::vector<double> ratios;
    for (std::size_t i = 0; i + 2 < iterates.size(); ++i) {
        const double d0 = inf_norm(sub(iterates[i + 1], iterates[i]));
        const double d1 = inf_norm(sub(iterates[i + 2], iterates[i + 1]));
        if (d0 == 0.0) break;  // converged; remaining ratios are omitted
        ratios.push_back(d1 / d0);
    }
    return ratios;
}

double max_contraction_step(double dfdx_bound) {
    if (dfdx_bound < 0.0)
        throw ValidationError("max_contraction_step: bound must be non-negative");
    if (dfdx_bound == 0.0) return std::numeric_limits<double>::infinity();
    return 1.0 / dfdx_bound;
}

GodunovResult godunov_step(const AccelFn& f2, const Vec& x_t, const Vec& x_prev, const InputFn& u,
                           double t, double h) {
    require_step(h);
    if (x_t.size() != x_prev.size())
        throw ValidationError("godunov_step: history dimension mismatch");
    Vec vel_est(x_t.size());
    for (std::size_t i = 0; i < x_t.size(); ++i) vel_est[i] = (x_t[i] - x_prev[i]) / h;
    Vec acc = f2(x_t, vel_est, u(t));
    require_finite(acc, "acceleration");
    GodunovResult r;
    r.position.resize(x_t.size());
    r.velocity.resize(x_t.size());
    for (std::size_t i = 0; i < x_t.size(); ++i) {
        r.position[i] = 2.0 * x_t[i] - x_prev[i] + acc[i] * h * h;
        r.velocity[i] = (r.position[i] - x_prev[i]) / (2.0 * h);
    }
    return r;
}

} // namespace cosim
