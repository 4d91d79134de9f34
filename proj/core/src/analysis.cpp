#include "cosim/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "cosim/errors.hpp"

namespace cosim {

StepMatrix standalone_step_matrix(StepperKind method, const Matrix& a, double h) {
    if (!a.square()) throw ValidationError("standalone_step_matrix: A must be square");
    if (!(h > 0.0)) throw ValidationError("standalone_step_matrix: h must be positive");
    const Matrix id = Matrix::identity(a.rows());
    switch (method) {
        case StepperKind::ExplicitEuler: return {id + h * a};
        case StepperKind::ImplicitEuler: return {inverse(id - h * a)};
        default:
            throw ValidationError("standalone_step_matrix: only the Euler methods have a "
                                  "closed-form step map here");
    }
}

double explicit_euler_msd_hmax(double c, double c_f) {
    if (!(c > 0.0)) throw ValidationError("explicit_euler_msd_hmax: c must be positive");
    if (c_f < 0.0) throw ValidationError("explicit_euler_msd_hmax: c_f must be non-negative");
    if (c_f * c_f < 4.0 * c * c) return c_f / (c * c);

    // overdamped: real eigenvalues; numeric sweep with the bracket scaled
    // to the spectrum (at h far below 1/|lambda| the eigenvalues of
    // I + hA nearly coincide and the stability test loses precision)
    const Matrix a{{0.0, 1.0}, {-c * c, -c_f}};
    double lmax = 0.0;
    for (const auto& l : eigenvalues(a)) lmax = std::max(lmax, std::abs(l));
    auto stable = [&](double h) {
        return spectral_radius(standalone_step_matrix(StepperKind::ExplicitEuler, a, h).matrix) <=
               1.0;
    };
    double lo = 0.1 / lmax;
    while (!stable(lo) && lo > 1e-300) lo *= 0.125;
    if (!stable(lo)) return 0.0;
    double hi = lo;
    while (stable(hi) && hi < 1e6) hi *= 2.0;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        (stable(mid) ? lo : hi) = mid;
    }
    return lo;
}

namespace {

const LinearSystemModel& require_linear_zoh_euler(const SimulationUnit& u) {
    const LinearSystemModel* lin = u.linear_model();
    if (!lin)
        throw UnsupportedTopology("unit '" + u.reference() + "' does not wrap a linear model");
    if (u.stepper() != StepperKind::ExplicitEuler && u.stepper() != StepperKind::ImplicitEuler)
        throw UnsupportedTopology("unit '" + u.reference() +
                                  "' must use an Euler stepper for step-map assembly");
    if (u.input_dim() > 0 && u.approximation() != ApproximationKind::ZeroOrderHold)
        throw UnsupportedTopology("unit '" + u.reference() +
                                  "' must use a zero-order hold for step-map assembly");
    return *lin;
}

// [[A, B], [0, 0]] on the augmented state [x; u_held]
Matrix held_input_system(const LinearSystemModel& m) {
    const std::size_t n = m.state_dim(), mm = m.input_dim();
    Matrix top = hstack(m.A, m.B);
    Matrix bottom(mm, n + mm);
    return vstack(top, bottom);
}

} // namespace

StepMatrix unit_step_matrix(const SimulationUnit& unit, double H) {
    const LinearSystemModel& lin = require_linear_zoh_euler(unit);
    const unsigned long k = unit.internal_steps_for(H);
    const Matrix sys = held_input_system(lin);
    const Matrix one = standalone_step_matrix(unit.stepper(), sys, unit.internal_step()).matrix;
    return {matrix_power(one, k)};
}

StepMatrix cosim_step_matrix_jacobi(const SimulationUnit& u1, const SimulationUnit& u2, double H) {
    const LinearSystemModel& m1 = require_linear_zoh_euler(u1);
    const LinearSystemModel& m2 = require_linear_zoh_euler(u2);
    if (m1.input_dim() != m2.output_dim() || m2.input_dim() != m1.output_dim())
        throw UnsupportedTopology("feedback pair: coupling dimensions do not match");
    if (max_abs_entry(m2.D) != 0.0)
        throw UnsupportedTopology("feedback pair: D2 must be zero (no algebraic loop)");

    const std::size_t n1 = m1.state_dim(), n2 = m2.state_dim();
    const std::size_t in1 = m1.input_dim(), in2 = m2.input_dim();

    const Matrix a1 = unit_step_matrix(u1, H).matrix;  // (n1+in1)^2
    const Matrix a2 = unit_step_matrix(u2, H).matrix;

    // select [x1; x2] out of [x1; u1; x2; u2]
    Matrix select(n1 + n2, n1 + in1 + n2 + in2);
    for (std::size_t i = 0; i < n1; ++i) select(i, i) = 1.0;
    for (std::size_t i = 0; i < n2; ++i) select(n1 + i, n1 + in1 + i) = 1.0;

    // diag(A1^k1, A2^k2)
    Matrix blk(n1 + in1 + n2 + in2, n1 + in1 + n2 + in2);
    for (std::size_t i = 0; i < n1 + in1; ++i)
        for (std::size_t j = 0; j < n1 + in1; ++j) blk(i, j) = a1(i, j);
    for (std::size_t i = 0; i < n2 + in2; ++i)
        for (std::size_t j = 0; j < n2 + in2; ++j) blk(n1 + in1 + i, n1 + in1 + j) = a2(i, j);

    // [x1; u1; x2; u2] from [x1; x2] with u1 = C2 x2, u2 = C1 x1 + D1 C2 x2
    Matrix embed(n1 + in1 + n2 + in2, n1 + n2);
    for (std::size_t i = 0; i < n1; ++i) embed(i, i) = 1.0;
    const Matrix d1c2 = m1.D * m2.C;
    for (std::size_t i = 0; i < in1; ++i)
        for (std::size_t j = 0; j < n2; ++j) embed(n1 + i, n1 + j) = m2.C(i, j);
    for (std::size_t i = 0; i < n2; ++i) embed(n1 + in1 + i, n1 + i) = 1.0;
    for (std::size_t i = 0; i < in2; ++i) {
        for (std::size_t j = 0; j < n1; ++j) embed(n1 + in1 + n2 + i, j) = m1.C(i, j);
        for (std::size_t j = 0; j < n2; ++j) embed(n1 + in1 + n2 + i, n1 + j) = d1c2(i, j);
    }

    return {select * blk * embed};
}

StepMatrix cosim_step_matrix_iterative_jacobi(const SimulationUnit& u1, const SimulationUnit& u2,
                                              double H) {
    const LinearSystemModel& m1 = require_linear_zoh_euler(u1);
    const LinearSystemModel& m2 = require_linear_zoh_euler(u2);
    if (m1.input_dim() != m2.output_dim() || m2.input_dim() != m1.output_dim())
        throw UnsupportedTopology("feedback pair: coupling dimensions do not match");
    if (max_abs_entry(m2.D) != 0.0)
        throw UnsupportedTopology("feedback pair: D2 must be zero (no algebraic loop)");

    const std::size_t n1 = m1.state_dim(), n2 = m2.state_dim();
    const std::size_t in1 = m1.input_dim(), in2 = m2.input_dim();
    const Matrix a1 = unit_step_matrix(u1, H).matrix;
    const Matrix a2 = unit_step_matrix(u2, H).matrix;

    // M blocks of [x_j(t+H); u_j(t+H)] = M_j [x_j(t); u_j(t)]
    auto block = [](const Matrix& m, std::size_t r0, std::size_t c0, std::size_t rows,
                    std::size_t cols) {
        Matrix b(rows, cols);
        for (std::size_t i = 0; i < rows; ++i)
            for (std::size_t j = 0; j < cols; ++j) b(i, j) = m(r0 + i, c0 + j);
        return b;
    };
    const Matrix m1xx = block(a1, 0, 0, n1, n1), m1xu = block(a1, 0, n1, n1, in1);
    const Matrix m1ux = block(a1, n1, 0, in1, n1), m1uu = block(a1, n1, n1, in1, in1);
    const Matrix m2xx = block(a2, 0, 0, n2, n2), m2xu = block(a2, 0, n2, n2, in2);
    const Matrix m2ux = block(a2, n2, 0, in2, n2), m2uu = block(a2, n2, n2, in2, in2);

    const std::size_t total = n1 + in1 + n2 + in2;
    auto put = [](Matrix& dst, const Matrix& src, std::size_t r0, std::size_t c0) {
        for (std::size_t i = 0; i < src.rows(); ++i)
            for (std::size_t j = 0; j < src.cols(); ++j) dst(r0 + i, c0 + j) = src(i, j);
    };

    // previous-step part: diag-ish blocks acting on [x1; u1; x2; u2](t_i)
    Matrix now(total, total);
    put(now, m1xx, 0, 0);
    put(now, m1ux, n1, 0);
    put(now, m2xx, n1 + in1, n1 + in1);
    put(now, m2ux, n1 + in1 + n2, n1 + in1);

    // same-time part from u1 = C2 x2 and u2 = C1 x1 + D1 u1 at t_{i+1}
    Matrix next(total, total);
    put(next, m1xu * m2.C, 0, n1 + in1);
    put(next, m1uu * m2.C, n1, n1 + in1);
    put(next, m2xu * m1.C, n1 + in1, 0);
    put(next, m2xu * m1.D, n1 + in1, n1);
    put(next, m2uu * m1.C, n1 + in1 + n2, 0);
    put(next, m2uu * m1.D, n1 + in1 + n2, n1);

    Matrix lhs = Matrix::identity(total) - next;
    Matrix inv;
    try {
        inv = inverse(lhs);
    } catch (const std::runtime_error&) {
        throw SimulationError(
            "iterative-jacobi step map: I - Mbar is singular (inner iteration diverges)");
    }
    return {inv * now};
}

double max_error(const std::vector<double>& times, const std::vector<Vec>& values,
                 const std::function<Vec(double)>& oracle) {
    if (times.size() != values.size())
        throw ValidationError("max_error: times and values must have equal length");
    double worst = 0.0;
    for (std::size_t i = 0; i < times.size(); ++i) {
        const Vec ref = oracle(times[i]);
        if (ref.size() != values[i].size())
            throw ValidationError("max_error: oracle dimension mismatch");
        worst = std::max(worst, inf_norm(sub(values[i], ref)));
    }
    return worst;
}

double estimate_order(const ErrorCurve& curve) {
    std::vector<std::pair<double, double>> pts;
    for (const auto& [h, e] : curve.points) {
        if (!(h > 0.0)) throw ValidationError("estimate_order: h values must be positive");
        if (e < 0.0) throw ValidationError("estimate_order: errors must be non-negative");
        if (e < 1e-12) continue;  // round-off floor pollutes the slope
        pts.emplace_back(h, e);
    }
    if (curve.points.size() < 4)
        throw ValidationError("estimate_order: need at least 4 points");
    {
        std::set<double> hs;
        double hmin = 0.0, hmax = 0.0;
        for (const auto& [h, e] : curve.points) {
            hs.insert(h);
            hmin = hmin == 0.0 ? h : std::min(hmin, h);
            hmax = std::max(hmax, h);
        }
        if (hs.size() != curve.points.size())
            throw ValidationError("estimate_order: h values must be distinct");
        if (hmax / hmin < 100.0)
            throw ValidationError("estimate_order: h values must span at least two decades");
    }
    if (pts.size() < 2)
        throw ValidationError("estimate_order: too few points above the round-off floor");

    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (const auto& [h, e] : pts) {
        const double x = std::log(h), y = std::log(e);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const double n = static_cast<double>(pts.size());
    const double denom = n * sxx - sx * sx;
    if (denom == 0.0) throw ValidationError("estimate_order: degenerate spread of h");
    return (n * sxy - sx * sy) / denom;
}

} // namespace cosim
