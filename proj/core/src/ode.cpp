#include "cosim/ode.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "cosim/errors.hpp"

namespace cosim {

LinearSystemModel::LinearSystemModel(Matrix a, Matrix b, Matrix c, Matrix d, Vec x0_)
    : A(std::move(a)), B(std::move(b)), C(std::move(c)), D(std::move(d)), x0(std::move(x0_)) {
    if (!A.square()) throw ValidationError("LinearSystemModel: A must be square");
    const std::size_t n = A.rows();
    if (B.rows() != n) throw ValidationError("LinearSystemModel: B row count must match A");
    if (C.cols() != n) throw ValidationError("LinearSystemModel: C column count must match A");
    if (D.rows() != C.rows() || D.cols() != B.cols())
        throw ValidationError("LinearSystemModel: D must be output_dim x input_dim");
    if (x0.size() != n) throw ValidationError("LinearSystemModel: x0 length must match A");
    auto finite = [](const Matrix& m) {
        return std::all_of(m.data().begin(), m.data().end(),
                           [](double x) { return std::isfinite(x); });
    };
    if (!finite(A) || !finite(B) || !finite(C) || !finite(D) || !all_finite(x0))
        throw ValidationError("LinearSystemModel: entries must be finite");
}

LinearSystemModel LinearSystemModel::autonomous(Matrix a, Vec x0) {
    const std::size_t n = a.rows();
    return LinearSystemModel(std::move(a), Matrix(n, 0), Matrix::identity(n), Matrix(n, 0),
                             std::move(x0));
}

Matrix augment_affine(const Matrix& a, const Vec& b) {
    if (!a.square()) throw ValidationError("augment_affine: A must be square");
    const std::size_t n = a.rows();
    if (b.size() != n) throw ValidationError("augment_affine: b length must match A");
    Matrix m(n + 1, n + 1);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) m(i, j) = a(i, j);
        m(i, n) = b[i];
    }
    return m;
}

namespace {

bool is_zero(const Vec& v) {
    return std::all_of(v.begin(), v.end(), [](double x) { return x == 0.0; });
}

} // namespace

Vec analytical_solution(const LinearSystemModel& model, const AffineDrive& drive, double t) {
    if (t < 0.0) throw ValidationError("analytical_solution: t must be >= 0");
    const std::size_t n = model.state_dim();
    if (drive.b.empty() || is_zero(drive.b)) {
        return mat_exp(model.A, t) * model.x0;
    }
    if (drive.b.size() != n)
        throw ValidationError("analytical_solution: drive dimension must match the state");
    const Matrix ahat = augment_affine(model.A, drive.b);
    Vec xhat = model.x0;
    xhat.push_back(1.0);
    Vec full = mat_exp(ahat, t) * xhat;
    full.resize(n);
    return full;
}

std::vector<Vec> analytical_grid(const LinearSystemModel& model, const AffineDrive& drive,
                                 double h, std::size_t steps) {
    if (h <= 0.0) throw ValidationError("analytical_grid: h must be positive");
    const std::size_t n = model.state_dim();
    std::vector<Vec> out;
    out.reserve(steps + 1);

    if (drive.b.empty() || is_zero(drive.b)) {
        const Matrix step = mat_exp(model.A, h);
        Vec x = model.x0;
        out.push_back(x);
        for (std::size_t i = 0; i < steps; ++i) {
            x = step * x;
            out.push_back(x);
        }
        return out;
    }

    if (drive.b.size() != n)
        throw ValidationError("analytical_grid: drive dimension must match the state");
    const Matrix step = mat_exp(augment_affine(model.A, drive.b), h);
    Vec xhat = model.x0;
    xhat.push_back(1.0);
    auto truncate = [n](Vec v) {
        v.resize(n);
        return v;
    };
    out.push_back(truncate(xhat));
    for (std::size_t i = 0; i < steps; ++i) {
        xhat = step * xhat;
        out.push_back(truncate(xhat));
    }
    return out;
}

GeneralModel to_first_order(const SecondOrderModel& m) {
    GeneralModel g;
    g.state_dim = 2 * m.dim;
    g.input_dim = m.input_dim;
    g.output_dim = 2 * m.dim;
    const std::size_t dim = m.dim;
    const AccelFn f2 = m.F2;
    g.F = [dim, f2](const Vec& state, const Vec& input) {
        Vec pos(state.begin(), state.begin() + dim);
        Vec vel(state.begin() + dim, state.end());
        Vec acc = f2(pos, vel, input);
        Vec d(2 * dim);
        for (std::size_t i = 0; i < dim; ++i) {
            d[i] = vel[i];
            d[dim + i] = acc[i];
        }
        return d;
    };
    g.G = [](const Vec& state, const Vec&) { return state; };
    g.x0 = m.x0;
    g.x0.insert(g.x0.end(), m.v0.begin(), m.v0.end());
    return g;
}

std::size_t state_dim(const AnyModel& m) {
    return std::visit(
        [](const auto& model) -> std::size_t {
            using T = std::decay_t<decltype(model)>;
            if constexpr (std::is_same_v<T, LinearSystemModel>) return model.state_dim();
            else if constexpr (std::is_same_v<T, GeneralModel>) return model.state_dim;
            else return 2 * model.dim;
        },
        m);
}

std::size_t input_dim(const AnyModel& m) {
    return std::visit(
        [](const auto& model) -> std::size_t {
            using T = std::decay_t<decltype(model)>;
            if constexpr (std::is_same_v<T, LinearSystemModel>) return model.input_dim();
            else return model.input_dim;
        },
        m);
}

std::size_t output_dim(const AnyModel& m) {
    return std::visit(
        [](const auto& model) -> std::size_t {
            using T = std::decay_t<decltype(model)>;
            if constexpr (std::is_same_v<T, LinearSystemModel>) return model.output_dim();
            else if constexpr (std::is_same_v<T, GeneralModel>) return model.output_dim;
            else return 2 * model.dim;
        },
        m);
}

Vec initial_state(const AnyModel& m) {
    return std::visit(
        [](const auto& model) -> Vec {
            using T = std::decay_t<decltype(model)>;
            if constexpr (std::is_same_v<T, SecondOrderModel>) {
                Vec x = model.x0;
                x.insert(x.end(), model.v0.begin(), model.v0.end());
                return x;
            } else {
                return model.x0;
            }
        },
        m);
}

Vec model_derivative(const AnyModel& m, const Vec& state, const Vec& input) {
    return std::visit(
        [&](const auto& model) -> Vec {
            using T = std::decay_t<decltype(model)>;
            if constexpr (std::is_same_v<T, LinearSystemModel>) {
                Vec d = model.A * state;
                if (model.input_dim() > 0) {
                    Vec bu = model.B * input;
                    for (std::size_t i = 0; i < d.size(); ++i) d[i] += bu[i];
                }
                return d;
            } else if constexpr (std::is_same_v<T, GeneralModel>) {
                return model.F(state, input);
            } else {
                const std::size_t dim = model.dim;
                Vec pos(state.begin(), state.begin() + dim);
                Vec vel(state.begin() + dim, state.end());
                Vec acc = model.F2(pos, vel, input);
                Vec d(2 * dim);
                for (std::size_t i = 0; i < dim; ++i) {
                    d[i] = vel[i];
                    d[dim + i] = acc[i];
                }
                return d;
            }
        },
        m);
}

Vec model_output(const AnyModel& m, const Vec& state, const Vec& input) {
    return std::visit(
        [&](const auto& model) -> Vec {
            using T = std::decay_t<decltype(model)>;
            if constexpr (std::is_same_v<T, LinearSystemModel>) {
                Vec y = model.C * state;
                if (model.input_dim() > 0) {
                    Vec du = model.D * input;
                    for (std::size_t i = 0; i < y.size(); ++i) y[i] += du[i];
                }
                return y;
            } else if constexpr (std::is_same_v<T, GeneralModel>) {
                return model.G(state, input);
            } else {
                return state;
            }
        },
        m);
}

} // namespace cosim
