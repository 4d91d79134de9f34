#pragma once

#include <cstddef>
#include <functional>
#include <variant>

#include "cosim/numerics.hpp"

namespace cosim {

/// Linear IVP with output:
///   x' = A x + B u,  y = C x + D u,  x(0) = x0.
struct LinearSystemModel {
    Matrix A, B, C, D;
    Vec x0;

    LinearSystemModel(Matrix a, Matrix b, Matrix c, Matrix d, Vec x0);

    /// Closed system: no inputs, outputs are the states (C = I).
    static LinearSystemModel autonomous(Matrix a, Vec x0);

    std::size_t state_dim() const { return A.rows(); }
    std::size_t input_dim() const { return B.cols(); }
    std::size_t output_dim() const { return C.rows(); }
};

/// General first-order IVP with output. F and G must be pure and return
/// vectors of the declared dimensions for any finite input.
struct GeneralModel {
    std::size_t state_dim = 0;
    std::size_t input_dim = 0;
    std::size_t output_dim = 0;
    std::function<Vec(const Vec& state, const Vec& input)> F;
    std::function<Vec(const Vec& state, const Vec& input)> G;
    Vec x0;
};

/// Acceleration rule of a second-derivative IVP. The velocity argument
/// exists so damped systems can be written down; the multi-step position
/// integrator only supplies a finite-difference estimate for it.
using AccelFn = std::function<Vec(const Vec& position, const Vec& velocity, const Vec& input)>;

/// Second-derivative IVP: x'' = F2(x, x', u), x(0) = x0, x'(0) = v0.
struct SecondOrderModel {
    std::size_t dim = 0;
    std::size_t input_dim = 0;
    AccelFn F2;
    Vec x0, v0;
};

/// Constant forcing term b of x' = A x + b.
struct AffineDrive {
    Vec b;
};

using AnyModel = std::variant<LinearSystemModel, GeneralModel, SecondOrderModel>;

/// Block matrix [[A, b], [0, 0]]. The augmented state [x; 1] turns the
/// forced system x' = A x + b into an unforced one.
Matrix augment_affine(const Matrix& a, const Vec& b);

/// Exact state of x' = A x + b at time t >= 0 via the matrix exponential
/// of the affine-augmented system.
Vec analytical_solution(const LinearSystemModel& model, const AffineDrive& drive, double t);

/// Exact states on the uniform grid 0, h, 2h, ..., steps*h, computed
/// incrementally: x(t+h) = e^{A h} x(t).
std::vector<Vec> analytical_grid(const LinearSystemModel& model, const AffineDrive& drive,
                                 double h, std::size_t steps);

/// First-order form with state [position; velocity].
GeneralModel to_first_order(const SecondOrderModel& m);

std::size_t state_dim(const AnyModel& m);
std::size_t input_dim(const AnyModel& m);
std::size_t output_dim(const AnyModel& m);
Vec initial_state(const AnyModel& m);

/// State derivative; second-order models are evaluated in first-order form.
Vec model_derivative(const AnyModel& m, const Vec& state, const Vec& input);

/// Output function; second-order models expose [position; velocity].
Vec model_output(const AnyModel& m, const Vec& state, const Vec& input);

} // namespace cosim
