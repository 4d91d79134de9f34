#pragma once

#include <complex>
#include <cstddef>
#include <initializer_list>
#include <vector>

namespace cosim {

/// Dense real vector. Components are unitless; units are carried by context.
using Vec = std::vector<double>;

/// max |v_i|; 0 for the empty vector.
double inf_norm(const Vec& v);

double two_norm(const Vec& v);

bool all_finite(const Vec& v);

/// x + a*y, the shape every one-step update takes.
Vec add_scaled(const Vec& x, double a, const Vec& y);

Vec sub(const Vec& a, const Vec& b);

/// Dense real matrix, row-major.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols);
    Matrix(std::initializer_list<std::initializer_list<double>> rows);

    static Matrix identity(std::size_t n);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    bool square() const { return rows_ == cols_; }
    bool empty() const { return rows_ == 0 || cols_ == 0; }

    double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    const std::vector<double>& data() const { return data_; }

    bool operator==(const Matrix& other) const = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

Matrix operator+(const Matrix& a, const Matrix& b);
Matrix operator-(const Matrix& a, const Matrix& b);
Matrix operator*(const Matrix& a, const Matrix& b);
Matrix operator*(double s, const Matrix& a);
Vec operator*(const Matrix& a, const Vec& v);

/// max row sum of |entries| (the operator norm induced by inf_norm).
double inf_norm(const Matrix& a);

double max_abs_entry(const Matrix& a);

/// e^{At} by scaling-and-squaring over a truncated Taylor series: halve
/// until ||At|| <= 0.5, sum terms until the relative contribution drops
/// below 1e-16, then square back up.
Matrix mat_exp(const Matrix& a, double t);

/// All eigenvalues of a square matrix. 1x1 and 2x2 use closed forms;
/// larger matrices go through Householder Hessenberg reduction followed
/// by implicitly shifted (Francis double-shift) QR with 1x1/2x2 deflation.
/// Throws if the QR iteration fails to converge.
std::vector<std::complex<double>> eigenvalues(Matrix a);

/// max |lambda| over eigenvalues(a).
double spectral_radius(const Matrix& a);

/// Solve a x = b by Gaussian elimination with partial pivoting. A pivot
/// below 1e-12 * max|a_ij| is treated as singular.
Vec solve_linear(Matrix a, Vec b);

/// Inverse by Gauss-Jordan with the same pivot tolerance as solve_linear.
Matrix inverse(const Matrix& a);

/// [[a, b], [0, 0]] block layout helpers used by the step-map assemblies.
Matrix hstack(const Matrix& a, const Matrix& b);
Matrix vstack(const Matrix& a, const Matrix& b);
Matrix matrix_power(Matrix a, unsigned long k);

} // namespace cosim
