#include "cosim/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "cosim/errors.hpp"

namespace cosim {

double inf_norm(const Vec& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

double two_norm(const Vec& v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

bool all_finite(const Vec& v) {
    return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

Vec add_scaled(const Vec& x, double a, const Vec& y) {
    if (x.size() != y.size()) throw std::invalid_argument("add_scaled: size mismatch");
    Vec r(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) r[i] = x[i] + a * y[i];
    return r;
}

Vec sub(const Vec& a, const Vec& b) {
    if (a.size() != b.size()) throw std::invalid_argument("sub: size mismatch");
    Vec r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
    return r;
}

Matrix::Matrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}

Matrix::Matrix(std::initializer_list<std::initializer_list<double>> rows) {
    rows_ = rows.size();
    cols_ = rows_ == 0 ? 0 : rows.begin()->size();
    data_.reserve(rows_ * cols_);
    for (const auto& r : rows) {
        if (r.size() != cols_) throw std::invalid_argument("Matrix: ragged initializer");
        data_.insert(data_.end(), r.begin(), r.end());
    }
}

Matrix Matrix::identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

Matrix operator+(const Matrix& a, const Matrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols())
        throw std::invalid_argument("matrix +: shape mismatch");
    Matrix r(a.rows(), a.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) r(i, j) = a(i, j) + b(i, j);
    return r;
}

Matrix operator-(const Matrix& a, const Matrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols())
        throw std::invalid_argument("matrix -: shape mismatch");
    Matrix r(a.rows(), a.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) r(i, j) = a(i, j) - b(i, j);
    return r;
}

Matrix operator*(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.rows()) throw std::invalid_argument("matrix *: shape mismatch");
    Matrix r(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const double aik = a(i, k);
            if (aik == 0.0) continue;
            for (std::size_t j = 0; j < b.cols(); ++j) r(i, j) += aik * b(k, j);
        }
    return r;
}

Matrix operator*(double s, const Matrix& a) {
    Matrix r(a.rows(), a.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) r(i, j) = s * a(i, j);
    return r;
}

Vec operator*(const Matrix& a, const Vec& v) {
    if (a.cols() != v.size()) throw std::invalid_argument("matrix * vector: shape mismatch");
    Vec r(a.rows(), 0.0);
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) r[i] += a(i, j) * v[j];
    return r;
}

double inf_norm(const Matrix& a) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < a.cols(); ++j) s += std::abs(a(i, j));
        m = std::max(m, s);
    }
    return m;
}

double max_abs_entry(const Matrix& a) {
    double m = 0.0;
    for (double x : a.data()) m = std::max(m, std::abs(x));
    return m;
}

Matrix hstack(const Matrix& a, const Matrix& b) {
    if (a.rows() != b.rows()) throw std::invalid_argument("hstack: row mismatch");
    Matrix r(a.rows(), a.cols() + b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t j = 0; j < a.cols(); ++j) r(i, j) = a(i, j);
        for (std::size_t j = 0; j < b.cols(); ++j) r(i, a.cols() + j) = b(i, j);
    }
    return r;
}

Matrix vstack(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.cols()) throw std::invalid_argument("vstack: column mismatch");
    Matrix r(a.rows() + b.rows(), a.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) r(i, j) = a(i, j);
    for (std::size_t i = 0; i < b.rows(); ++i)
        for (std::size_t j = 0; j < b.cols(); ++j) r(a.rows() + i, j) = b(i, j);
    return r;
}

Matrix matrix_power(Matrix a, unsigned long k) {
    if (!a.square()) throw std::invalid_argument("matrix_power: matrix must be square");
    Matrix r = Matrix::identity(a.rows());
    while (k > 0) {
        if (k & 1UL) r = r * a;
        k >>= 1UL;
        if (k > 0) a = a * a;
    }
    return r;
}

Matrix mat_exp(const Matrix& a, double t) {
    if (!a.square()) throw std::invalid_argument("mat_exp: matrix must be square");
    if (!std::isfinite(t)) throw std::invalid_argument("mat_exp: time must be finite");

    const std::size_t n = a.rows();
    Matrix b = t * a;

    int squarings = 0;
    double norm = inf_norm(b);
    while (norm > 0.5) {
        norm *= 0.5;
        ++squarings;
    }
    if (squarings > 0) b = std::ldexp(1.0, -squarings) * b;

    Matrix sum = Matrix::identity(n);
    Matrix term = Matrix::identity(n);
    for (int k = 1; k <= 64; ++k) {
        term = (1.0 / k) * (term * b);
        sum = sum + term;
        if (inf_norm(term) <= 1e-16 * inf_norm(sum)) break;
    }
    for (int s = 0; s < squarings; ++s) sum = sum * sum;
    return sum;
}

namespace {

// Eigenvalues of a real 2x2 block. Complex pairs stay conjugate.
std::pair<std::complex<double>, std::complex<double>> eig2(double a, double b, double c, double d) {
    const double tr = a + d;
    const double det = a * d - b * c;
    const double q = 0.5 * tr;
    const double disc = q * q - det;
    if (disc >= 0.0) {
        const double r = std::sqrt(disc);
        const double l1 = (q >= 0.0) ? q + r : q - r;
        const double l2 = (l1 != 0.0) ? det / l1 : tr - l1;
        return {std::complex<double>(l1, 0.0), std::complex<double>(l2, 0.0)};
    }
    const double s = std::sqrt(-disc);
    return {std::complex<double>(q, s), std::complex<double>(q, -s)};
}

void hessenberg_reduce(Matrix& h) {
    const std::size_t n = h.rows();
    if (n < 3) return;
    for (std::size_t k = 0; k + 2 < n; ++k) {
        double nrm = 0.0;
        for (std::size_t i = k + 1; i < n; ++i) nrm += h(i, k) * h(i, k);
        nrm = std::sqrt(nrm);
        if (nrm == 0.0) continue;

        const double x0 = h(k + 1, k);
        const double alpha = (x0 >= 0.0) ? -nrm : nrm;
        std::vector<double> v(n - k - 1);
        v[0] = x0 - alpha;
        for (std::size_t i = 1; i < v.size(); ++i) v[i] = h(k + 1 + i, k);
        double vv = 0.0;
        for (double x : v) vv += x * x;
        if (vv == 0.0) continue;
        const double beta = 2.0 / vv;

        // left: H := P H
        for (std::size_t j = k; j < n; ++j) {
            double s = 0.0;
            for (std::size_t i = 0; i < v.size(); ++i) s += v[i] * h(k + 1 + i, j);
            s *= beta;
            for (std::size_t i = 0; i < v.size(); ++i) h(k + 1 + i, j) -= v[i] * s;
        }
        // right: H := H P
        for (std::size_t i = 0; i < n; ++i) {
            double s = 0.0;
            for (std::size_t j = 0; j < v.size(); ++j) s += h(i, k + 1 + j) * v[j];
            s *= beta;
            for (std::size_t j = 0; j < v.size(); ++j) h(i, k + 1 + j) -= v[j] * s;
        }
    }
}

// One implicit double-shift sweep on the unreduced block [lo..hi].
void francis_step(Matrix& h, std::size_t lo, std::size_t hi, double shift_sum, double shift_prod) {
    double x = h(lo, lo) * h(lo, lo) + h(lo, lo + 1) * h(lo + 1, lo) - shift_sum * h(lo, lo) + shift_prod;
    double y = h(lo + 1, lo) * (h(lo, lo) + h(lo + 1, lo + 1) - shift_sum);
    double z = h(lo + 1, lo) * h(lo + 2, lo + 1);

    // chase the 3x3 bulge down the block
    for (std::size_t k = lo; k + 2 <= hi; ++k) {
        const double nrm = std::sqrt(x * x + y * y + z * z);
        if (nrm != 0.0) {
            const double alpha = (x >= 0.0) ? -nrm : nrm;
            const double v0 = x - alpha, v1 = y, v2 = z;
            const double vv = v0 * v0 + v1 * v1 + v2 * v2;
            if (vv != 0.0) {
                const double beta = 2.0 / vv;
                const std::size_t c0 = (k > lo) ? k - 1 : lo;
                for (std::size_t j = c0; j <= hi; ++j) {
                    double s = beta * (v0 * h(k, j) + v1 * h(k + 1, j) + v2 * h(k + 2, j));
                    h(k, j) -= v0 * s;
                    h(k + 1, j) -= v1 * s;
                    h(k + 2, j) -= v2 * s;
                }
                const std::size_t rend = std::min(k + 3, hi);
                for (std::size_t i = lo; i <= rend; ++i) {
                    double s = beta * (h(i, k) * v0 + h(i, k + 1) * v1 + h(i, k + 2) * v2);
                    h(i, k) -= v0 * s;
                    h(i, k + 1) -= v1 * s;
                    h(i, k + 2) -= v2 * s;
                }
            }
        }
        x = h(k + 1, k);
        y = h(k + 2, k);
        z = (k + 3 <= hi) ? h(k + 3, k) : 0.0;
    }

    // final 2-element reflector restores Hessenberg form in the last column
    {
        const std::size_t k = hi - 1;
        const double nrm = std::sqrt(x * x + y * y);
        if (nrm != 0.0) {
            const double alpha = (x >= 0.0) ? -nrm : nrm;
            const double v0 = x - alpha, v1 = y;
            const double vv = v0 * v0 + v1 * v1;
            if (vv != 0.0) {
                const double beta = 2.0 / vv;
                for (std::size_t j = k - 1; j <= hi; ++j) {
                    double s = beta * (v0 * h(k, j) + v1 * h(k + 1, j));
                    h(k, j) -= v0 * s;
                    h(k + 1, j) -= v1 * s;
                }
                for (std::size_t i = lo; i <= hi; ++i) {
                    double s = beta * (h(i, k) * v0 + h(i, k + 1) * v1);
                    h(i, k) -= v0 * s;
                    h(i, k + 1) -= v1 * s;
                }
            }
        }
    }
}

} // namespace

std::vector<std::complex<double>> eigenvalues(Matrix a) {
    if (!a.square()) throw std::invalid_argument("eigenvalues: matrix must be square");
    const std::size_t n = a.rows();
    std::vector<std::complex<double>> out;
    out.reserve(n);
    if (n == 0) return out;
    if (n == 1) {
        out.emplace_back(a(0, 0), 0.0);
        return out;
    }
    if (n == 2) {
        auto [l1, l2] = eig2(a(0, 0), a(0, 1), a(1, 0), a(1, 1));
        out.push_back(l1);
        out.push_back(l2);
        return out;
    }

    hessenberg_reduce(a);
    const double whole = inf_norm(a);
    const double eps = std::numeric_limits<double>::epsilon();

    std::size_t hi = n - 1;
    int iters_on_block = 0;
    long total_iters = 0;
    const long max_total = 64 * static_cast<long>(n);

    while (true) {
        // locate the unreduced block [lo..hi]
        std::size_t lo = hi;
        while (lo > 0) {
            const double sub = std::abs(a(lo, lo - 1));
            double tst = std::abs(a(lo - 1, lo - 1)) + std::abs(a(lo, lo));
            if (tst == 0.0) tst = whole;
            if (sub <= eps * tst) {
                a(lo, lo - 1) = 0.0;
                break;
            }
            --lo;
        }

        if (lo == hi) {
            out.emplace_back(a(hi, hi), 0.0);
            iters_on_block = 0;
            if (hi == 0) break;
            --hi;
            continue;
        }
        if (lo + 1 == hi) {
            auto [l1, l2] = eig2(a(lo, lo), a(lo, hi), a(hi, lo), a(hi, hi));
            out.push_back(l1);
            out.push_back(l2);
            iters_on_block = 0;
            if (lo == 0) break;
            hi = lo - 1;
            continue;
        }

        ++iters_on_block;
        if (++total_iters > max_total)
            throw std::runtime_error("eigenvalues: QR iteration did not converge");

        double shift_sum, shift_prod;
        if (iters_on_block % 11 == 10) {
            // exceptional shift to break rare cycling
            const double sd = std::abs(a(hi, hi - 1)) + std::abs(a(hi - 1, hi - 2));
            const double s1 = a(hi, hi) + 0.75 * sd;
            shift_sum = 2.0 * s1;
            shift_prod = s1 * s1;
        } else {
            shift_sum = a(hi - 1, hi - 1) + a(hi, hi);
            shift_prod = a(hi - 1, hi - 1) * a(hi, hi) - a(hi - 1, hi) * a(hi, hi - 1);
        }
        francis_step(a, lo, hi, shift_sum, shift_prod);
    }

    return out;
}

double spectral_radius(const Matrix& a) {
    double m = 0.0;
    for (const auto& l : eigenvalues(a)) m = std::max(m, std::abs(l));
    return m;
}

Vec solve_linear(Matrix a, Vec b) {
    if (!a.square()) throw std::invalid_argument("solve_linear: matrix must be square");
    const std::size_t n = a.rows();
    if (b.size() != n) throw std::invalid_argument("solve_linear: rhs size mismatch");
    if (n == 0) return {};

    const double tol = 1e-12 * max_abs_entry(a);

    std::vector<std::size_t> perm(n);
    for (std::size_t i = 0; i < n; ++i) perm[i] = i;

    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        for (std::size_t r = col + 1; r < n; ++r)
            if (std::abs(a(perm[r], col)) > std::abs(a(perm[piv], col))) piv = r;
        std::swap(perm[col], perm[piv]);
        const double p = a(perm[col], col);
        if (!(std::abs(p) > tol))
            throw std::runtime_error("solve_linear: matrix is singular or ill-conditioned");
        for (std::size_t r = col + 1; r < n; ++r) {
            const double f = a(perm[r], col) / p;
            if (f == 0.0) continue;
            a(perm[r], col) = 0.0;
            for (std::size_t j = col + 1; j < n; ++j) a(perm[r], j) -= f * a(perm[col], j);
            b[perm[r]] -= f * b[perm[col]];
        }
    }

    Vec x(n, 0.0);
    for (std::size_t i = n; i-- > 0;) {
        double s = b[perm[i]];
        for (std::size_t j = i + 1; j < n; ++j) s -= a(perm[i], j) * x[j];
        x[i] = s / a(perm[i], i);
    }
    return x;
}

Matrix inverse(const Matrix& a) {
    if (!a.square()) throw std::invalid_argument("inverse: matrix must be square");
    const std::size_t n = a.rows();
    Matrix work = a;
    Matrix inv = Matrix::identity(n);
    const double tol = 1e-12 * max_abs_entry(a);

    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        for (std::size_t r = col + 1; r < n; ++r)
            if (std::abs(work(r, col)) > std::abs(work(piv, col))) piv = r;
        if (piv != col) {
            for (std::size_t j = 0; j < n; ++j) {
                std::swap(work(col, j), work(piv, j));
                std::swap(inv(col, j), inv(piv, j));
            }
        }
        const double p = work(col, col);
        if (!(std::abs(p) > tol))
            throw std::runtime_error("inverse: matrix is singular or ill-conditioned");
        const double inv_p = 1.0 / p;
        for (std::size_t j = 0; j < n; ++j) {
            work(col, j) *= inv_p;
            inv(col, j) *= inv_p;
        }
        for (std::size_t r = 0; r < n; ++r) {
            if (r == col) continue;
            const double f = work(r, col);
            if (f == 0.0) continue;
            for (std::size_t j = 0; j < n; ++j) {
                work(r, j) -= f * work(col, j);
                inv(r, j) -= f * inv(col, j);
            }
        }
    }
    return inv;
}

} // namespace cosim
