#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "oblique/errors.hpp"

namespace oblique::linalg {

/// Row-major dense matrix of finite reals.
class DenseMatrix {
public:
    DenseMatrix() = default;

    DenseMatrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_{rows}, cols_{cols}, data_(rows * cols, fill)
    {
    }

    DenseMatrix(std::size_t rows, std::size_t cols, std::vector<double> data)
        : rows_{rows}, cols_{cols}, data_{std::move(data)}
    {
        if (data_.size() != rows_ * cols_) {
            throw std::invalid_argument("DenseMatrix: data size does not match shape");
        }
        for (double v : data_) {
            if (!std::isfinite(v)) {
                throw std::invalid_argument("DenseMatrix: non-finite entry");
            }
        }
    }

    DenseMatrix(std::initializer_list<std::initializer_list<double>> rows)
        : rows_{rows.size()}, cols_{rows.size() ? rows.begin()->size() : 0}
    {
        data_.reserve(rows_ * cols_);
        for (const auto& row : rows) {
            if (row.size() != cols_) {
                throw std::invalid_argument("DenseMatrix: ragged initializer");
            }
            for (double v : row) {
                if (!std::isfinite(v)) {
                    throw std::invalid_argument("DenseMatrix: non-finite entry");
                }
                data_.push_back(v);
            }
        }
    }

    static DenseMatrix identity(std::size_t n)
    {
        DenseMatrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) {
            m(i, i) = 1.0;
        }
        return m;
    }

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    bool square() const noexcept { return rows_ == cols_; }

    double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    std::span<const double> row(std::size_t i) const { return {data_.data() + i * cols_, cols_}; }
    std::span<double> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }
    std::span<const double> data() const noexcept { return data_; }

    DenseMatrix transpose() const
    {
        DenseMatrix t(cols_, rows_);
        for (std::size_t i = 0; i < rows_; ++i) {
            for (std::size_t j = 0; j < cols_; ++j) {
                t(j, i) = (*this)(i, j);
            }
        }
        return t;
    }

    double frobenius_norm() const
    {
        return std::sqrt(std::inner_product(data_.begin(), data_.end(), data_.begin(), 0.0));
    }

    /// Maximum absolute row sum.
    double inf_norm() const
    {
        double best = 0.0;
        for (std::size_t i = 0; i < rows_; ++i) {
            double s = 0.0;
            for (double v : row(i)) {
                s += std::abs(v);
            }
            best = std::max(best, s);
        }
        return best;
    }

    double max_abs() const
    {
        double best = 0.0;
        for (double v : data_) {
            best = std::max(best, std::abs(v));
        }
        return best;
    }

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

inline DenseMatrix operator*(const DenseMatrix& a, const DenseMatrix& b)
{
    if (a.cols() != b.rows()) {
        throw std::invalid_argument("matrix product: inner dimensions differ");
    }
    DenseMatrix c(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const double aik = a(i, k);
            if (aik == 0.0) {
                continue;
            }
            for (std::size_t j = 0; j < b.cols(); ++j) {
                c(i, j) += aik * b(k, j);
            }
        }
    }
    return c;
}

inline DenseMatrix operator-(const DenseMatrix& a, const DenseMatrix& b)
{
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        throw std::invalid_argument("matrix difference: shapes differ");
    }
    DenseMatrix c(a.rows(), a.cols());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t j = 0; j < a.cols(); ++j) {
            c(i, j) = a(i, j) - b(i, j);
        }
    }
    return c;
}

inline std::vector<double> operator*(const DenseMatrix& a, std::span<const double> x)
{
    if (a.cols() != x.size()) {
        throw std::invalid_argument("matrix-vector product: size mismatch");
    }
    std::vector<double> y(a.rows(), 0.0);
    for (std::size_t i = 0; i < a.rows(); ++i) {
        const auto r = a.row(i);
        y[i] = std::inner_product(r.begin(), r.end(), x.begin(), 0.0);
    }
    return y;
}

inline std::vector<double> operator*(const DenseMatrix& a, const std::vector<double>& x)
{
    return a * std::span<const double>(x);
}

/// Aᵀ x without forming the transpose.
inline std::vector<double> transpose_times(const DenseMatrix& a, std::span<const double> x)
{
    if (a.rows() != x.size()) {
        throw std::invalid_argument("transpose product: size mismatch");
    }
    std::vector<double> y(a.cols(), 0.0);
    for (std::size_t i = 0; i < a.rows(); ++i) {
        const double xi = x[i];
        const auto r = a.row(i);
        for (std::size_t j = 0; j < a.cols(); ++j) {
            y[j] += r[j] * xi;
        }
    }
    return y;
}

struct SymEigen {
    std::vector<double> values; ///< ascending
    DenseMatrix vectors;        ///< column k is the eigenvector of values[k]
};

/// Eigendecomposition of a symmetric matrix by cyclic Jacobi rotations.
///
/// Sweeps stop once the off-diagonal Frobenius norm drops below
/// 1e-13 * ||A||_F, or after 100 sweeps.
inline SymEigen sym_eigen(const DenseMatrix& input)
{
    if (!input.square()) {
        throw std::invalid_argument("sym_eigen: matrix is not square");
    }
    const std::size_t n = input.rows();
    const double scale = std::max(input.max_abs(), 1e-300);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            if (std::abs(input(i, j) - input(j, i)) > 1e-10 * scale) {
                throw std::invalid_argument("sym_eigen: matrix is not symmetric (entry (" +
                                            std::to_string(i + 1) + "," + std::to_string(j + 1) + "))");
            }
        }
    }

    DenseMatrix a = input;
    DenseMatrix v = DenseMatrix::identity(n);
    const double threshold = 1e-13 * input.frobenius_norm();

    auto off_norm = [&] {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = i + 1; j < n; ++j) {
                s += 2.0 * a(i, j) * a(i, j);
            }
        }
        return std::sqrt(s);
    };

    for (int sweep = 0; sweep < 100 && off_norm() > threshold; ++sweep) {
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = a(p, q);
                if (apq == 0.0) {
                    continue;
                }
                const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
                const double t = std::copysign(1.0, theta) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                const double tau = s / (1.0 + c);

                a(p, p) -= t * apq;
                a(q, q) += t * apq;
                a(p, q) = 0.0;
                a(q, p) = 0.0;
                for (std::size_t k = 0; k < n; ++k) {
                    if (k == p || k == q) {
                        continue;
                    }
                    const double akp = a(k, p);
                    const double akq = a(k, q);
                    a(k, p) = akp - s * (akq + tau * akp);
                    a(p, k) = a(k, p);
                    a(k, q) = akq + s * (akp - tau * akq);
                    a(q, k) = a(k, q);
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double vkp = v(k, p);
                    const double vkq = v(k, q);
                    v(k, p) = vkp - s * (vkq + tau * vkp);
                    v(k, q) = vkq + s * (vkp - tau * vkq);
                }
            }
        }
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t i, std::size_t j) { return a(i, i) < a(j, j); });

    SymEigen out{std::vector<double>(n), DenseMatrix(n, n)};
    for (std::size_t k = 0; k < n; ++k) {
        out.values[k] = a(order[k], order[k]);
        for (std::size_t i = 0; i < n; ++i) {
            out.vectors(i, k) = v(i, order[k]);
        }
    }
    return out;
}

/// LU factorization with partial pivoting, reusable for several right-hand sides.
class LuFactorization {
public:
    explicit LuFactorization(DenseMatrix a) : lu_{std::move(a)}, perm_(lu_.rows())
    {
        if (!lu_.square()) {
            throw std::invalid_argument("solve_dense: matrix is not square");
        }
        const std::size_t n = lu_.rows();
        const double tol = 1e-14 * lu_.inf_norm();
        std::iota(perm_.begin(), perm_.end(), std::size_t{0});
        for (std::size_t k = 0; k < n; ++k) {
            std::size_t piv = k;
            for (std::size_t i = k + 1; i < n; ++i) {
                if (std::abs(lu_(i, k)) > std::abs(lu_(piv, k))) {
                    piv = i;
                }
            }
            if (!(std::abs(lu_(piv, k)) > tol)) {
                throw SingularMatrixError("solve_dense: matrix is numerically singular (pivot " +
                                          std::to_string(k + 1) + ")");
            }
            if (piv != k) {
                std::swap_ranges(lu_.row(k).begin(), lu_.row(k).end(), lu_.row(piv).begin());
                std::swap(perm_[k], perm_[piv]);
            }
            for (std::size_t i = k + 1; i < n; ++i) {
                const double f = lu_(i, k) / lu_(k, k);
                lu_(i, k) = f;
                for (std::size_t j = k + 1; j < n; ++j) {
                    lu_(i, j) -= f * lu_(k, j);
                }
            }
        }
    }

    std::size_t size() const noexcept { return lu_.rows(); }

    std::vector<double> solve(std::span<const double> b) const
    {
        const std::size_t n = lu_.rows();
        if (b.size() != n) {
            throw std::invalid_argument("solve_dense: right-hand side has wrong length");
        }
        std::vector<double> x(n);
        for (std::size_t i = 0; i < n; ++i) {
            double s = b[perm_[i]];
            for (std::size_t j = 0; j < i; ++j) {
                s -= lu_(i, j) * x[j];
            }
            x[i] = s;
        }
        for (std::size_t i = n; i-- > 0;) {
            double s = x[i];
            for (std::size_t j = i + 1; j < n; ++j) {
                s -= lu_(i, j) * x[j];
            }
            x[i] = s / lu_(i, i);
        }
        return x;
    }

    DenseMatrix solve(const DenseMatrix& b) const
    {
        if (b.rows() != lu_.rows()) {
            throw std::invalid_argument("solve_dense: right-hand side has wrong row count");
        }
        DenseMatrix x(b.rows(), b.cols());
        std::vector<double> column(b.rows());
        for (std::size_t j = 0; j < b.cols(); ++j) {
            for (std::size_t i = 0; i < b.rows(); ++i) {
                column[i] = b(i, j);
            }
            const auto sol = solve(column);
            for (std::size_t i = 0; i < b.rows(); ++i) {
                x(i, j) = sol[i];
            }
        }
        return x;
    }

private:
    DenseMatrix lu_;
    std::vector<std::size_t> perm_;
};

inline DenseMatrix solve_dense(const DenseMatrix& a, const DenseMatrix& b)
{
    return LuFactorization(a).solve(b);
}

inline std::vector<double> solve_dense(const DenseMatrix& a, std::span<const double> b)
{
    return LuFactorization(a).solve(b);
}

/// Symmetric tridiagonal matrix: diag has n entries, offdiag n-1.
struct SymTriDiag {
    std::vector<double> diag;
    std::vector<double> offdiag;

    SymTriDiag() = default;
    SymTriDiag(std::vector<double> d, std::vector<double> off)
        : diag{std::move(d)}, offdiag{std::move(off)}
    {
        if (!diag.empty() && offdiag.size() + 1 != diag.size()) {
            throw std::invalid_argument("SymTriDiag: offdiag must have n-1 entries");
        }
    }

    std::size_t size() const noexcept { return diag.size(); }

    std::vector<double> operator*(std::span<const double> x) const
    {
        const std::size_t n = diag.size();
        if (x.size() != n) {
            throw std::invalid_argument("SymTriDiag product: size mismatch");
        }
        std::vector<double> y(n);
        for (std::size_t i = 0; i < n; ++i) {
            double s = diag[i] * x[i];
            if (i > 0) {
                s += offdiag[i - 1] * x[i - 1];
            }
            if (i + 1 < n) {
                s += offdiag[i] * x[i + 1];
            }
            y[i] = s;
        }
        return y;
    }

    std::vector<double> operator*(const std::vector<double>& x) const
    {
        return (*this) * std::span<const double>(x);
    }

    DenseMatrix to_dense() const
    {
        const std::size_t n = diag.size();
        DenseMatrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) {
            m(i, i) = diag[i];
            if (i + 1 < n) {
                m(i, i + 1) = offdiag[i];
                m(i + 1, i) = offdiag[i];
            }
        }
        return m;
    }
};

/// a*A + b*B for two tridiagonals of equal size.
inline SymTriDiag combine(double a, const SymTriDiag& x, double b, const SymTriDiag& y)
{
    if (x.size() != y.size()) {
        throw std::invalid_argument("combine: size mismatch");
    }
    SymTriDiag out(std::vector<double>(x.size()), std::vector<double>(x.offdiag.size()));
    for (std::size_t i = 0; i < x.size(); ++i) {
        out.diag[i] = a * x.diag[i] + b * y.diag[i];
    }
    for (std::size_t i = 0; i < x.offdiag.size(); ++i) {
        out.offdiag[i] = a * x.offdiag[i] + b * y.offdiag[i];
    }
    return out;
}

/// Solves T x = b for symmetric positive definite tridiagonal T in O(n),
/// via an LDLᵀ sweep that rejects non-positive pivots.
inline std::vector<double> solve_spd_tridiag(const SymTriDiag& t, std::span<const double> b)
{
    const std::size_t n = t.size();
    if (b.size() != n) {
        throw std::invalid_argument("solve_spd_tridiag: right-hand side has wrong length");
    }
    if (n == 0) {
        return {};
    }
    const double scale = std::max(
        std::abs(*std::max_element(t.diag.begin(), t.diag.end(),
                                   [](double x, double y) { return std::abs(x) < std::abs(y); })),
        1e-300);
    std::vector<double> d(n);
    std::vector<double> l(n, 0.0);
    std::vector<double> z(n);
    d[0] = t.diag[0];
    if (!(d[0] > 1e-14 * scale)) {
        throw NotPositiveDefiniteError("solve_spd_tridiag: non-positive pivot at row 1");
    }
    z[0] = b[0];
    for (std::size_t i = 1; i < n; ++i) {
        l[i] = t.offdiag[i - 1] / d[i - 1];
        d[i] = t.diag[i] - l[i] * t.offdiag[i - 1];
        if (!(d[i] > 1e-14 * scale)) {
            throw NotPositiveDefiniteError("solve_spd_tridiag: non-positive pivot at row " +
                                           std::to_string(i + 1));
        }
        z[i] = b[i] - l[i] * z[i - 1];
    }
    std::vector<double> x(n);
    x[n - 1] = z[n - 1] / d[n - 1];
    for (std::size_t i = n - 1; i-- > 0;) {
        x[i] = z[i] / d[i] - l[i + 1] * x[i + 1];
    }
    return x;
}

inline std::vector<double> solve_spd_tridiag(const SymTriDiag& t, const std::vector<double>& b)
{
    return solve_spd_tridiag(t, std::span<const double>(b));
}

} // namespace oblique::linalg
