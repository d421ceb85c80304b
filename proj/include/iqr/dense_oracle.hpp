#pragma once

// Small dense reference implementations, deliberately independent of the
// sparse path: Gaussian elimination with partial pivoting instead of LDL^T,
// dense row-major storage instead of CSR.  The iteration tests cross-check
// the production engine against these on systems of dimension <= 64.

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "errors.hpp"

namespace iqr {

/// Row-major dense matrix, square.
struct DenseMatrix {
    std::size_t n = 0;
    std::vector<double> a; // n*n

    DenseMatrix() = default;
    explicit DenseMatrix(std::size_t dim) : n(dim), a(dim * dim, 0.0) {}

    double& operator()(std::size_t i, std::size_t j) { return a[i * n + j]; }
    double operator()(std::size_t i, std::size_t j) const { return a[i * n + j]; }
};

/// Solve A x = b by Gaussian elimination with partial pivoting.
inline std::vector<double> gauss_solve(DenseMatrix a, std::vector<double> b) {
    const std::size_t n = a.n;
    if (b.size() != n) throw DimensionMismatch("gauss_solve: rhs size mismatch");
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t piv = k;
        for (std::size_t i = k + 1; i < n; ++i)
            if (std::abs(a(i, k)) > std::abs(a(piv, k))) piv = i;
        if (a(piv, k) == 0.0) throw SingularMatrix("gauss_solve: zero pivot column");
        if (piv != k) {
            for (std::size_t j = k; j < n; ++j) std::swap(a(k, j), a(piv, j));
            std::swap(b[k], b[piv]);
        }
        for (std::size_t i = k + 1; i < n; ++i) {
            const double f = a(i, k) / a(k, k);
            if (f == 0.0) continue;
            for (std::size_t j = k + 1; j < n; ++j) a(i, j) -= f * a(k, j);
            b[i] -= f * b[k];
        }
    }
    std::vector<double> x(n);
    for (std::size_t k = n; k-- > 0;) {
        double s = b[k];
        for (std::size_t j = k + 1; j < n; ++j) s -= a(k, j) * x[j];
        x[k] = s / a(k, k);
    }
    return x;
}

/// Dense mirror of a regularized system: Gram matrix S, penalty matrix B,
/// parameter eps.  Symmetry must be exact; dimension capped at 64 -- this
/// type exists to check the sparse engine, not to compute.
struct DenseSystem {
    std::size_t n = 0;
    DenseMatrix s, b;
    double eps = 1.0;

    DenseSystem(DenseMatrix s_in, DenseMatrix b_in, double eps_in)
        : n(s_in.n), s(std::move(s_in)), b(std::move(b_in)), eps(eps_in) {
        if (n > 64) throw InvalidArgument("DenseSystem: dimension capped at 64");
        if (s.n != b.n) throw DimensionMismatch("DenseSystem: S/B size mismatch");
        if (!(eps > 0.0)) throw InvalidArgument("DenseSystem: eps must be positive");
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < i; ++j)
                if (s(i, j) != s(j, i) || b(i, j) != b(j, i))
                    throw InvariantViolation("DenseSystem: matrices not exactly symmetric");
    }

    DenseMatrix k() const {
        DenseMatrix m(n);
        for (std::size_t i = 0; i < n * n; ++i) m.a[i] = s.a[i] + eps * b.a[i];
        return m;
    }
};

inline std::vector<double> dense_matvec(const DenseMatrix& m, std::span<const double> x) {
    if (x.size() != m.n) throw DimensionMismatch("dense_matvec: size mismatch");
    std::vector<double> y(m.n, 0.0);
    for (std::size_t i = 0; i < m.n; ++i)
        for (std::size_t j = 0; j < m.n; ++j) y[i] += m(i, j) * x[j];
    return y;
}

/// One regularized solve (S + eps B) x = l by elimination.
inline std::vector<double> dense_qr_solve(const DenseSystem& sys, std::vector<double> ell) {
    return gauss_solve(sys.k(), std::move(ell));
}

/// Evaluate the alternating Taylor-style combination
///   sum_{m=0}^{M} (-1)^m eps^m / m! * derivs[m].
inline std::vector<double> taylor_sum(std::span<const std::vector<double>> derivs, double eps,
                                      std::size_t m_max) {
    if (derivs.empty() || m_max >= derivs.size())
        throw InvalidArgument("taylor_sum: need derivatives up to order M");
    const std::size_t n = derivs[0].size();
    std::vector<double> acc(n, 0.0);
    double coef = 1.0; // (-1)^m eps^m / m!
    for (std::size_t m = 0; m <= m_max; ++m) {
        if (derivs[m].size() != n) throw DimensionMismatch("taylor_sum: ragged derivatives");
        for (std::size_t i = 0; i < n; ++i) acc[i] += coef * derivs[m][i];
        coef *= -eps / static_cast<double>(m + 1);
    }
    return acc;
}

/// M-th iterate in closed form for an admissible load l = S x*:
///   X^M = x* - (K^{-1} eps B)^{M+1} x*,  K = S + eps B.
/// Computed by repeated dense solves; independent of the engine recursion.
inline std::vector<double> geometric_error_form(const DenseSystem& sys,
                                                std::span<const double> x_star,
                                                std::size_t m_iter) {
    if (x_star.size() != sys.n) throw DimensionMismatch("geometric_error_form: size mismatch");
    const DenseMatrix k = sys.k();
    std::vector<double> v(x_star.begin(), x_star.end());
    for (std::size_t r = 0; r <= m_iter; ++r) {
        std::vector<double> bv = dense_matvec(sys.b, v);
        for (double& t : bv) t *= sys.eps;
        v = gauss_solve(k, std::move(bv));
    }
    std::vector<double> x(sys.n);
    for (std::size_t i = 0; i < sys.n; ++i) x[i] = x_star[i] - v[i];
    return x;
}

} // namespace iqr
