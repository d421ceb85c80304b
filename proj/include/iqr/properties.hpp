#pragma once

// Structural properties of the iteration, packaged so both the test suite
// and the demo runner can execute them against arbitrary systems.  Each
// check returns pass/fail plus a short diagnostic; strict inequalities are
// asserted with a small relative slack so that converged tails (increments
// at rounding level) do not produce false alarms.
//
// The checks, for a system (S, B, eps) with load (l, c):
//   series          X^M equals sum_{m<=M} (-1)^m eps^m/m! x^(m)
//   seminorm        |X^{M-1}|_b < |X^M|_b
//   image bound     ||A X^M|| < sqrt(c)
//   residual bound  ||A X^M - y|| < sqrt(c)
//   residual drop   residual strictly decreasing in M
//   growth          |X^M|_b <= sqrt(2(M+1)/eps) sqrt(c)
//   alternation     (-1)^{m+n} b(x^(m), x^(n)) > 0
//   deriv bound     ||x^(m)||_{A,b} <= m!/min(1, eps^{m+1/2}) sqrt(c)
//   argmin          x_eps minimizes ||A x - y||^2 + eps |x|_b^2
//   contraction     exact data: |X^M - x*|_b strictly decreasing and X^M
//                   matches the closed geometric form
//   eps monotone    residual(eps) and ||x_eps - x*||_{A,b} strictly increase

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "dense_oracle.hpp"
#include "engine.hpp"
#include "rng.hpp"
#include "sparse.hpp"

namespace iqr {

struct PropertyResult {
    std::string name;
    bool pass = true;
    std::string detail;
};

struct PropertyConfig {
    std::size_t m_max = 12;      ///< deepest iterate exercised
    std::size_t alt_max = 6;     ///< derivative orders in the alternation check
    double tol_series = 1e-8;    ///< relative tolerance, series vs recursion
    double slack = 1e-12;        ///< relative slack on strict inequalities
    std::vector<double> eps_grid{0.25, 0.5, 1.0, 2.0, 4.0};
};

/// A dense system together with its engine mirror and two loads: a generic
/// consistent one and an admissible one manufactured from x_truth.
struct PropertySystem {
    DenseSystem dense;
    DiscreteSystem system;
    LoadData load;            ///< generic: c > l^T S^{-1} l
    LoadData load_admissible; ///< l = S x_truth, c = x_truth^T S x_truth
    std::vector<double> x_truth;
};

namespace detail {

inline SymSparse dense_to_sparse(const DenseMatrix& d) {
    TripletList t(d.n);
    for (std::size_t i = 0; i < d.n; ++i)
        for (std::size_t j = i; j < d.n; ++j) t.add(i, j, d(i, j));
    return triplets_to_sym(t);
}

inline bool strict_less(double a, double b, double slack, double scale) {
    return a < b + slack * scale;
}

inline double l2(std::span<const double> v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

inline double l2_diff(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
    return std::sqrt(s);
}

inline DenseMatrix random_spd_dense(std::size_t n, SplitMix64& rng, double diag_boost) {
    DenseMatrix g(n);
    for (std::size_t i = 0; i < n * n; ++i) g.a[i] = rng.next_in(-1.0, 1.0);
    DenseMatrix m(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i; j < n; ++j) {
            double s = 0.0;
            for (std::size_t k = 0; k < n; ++k) s += g(k, i) * g(k, j);
            m(i, j) = m(j, i) = s / static_cast<double>(n);
        }
    for (std::size_t i = 0; i < n; ++i) m(i, i) += diag_boost;
    return m;
}

} // namespace detail

/// Random well-scaled SPD pair (S, B) with a generic and an admissible load.
inline PropertySystem make_random_property_system(std::size_t n, double eps, SplitMix64& rng) {
    DenseMatrix s = detail::random_spd_dense(n, rng, 0.4);
    DenseMatrix b = detail::random_spd_dense(n, rng, 0.4);
    DenseSystem dense(s, b, eps);
    DiscreteSystem system(detail::dense_to_sparse(s), detail::dense_to_sparse(b), eps);

    std::vector<double> x_truth(n);
    for (double& v : x_truth) v = rng.next_in(-1.0, 1.0);
    std::vector<double> ell_adm = dense_matvec(s, x_truth);
    double c_adm = 0.0;
    for (std::size_t i = 0; i < n; ++i) c_adm += ell_adm[i] * x_truth[i];
    LoadData load_admissible(ell_adm, c_adm);

    // generic load: same l, c inflated by a strictly positive incompatible part
    LoadData load(ell_adm, c_adm * (1.0 + 0.25 + 0.5 * rng.next_unit()));

    return PropertySystem{std::move(dense), std::move(system), std::move(load),
                          std::move(load_admissible), std::move(x_truth)};
}

/// The unit scalar system S = B = [1], l = [1], c = 1: every quantity has a
/// closed form (iterates 1 - 2^-(M+1), residuals 2^-(M+1) at eps = 1).
inline PropertySystem make_scalar_property_system(double eps = 1.0) {
    DenseMatrix one(1);
    one(0, 0) = 1.0;
    DenseSystem dense(one, one, eps);
    DiscreteSystem system(detail::dense_to_sparse(one), detail::dense_to_sparse(one), eps);
    LoadData load({1.0}, 1.0);
    return PropertySystem{std::move(dense), std::move(system), load, load, {1.0}};
}

/// Run every check; returns one result per property.
inline std::vector<PropertyResult> run_property_suite(const PropertySystem& ps,
                                                      const PropertyConfig& cfg = {}) {
    std::vector<PropertyResult> out;
    const DiscreteSystem& sys = ps.system;
    const double eps = sys.eps;
    const SystemFactor factor = factorize_system(sys);
    const double sqrt_c = std::sqrt(ps.load.c);

    const RunResult run =
        run_iterated(factor, sys, ps.load, FixedIterations{cfg.m_max});
    const auto derivs = derivative_sequence(factor, sys, ps.load, cfg.m_max);

    // series equivalence: rebuild each X^M from the derivative ladder
    {
        PropertyResult r{"series-equivalence", true, ""};
        std::vector<double> x(sys.size(), 0.0);
        for (std::size_t m = 0; m <= cfg.m_max; ++m) {
            x = iterate_step(factor, sys, ps.load, x);
            const std::vector<double> srs = taylor_sum(derivs, eps, m);
            const double rel = detail::l2_diff(x, srs) / std::max(detail::l2(x), 1e-300);
            if (rel > cfg.tol_series) {
                r.pass = false;
                r.detail = "M=" + std::to_string(m) + " rel=" + fmt_full(rel);
                break;
            }
        }
        out.push_back(std::move(r));
    }

    // monotone b-seminorm along the iteration
    {
        PropertyResult r{"b-seminorm-increasing", true, ""};
        for (std::size_t m = 1; m < run.trace.rows.size(); ++m)
            if (!detail::strict_less(run.trace.rows[m - 1].b_seminorm,
                                     run.trace.rows[m].b_seminorm, cfg.slack, sqrt_c)) {
                r.pass = false;
                r.detail = "M=" + std::to_string(m);
                break;
            }
        out.push_back(std::move(r));
    }

    // ||A X^M|| < sqrt(c) and residual < sqrt(c), every M
    {
        PropertyResult ri{"image-norm-bound", true, ""};
        PropertyResult rr{"residual-bound", true, ""};
        std::vector<double> x(sys.size(), 0.0);
        for (std::size_t m = 0; m <= cfg.m_max; ++m) {
            x = iterate_step(factor, sys, ps.load, x);
            const double image = std::sqrt(std::max(0.0, quad_form(sys.s, x)));
            if (!detail::strict_less(image, sqrt_c, cfg.slack, sqrt_c)) {
                ri.pass = false;
                ri.detail = "M=" + std::to_string(m);
            }
            if (!detail::strict_less(residual_norm(sys, ps.load, x), sqrt_c, cfg.slack, sqrt_c)) {
                rr.pass = false;
                rr.detail = "M=" + std::to_string(m);
            }
        }
        out.push_back(std::move(ri));
        out.push_back(std::move(rr));
    }

    // residual strictly decreasing
    {
        PropertyResult r{"residual-decreasing", true, ""};
        for (std::size_t m = 1; m < run.trace.rows.size(); ++m)
            if (!detail::strict_less(run.trace.rows[m].residual, run.trace.rows[m - 1].residual,
                                     cfg.slack, sqrt_c)) {
                r.pass = false;
                r.detail = "M=" + std::to_string(m);
                break;
            }
        out.push_back(std::move(r));
    }

    // growth bound |X^M|_b <= sqrt(2(M+1)/eps) sqrt(c)
    {
        PropertyResult r{"seminorm-growth-bound", true, ""};
        for (std::size_t m = 0; m < run.trace.rows.size(); ++m) {
            const double bound = std::sqrt(2.0 * static_cast<double>(m + 1) / eps) * sqrt_c;
            if (run.trace.rows[m].b_seminorm > bound * (1.0 + cfg.slack)) {
                r.pass = false;
                r.detail = "M=" + std::to_string(m);
                break;
            }
        }
        out.push_back(std::move(r));
    }

    // alternation of the derivative ladder under b
    {
        PropertyResult r{"derivative-alternation", true, ""};
        const std::size_t top = std::min(cfg.alt_max, cfg.m_max);
        for (std::size_t m = 0; m <= top && r.pass; ++m)
            for (std::size_t n2 = 0; n2 <= top; ++n2) {
                std::vector<double> bx = matvec(sys.b, derivs[n2]);
                double bmn = dot(derivs[m], bx);
                if (((m + n2) % 2 == 1 ? -bmn : bmn) <= 0.0) {
                    r.pass = false;
                    r.detail = "m=" + std::to_string(m) + " n=" + std::to_string(n2);
                    break;
                }
            }
        out.push_back(std::move(r));
    }

    // derivative magnitude bound
    {
        PropertyResult r{"derivative-bound", true, ""};
        double mfact = 1.0;
        for (std::size_t m = 0; m <= cfg.m_max; ++m) {
            if (m > 0) mfact *= static_cast<double>(m);
            const double denom = std::min(1.0, std::pow(eps, static_cast<double>(m) + 0.5));
            const double bound = mfact / denom * sqrt_c;
            if (norm_ab(sys, derivs[m]) > bound * (1.0 + cfg.slack)) {
                r.pass = false;
                r.detail = "m=" + std::to_string(m);
                break;
            }
        }
        out.push_back(std::move(r));
    }

    // x_eps minimizes the Tikhonov energy
    {
        PropertyResult r{"tikhonov-argmin", true, ""};
        const std::vector<double> xe = solve_single_qr(factor, ps.load);
        auto energy = [&](std::span<const double> x) {
            const double res = residual_norm(sys, ps.load, x);
            const double sem = seminorm_b(sys, x);
            return res * res + eps * sem * sem;
        };
        const double e0 = energy(xe);
        SplitMix64 rng(99);
        for (int k = 0; k < 8; ++k) {
            std::vector<double> xp = xe;
            for (double& v : xp) v += rng.next_in(-0.3, 0.3);
            if (energy(xp) < e0 * (1.0 - 1e-12)) {
                r.pass = false;
                break;
            }
        }
        out.push_back(std::move(r));
    }

    // exact data: |X^M - x*|_b strictly decreasing; matches the closed form
    {
        PropertyResult r{"exact-data-contraction", true, ""};
        std::vector<double> x(sys.size(), 0.0), d(sys.size());
        double prev = -1.0;
        for (std::size_t m = 0; m <= cfg.m_max && r.pass; ++m) {
            x = iterate_step(factor, sys, ps.load_admissible, x);
            for (std::size_t i = 0; i < d.size(); ++i) d[i] = x[i] - ps.x_truth[i];
            const double err_b = seminorm_b(sys, d);
            if (m > 0 && !detail::strict_less(err_b, prev, cfg.slack,
                                              std::sqrt(ps.load_admissible.c))) {
                r.pass = false;
                r.detail = "error not decreasing at M=" + std::to_string(m);
            }
            prev = err_b;
            const std::vector<double> closed = geometric_error_form(ps.dense, ps.x_truth, m);
            const double rel =
                detail::l2_diff(x, closed) / std::max(detail::l2(ps.x_truth), 1e-300);
            if (rel > cfg.tol_series) {
                r.pass = false;
                r.detail = "closed form mismatch at M=" + std::to_string(m);
            }
        }
        out.push_back(std::move(r));
    }

    // monotonicity in eps: residual always, graph-norm error on admissible data
    {
        PropertyResult r{"eps-monotonicity", true, ""};
        const auto rows =
            epsilon_sweep(sys.s, sys.b, cfg.eps_grid, ps.load_admissible, &ps.x_truth);
        for (std::size_t i = 1; i < rows.size(); ++i) {
            if (!detail::strict_less(rows[i - 1].residual, rows[i].residual, cfg.slack, sqrt_c) ||
                !detail::strict_less(*rows[i - 1].error_ab, *rows[i].error_ab, cfg.slack,
                                     sqrt_c)) {
                r.pass = false;
                r.detail = "grid index " + std::to_string(i);
                break;
            }
        }
        const auto rows_gen = epsilon_sweep(sys.s, sys.b, cfg.eps_grid, ps.load);
        for (std::size_t i = 1; i < rows_gen.size(); ++i)
            if (!detail::strict_less(rows_gen[i - 1].residual, rows_gen[i].residual, cfg.slack,
                                     sqrt_c)) {
                r.pass = false;
                r.detail = "generic load, grid index " + std::to_string(i);
                break;
            }
        out.push_back(std::move(r));
    }

    return out;
}

} // namespace iqr
