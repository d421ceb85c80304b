#pragma once

// The regularized-iteration engine.  A problem reaches this layer reduced to
//
//   S  - Gram matrix of the forward map,            (A x, A x')_Y
//   B  - Gram matrix of the penalty seminorm,        b(x, x')
//   l  - load vector,                                (y, A x_i)_Y
//   c  - squared data norm,                          ||y||_Y^2
//
// so the data y itself never appears.  The M-th iterate solves
//
//   (S + eps B) X^M = l + eps B X^{M-1},   X^{-1} = 0,
//
// which for M = 0 is plain Tikhonov/quasi-reversibility and for M > 0 keeps
// re-anchoring the penalty at the previous iterate.  The squared residual of
// any x is x^T S x - 2 l^T x + c = ||A x - y||_Y^2.

#include <cmath>
#include <cstddef>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "errors.hpp"
#include "ldlt.hpp"
#include "sparse.hpp"
#include "text.hpp"

namespace iqr {

/// Rounding slack for the positive-semidefinite clamps, relative to the
/// natural problem scale.
inline constexpr double tol_psd = 1e-10;

/// Relative slack when asserting the strict monotonicity invariants.
inline constexpr double tol_mono = 1e-12;

/// Discrete problem: S and B are symmetric PSD by construction (upper-
/// triangle storage), eps > 0.  Immutable after construction; changing eps
/// means building a new system (and refactorizing).
struct DiscreteSystem {
    SymSparse s;
    SymSparse b;
    double eps;

    DiscreteSystem(SymSparse s_in, SymSparse b_in, double eps_in)
        : s(std::move(s_in)), b(std::move(b_in)), eps(eps_in) {
        if (s.n != b.n) throw DimensionMismatch("DiscreteSystem: S/B size mismatch");
        if (!(eps > 0.0)) throw InvalidArgument("DiscreteSystem: eps must be positive");
    }

    std::size_t size() const { return s.n; }
};

/// Raw output of a discretization: the two Gram matrices, before a choice
/// of eps turns them into a DiscreteSystem.
struct AssembledForms {
    SymSparse s;
    SymSparse b;
};

/// Load side of the problem.  delta, when present, is the noise amplitude
/// ||y_delta - y||_Y used by the discrepancy stopping rule.
struct LoadData {
    std::vector<double> ell;
    double c = 0.0;
    std::optional<double> delta;

    LoadData() = default;
    LoadData(std::vector<double> ell_in, double c_in,
             std::optional<double> delta_in = std::nullopt)
        : ell(std::move(ell_in)), c(c_in), delta(delta_in) {
        if (c < 0.0) throw InvalidArgument("LoadData: c must be nonnegative");
        if (delta && *delta < 0.0) throw InvalidArgument("LoadData: delta must be nonnegative");
    }
};

/// Factorization of K = S + eps B.  Solves are const and thread-safe.
class SystemFactor {
  public:
    SystemFactor(const DiscreteSystem& sys, Ordering ord = Ordering::Rcm)
        : factor_(add_scaled(sys.s, sys.eps, sys.b), ord) {}

    std::size_t size() const { return factor_.size(); }

    std::vector<double> solve(std::span<const double> rhs) const { return factor_.solve(rhs); }

  private:
    LdltFactor factor_;
};

inline SystemFactor factorize_system(const DiscreteSystem& sys, Ordering ord = Ordering::Rcm) {
    return SystemFactor(sys, ord);
}

/// ||A x - y||_Y via the quadratic form; tiny negatives (within tol_psd
/// relative to c) clamp to zero, anything worse is a broken (l, c) pair.
inline double residual_norm(const DiscreteSystem& sys, const LoadData& load,
                            std::span<const double> x) {
    if (x.size() != sys.size() || load.ell.size() != sys.size())
        throw DimensionMismatch("residual_norm: size mismatch");
    const double q = quad_form(sys.s, x) - 2.0 * dot(load.ell, x) + load.c;
    if (q < -tol_psd * (load.c > 0.0 ? load.c : 1.0))
        throw NegativeResidual("residual_norm: squared residual " + fmt_full(q) +
                               " below the PSD tolerance");
    return std::sqrt(q > 0.0 ? q : 0.0);
}

/// Penalty seminorm |x|_b = sqrt(x^T B x), clamped at zero.
inline double seminorm_b(const DiscreteSystem& sys, std::span<const double> x) {
    const double q = quad_form(sys.b, x);
    return std::sqrt(q > 0.0 ? q : 0.0);
}

/// Graph norm ||x||_{A,b} = sqrt(x^T (S + B) x), clamped at zero.
inline double norm_ab(const DiscreteSystem& sys, std::span<const double> x) {
    const double q = quad_form(sys.s, x) + quad_form(sys.b, x);
    return std::sqrt(q > 0.0 ? q : 0.0);
}

/// Single regularized solve K x = l.
inline std::vector<double> solve_single_qr(const SystemFactor& factor, const LoadData& load) {
    if (load.ell.size() != factor.size())
        throw DimensionMismatch("solve_single_qr: load size mismatch");
    return factor.solve(load.ell);
}

/// One step of the iteration: x_next solves K x = l + eps B x_prev.
inline std::vector<double> iterate_step(const SystemFactor& factor, const DiscreteSystem& sys,
                                        const LoadData& load, std::span<const double> x_prev) {
    if (x_prev.size() != sys.size() || load.ell.size() != sys.size())
        throw DimensionMismatch("iterate_step: size mismatch");
    std::vector<double> rhs = matvec(sys.b, x_prev);
    for (std::size_t i = 0; i < rhs.size(); ++i) rhs[i] = load.ell[i] + sys.eps * rhs[i];
    return factor.solve(rhs);
}

/// eps-derivatives of the regularized solution:
///   x^(0) = K^{-1} l,   K x^(m+1) = -(m+1) B x^(m).
/// Returns orders 0..m_max inclusive.
inline std::vector<std::vector<double>> derivative_sequence(const SystemFactor& factor,
                                                            const DiscreteSystem& sys,
                                                            const LoadData& load,
                                                            std::size_t m_max) {
    std::vector<std::vector<double>> out;
    out.reserve(m_max + 1);
    out.push_back(solve_single_qr(factor, load));
    for (std::size_t m = 0; m < m_max; ++m) {
        std::vector<double> rhs = matvec(sys.b, out.back());
        const double scale = -static_cast<double>(m + 1);
        for (double& v : rhs) v *= scale;
        out.push_back(factor.solve(rhs));
    }
    return out;
}

// --- stopping rules ---------------------------------------------------------

/// Discrepancy principle: stop at the first M with residual <= r * delta.
/// delta may live here or in LoadData; r = 1 reproduces the experiments,
/// r > 1 is what the convergence theory assumes.
struct Morozov {
    double r = 1.01;
    std::optional<double> delta;
    std::size_t max_iter = 10000;
};

/// Run exactly up to iterate index M (M = 0 returns the single solve).
struct FixedIterations {
    std::size_t final_m = 0;
};

/// Stop once the residual falls below an absolute tolerance.
struct ResidualFloor {
    double tol;
    std::size_t max_iter = 10000;
};

using StoppingRule = std::variant<Morozov, FixedIterations, ResidualFloor>;

enum class StopReason {
    MorozovReached,
    FloorReached,
    Fixed,
    MaxIterations,
};

[[nodiscard]] constexpr const char* to_string(StopReason r) {
    switch (r) {
        case StopReason::MorozovReached: return "morozov_reached";
        case StopReason::FloorReached: return "floor_reached";
        case StopReason::Fixed: return "fixed";
        case StopReason::MaxIterations: return "max_iterations";
    }
    return "unknown";
}

/// Per-iterate diagnostics.  residual strictly decreases and b_seminorm
/// strictly increases along a run (up to tol_mono); the tests assert it.
struct IterationTrace {
    struct Row {
        std::size_t m;
        double residual;
        double b_seminorm;
        double ab_norm;
    };
    std::vector<Row> rows;
    StopReason stop_reason = StopReason::Fixed;

    /// CSV with a fixed header; numbers carry 17 significant digits.
    void write_csv(std::ostream& os) const {
        os << "iteration,residual,b_seminorm,ab_norm\n";
        for (const Row& r : rows)
            os << r.m << ',' << fmt_full(r.residual) << ',' << fmt_full(r.b_seminorm) << ','
               << fmt_full(r.ab_norm) << '\n';
    }
};

struct RunResult {
    std::vector<double> x;
    IterationTrace trace;
};

/// Drive the iteration under a stopping rule.  Hitting the iteration cap is
/// reported through stop_reason = MaxIterations, not thrown; the caller
/// decides how severe that is.
inline RunResult run_iterated(const SystemFactor& factor, const DiscreteSystem& sys,
                              const LoadData& load, const StoppingRule& rule) {
    double threshold = -1.0; // negative: no residual-based stop
    std::size_t limit;       // number of iterates to compute at most
    bool fixed = false;
    if (const auto* mz = std::get_if<Morozov>(&rule)) {
        std::optional<double> delta = mz->delta ? mz->delta : load.delta;
        if (!delta)
            throw InvalidArgument("run_iterated: Morozov rule needs delta in the rule or load");
        if (!(mz->r > 0.0)) throw InvalidArgument("run_iterated: Morozov r must be positive");
        if (mz->max_iter < 1) throw InvalidArgument("run_iterated: max_iter must be >= 1");
        threshold = mz->r * *delta;
        limit = mz->max_iter;
    } else if (const auto* fx = std::get_if<FixedIterations>(&rule)) {
        limit = fx->final_m + 1;
        fixed = true;
    } else {
        const auto& fl = std::get<ResidualFloor>(rule);
        if (!(fl.tol > 0.0)) throw InvalidArgument("run_iterated: floor tol must be positive");
        if (fl.max_iter < 1) throw InvalidArgument("run_iterated: max_iter must be >= 1");
        threshold = fl.tol;
        limit = fl.max_iter;
    }

    RunResult res;
    res.trace.stop_reason = StopReason::MaxIterations;
    std::vector<double> x(sys.size(), 0.0);
    for (std::size_t m = 0; m < limit; ++m) {
        x = iterate_step(factor, sys, load, x);
        const double rn = residual_norm(sys, load, x);
        res.trace.rows.push_back({m, rn, seminorm_b(sys, x), norm_ab(sys, x)});
        if (threshold >= 0.0 && rn <= threshold) {
            res.trace.stop_reason = std::holds_alternative<Morozov>(rule)
                                        ? StopReason::MorozovReached
                                        : StopReason::FloorReached;
            break;
        }
    }
    if (fixed) res.trace.stop_reason = StopReason::Fixed;
    res.x = std::move(x);
    return res;
}

// --- eps sweep ---------------------------------------------------------------

/// One row per eps: the single-solve residual, plus the graph-norm error
/// against a supplied admissible truth.  Both columns are strictly
/// increasing in eps (the tests assert it).
struct SweepRow {
    double eps;
    double residual;
    std::optional<double> error_ab;
};

inline std::vector<SweepRow> epsilon_sweep(const SymSparse& s, const SymSparse& b,
                                           std::span<const double> eps_grid, const LoadData& load,
                                           const std::vector<double>* x_truth = nullptr,
                                           Ordering ord = Ordering::Rcm) {
    if (eps_grid.empty()) throw InvalidArgument("epsilon_sweep: empty grid");
    for (std::size_t i = 0; i < eps_grid.size(); ++i) {
        if (!(eps_grid[i] > 0.0)) throw InvalidArgument("epsilon_sweep: eps must be positive");
        if (i > 0 && !(eps_grid[i] > eps_grid[i - 1]))
            throw InvalidArgument("epsilon_sweep: grid must be strictly increasing");
    }
    std::vector<SweepRow> rows;
    rows.reserve(eps_grid.size());
    for (const double eps : eps_grid) {
        DiscreteSystem sys(s, b, eps);
        SystemFactor factor(sys, ord);
        const std::vector<double> x = solve_single_qr(factor, load);
        SweepRow row{eps, residual_norm(sys, load, x), std::nullopt};
        if (x_truth) {
            if (x_truth->size() != sys.size())
                throw DimensionMismatch("epsilon_sweep: truth size mismatch");
            std::vector<double> d(x.size());
            for (std::size_t i = 0; i < x.size(); ++i) d[i] = x[i] - (*x_truth)[i];
            row.error_ab = norm_ab(sys, d);
        }
        rows.push_back(row);
    }
    return rows;
}

} // namespace iqr
