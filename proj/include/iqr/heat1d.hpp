#pragma once

// Space-time FEM for the sideways heat problem on Q = (0,T) x (a,b): both
// Dirichlet and Neumann data are prescribed on the lateral boundary x = a,
// nothing anywhere else.  The first-order mixed form looks for u (temperature)
// and p (heat flux, p = du/dx); the forward map takes (u, p) to
//
//   ( du/dt - dp/dx,  du/dx - p,  u(.,a),  p(.,a) )
//
// measured in L2(Q)^2 x L2(0,T)^2, and the data y is (0, 0, g_D, g_N).  The
// Gram matrix of that map is S; the penalty B uses the H1-type seminorm
//   |(u,p)|_b^2 = int_Q (du/dt)^2 + (du/dx)^2 + p^2.
//
// Discretization: u bilinear Q1 on a uniform nt x nx space-time grid, p
// piecewise constant in t and P1 in x.  All cell integrals use 2x2 Gauss
// (exact here); lateral-boundary integrals use 2-point Gauss per time slab.

#include <cmath>
#include <cstddef>
#include <functional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "engine.hpp"
#include "errors.hpp"
#include "sparse.hpp"
#include "text.hpp"

namespace iqr {

struct SpaceTimeGrid {
    std::size_t nt; ///< time slabs
    std::size_t nx; ///< space cells
    double t_final;
    double a;
    double b;

    SpaceTimeGrid(std::size_t nt_in, std::size_t nx_in, double t_in, double a_in, double b_in)
        : nt(nt_in), nx(nx_in), t_final(t_in), a(a_in), b(b_in) {
        if (nt < 1 || nx < 1) throw InvalidArgument("SpaceTimeGrid: need nt, nx >= 1");
        if (!(t_final > 0.0)) throw InvalidArgument("SpaceTimeGrid: T must be positive");
        if (!(a < b)) throw InvalidArgument("SpaceTimeGrid: need a < b");
    }

    double dt() const { return t_final / static_cast<double>(nt); }
    double h() const { return (b - a) / static_cast<double>(nx); }
    double t_node(std::size_t it) const { return t_final * static_cast<double>(it) / static_cast<double>(nt); }
    double x_node(std::size_t ix) const {
        return a + (b - a) * static_cast<double>(ix) / static_cast<double>(nx);
    }

    std::size_t n_u() const { return (nt + 1) * (nx + 1); }
    std::size_t n_p() const { return nt * (nx + 1); }
    std::size_t n_dofs() const { return n_u() + n_p(); }

    std::size_t iu(std::size_t it, std::size_t ix) const { return it * (nx + 1) + ix; }
    std::size_t ip(std::size_t it, std::size_t ix) const { return n_u() + it * (nx + 1) + ix; }
};

/// Lateral Cauchy data sampled at the nt+1 time nodes; both signals are
/// treated as piecewise linear in time.
struct LateralData {
    std::vector<double> gd;
    std::vector<double> gn;
};

/// Gram matrices of the forward map (S) and penalty seminorm (B).
inline AssembledForms assemble_heat(const SpaceTimeGrid& g) {
    const double dt = g.dt(), h = g.h();
    TripletList ts(g.n_dofs()), tb(g.n_dofs());

    // 2-point Gauss on [0,1]
    static constexpr double gp[2] = {0.21132486540518711775, 0.78867513459481288225};
    static constexpr double gw[2] = {0.5, 0.5};

    for (std::size_t it = 0; it < g.nt; ++it)
        for (std::size_t ix = 0; ix < g.nx; ++ix) {
            const std::size_t dof[6] = {g.iu(it, ix),     g.iu(it, ix + 1), g.iu(it + 1, ix),
                                        g.iu(it + 1, ix + 1), g.ip(it, ix), g.ip(it, ix + 1)};
            double se[6][6] = {};
            double be[6][6] = {};
            for (int qt = 0; qt < 2; ++qt)
                for (int qx = 0; qx < 2; ++qx) {
                    const double tau = gp[qt], xi = gp[qx];
                    const double w = gw[qt] * gw[qx] * dt * h;
                    // u basis: (1-tau)(1-xi), (1-tau)xi, tau(1-xi), tau xi
                    const double ut[6] = {-(1 - xi) / dt, -xi / dt, (1 - xi) / dt, xi / dt, 0, 0};
                    const double ux[6] = {-(1 - tau) / h, (1 - tau) / h, -tau / h, tau / h, 0, 0};
                    const double pv[6] = {0, 0, 0, 0, 1 - xi, xi};
                    const double px[6] = {0, 0, 0, 0, -1 / h, 1 / h};
                    double g1[6], g2[6];
                    for (int k = 0; k < 6; ++k) {
                        g1[k] = ut[k] - px[k]; // du/dt - dp/dx
                        g2[k] = ux[k] - pv[k]; // du/dx - p
                    }
                    for (int r = 0; r < 6; ++r)
                        for (int c2 = 0; c2 < 6; ++c2) {
                            se[r][c2] += w * (g1[r] * g1[c2] + g2[r] * g2[c2]);
                            be[r][c2] +=
                                w * (ut[r] * ut[c2] + ux[r] * ux[c2] + pv[r] * pv[c2]);
                        }
                }
            for (int r = 0; r < 6; ++r)
                for (int c2 = r; c2 < 6; ++c2) {
                    if (se[r][c2] != 0.0) ts.add(dof[r], dof[c2], se[r][c2]);
                    if (be[r][c2] != 0.0) tb.add(dof[r], dof[c2], be[r][c2]);
                }
        }

    // lateral boundary x = a: int_0^T u v + p q, per time slab
    for (std::size_t it = 0; it < g.nt; ++it) {
        const std::size_t u0 = g.iu(it, 0), u1 = g.iu(it + 1, 0), p0 = g.ip(it, 0);
        double m[2][2] = {};
        for (int qt = 0; qt < 2; ++qt) {
            const double tau = gp[qt], w = gw[qt] * dt;
            const double n[2] = {1 - tau, tau};
            for (int r = 0; r < 2; ++r)
                for (int c2 = 0; c2 < 2; ++c2) m[r][c2] += w * n[r] * n[c2];
        }
        ts.add(u0, u0, m[0][0]);
        ts.add(u0, u1, m[0][1]);
        ts.add(u1, u1, m[1][1]);
        ts.add(p0, p0, dt);
    }

    return {triplets_to_sym(ts), triplets_to_sym(tb)};
}

/// Load vector and squared data norm for lateral data (g_D, g_N):
///   l_i = int_0^T g_D phi_i(.,a) + g_N psi_i(.,a) dt,   c = int_0^T g_D^2 + g_N^2 dt.
inline LoadData assemble_heat_load(const SpaceTimeGrid& g, const LateralData& data) {
    if (data.gd.size() != g.nt + 1 || data.gn.size() != g.nt + 1)
        throw DimensionMismatch("assemble_heat_load: data must have nt+1 samples");
    const double dt = g.dt();
    static constexpr double gp[2] = {0.21132486540518711775, 0.78867513459481288225};
    static constexpr double gw[2] = {0.5, 0.5};

    std::vector<double> ell(g.n_dofs(), 0.0);
    double c = 0.0;
    for (std::size_t it = 0; it < g.nt; ++it) {
        for (int qt = 0; qt < 2; ++qt) {
            const double tau = gp[qt], w = gw[qt] * dt;
            const double gd = (1 - tau) * data.gd[it] + tau * data.gd[it + 1];
            const double gn = (1 - tau) * data.gn[it] + tau * data.gn[it + 1];
            ell[g.iu(it, 0)] += w * gd * (1 - tau);
            ell[g.iu(it + 1, 0)] += w * gd * tau;
            ell[g.ip(it, 0)] += w * gn;
            c += w * (gd * gd + gn * gn);
        }
    }
    return LoadData(std::move(ell), c);
}

// --- manufactured solutions --------------------------------------------------

/// Closed-form heat solutions used for synthetic data:
///   u1(t,x) = (x^3/3 + x(1+2t)) / 8          (polynomial)
///   u2(t,x) = exp(-t/4) sin(x/2)             (separated)
/// Both satisfy du/dt = d2u/dx2 identically.
enum class HeatSolution { u1, u2 };

inline double heat_exact(HeatSolution which, double t, double x) {
    return which == HeatSolution::u1 ? (x * x * x / 3.0 + x * (1.0 + 2.0 * t)) / 8.0
                                     : std::exp(-t / 4.0) * std::sin(x / 2.0);
}

inline double heat_exact_dx(HeatSolution which, double t, double x) {
    return which == HeatSolution::u1 ? (x * x + 1.0 + 2.0 * t) / 8.0
                                     : 0.5 * std::exp(-t / 4.0) * std::cos(x / 2.0);
}

/// Exact lateral data (g_D, g_N) = (u, du/dx) at x = a, sampled at time nodes.
inline LateralData manufactured_heat_data(const SpaceTimeGrid& g, HeatSolution which) {
    LateralData d;
    d.gd.resize(g.nt + 1);
    d.gn.resize(g.nt + 1);
    for (std::size_t it = 0; it <= g.nt; ++it) {
        const double t = g.t_node(it);
        d.gd[it] = heat_exact(which, t, g.a);
        d.gn[it] = heat_exact_dx(which, t, g.a);
    }
    return d;
}

/// Exact nodal temperature over the full grid, row-major time-then-space.
inline std::vector<double> manufactured_heat_field(const SpaceTimeGrid& g, HeatSolution which) {
    std::vector<double> u(g.n_u());
    for (std::size_t it = 0; it <= g.nt; ++it)
        for (std::size_t ix = 0; ix <= g.nx; ++ix)
            u[g.iu(it, ix)] = heat_exact(which, g.t_node(it), g.x_node(ix));
    return u;
}

// --- error metrics and field output -------------------------------------------

struct HeatErrorMetrics {
    double rel_linf; ///< max nodal |u_h - u| / max nodal |u|
    double l2;       ///< L2(Q) norm of the bilinear difference, 2x2 Gauss
};

/// coeffs may be the full (u, p) vector or just the u block.
inline HeatErrorMetrics heat_error_metrics(const SpaceTimeGrid& g, std::span<const double> coeffs,
                                           std::span<const double> exact_u) {
    if (exact_u.size() != g.n_u())
        throw DimensionMismatch("heat_error_metrics: exact field size mismatch");
    if (coeffs.size() != g.n_u() && coeffs.size() != g.n_dofs())
        throw DimensionMismatch("heat_error_metrics: coefficient size mismatch");

    double max_err = 0.0, max_exact = 0.0;
    for (std::size_t i = 0; i < g.n_u(); ++i) {
        max_err = std::max(max_err, std::abs(coeffs[i] - exact_u[i]));
        max_exact = std::max(max_exact, std::abs(exact_u[i]));
    }
    if (max_exact == 0.0)
        throw DivisionByZero("heat_error_metrics: exact field is identically zero");

    static constexpr double gp[2] = {0.21132486540518711775, 0.78867513459481288225};
    const double dt = g.dt(), h = g.h();
    double acc = 0.0;
    for (std::size_t it = 0; it < g.nt; ++it)
        for (std::size_t ix = 0; ix < g.nx; ++ix) {
            const std::size_t k00 = g.iu(it, ix), k01 = g.iu(it, ix + 1);
            const std::size_t k10 = g.iu(it + 1, ix), k11 = g.iu(it + 1, ix + 1);
            const double d00 = coeffs[k00] - exact_u[k00], d01 = coeffs[k01] - exact_u[k01];
            const double d10 = coeffs[k10] - exact_u[k10], d11 = coeffs[k11] - exact_u[k11];
            for (int qt = 0; qt < 2; ++qt)
                for (int qx = 0; qx < 2; ++qx) {
                    const double tau = gp[qt], xi = gp[qx];
                    const double v = (1 - tau) * ((1 - xi) * d00 + xi * d01) +
                                     tau * ((1 - xi) * d10 + xi * d11);
                    acc += 0.25 * dt * h * v * v;
                }
        }
    return {max_err / max_exact, std::sqrt(acc)};
}

/// CSV rows "t,x,u_h,u_exact", row-major time-then-space.
inline void write_heat_field_csv(std::ostream& os, const SpaceTimeGrid& g,
                                 std::span<const double> coeffs,
                                 std::span<const double> exact_u) {
    if (exact_u.size() != g.n_u() || (coeffs.size() != g.n_u() && coeffs.size() != g.n_dofs()))
        throw DimensionMismatch("write_heat_field_csv: size mismatch");
    os << "t,x,u_h,u_exact\n";
    for (std::size_t it = 0; it <= g.nt; ++it)
        for (std::size_t ix = 0; ix <= g.nx; ++ix) {
            const std::size_t k = g.iu(it, ix);
            os << fmt_full(g.t_node(it)) << ',' << fmt_full(g.x_node(ix)) << ','
               << fmt_full(coeffs[k]) << ',' << fmt_full(exact_u[k]) << '\n';
        }
}

} // namespace iqr
