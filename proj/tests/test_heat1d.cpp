#include <catch2/catch_amalgamated.hpp>

#include <iqr/heat1d.hpp>
#include <iqr/noise.hpp>
#include <iqr/rng.hpp>

#include <sstream>

using namespace iqr;

namespace {

double entry(const SymSparse& m, std::size_t i, std::size_t j) {
    if (j < i) std::swap(i, j);
    for (std::size_t p = m.row_ptr[i]; p < m.row_ptr[i + 1]; ++p)
        if (m.col_idx[p] == j) return m.values[p];
    return 0.0;
}

} // namespace

TEST_CASE("grid bookkeeping") {
    SpaceTimeGrid g(3, 4, 1.0, 1.0, 2.0);
    CHECK(g.n_u() == 20);
    CHECK(g.n_p() == 15);
    CHECK(g.n_dofs() == 35);
    CHECK(g.dt() == Catch::Approx(1.0 / 3.0));
    CHECK(g.h() == Catch::Approx(0.25));
    CHECK(g.iu(0, 0) == 0);
    CHECK(g.iu(3, 4) == 19);
    CHECK(g.ip(0, 0) == 20);

    CHECK_THROWS_AS(SpaceTimeGrid(0, 1, 1.0, 0.0, 1.0), InvalidArgument);
    CHECK_THROWS_AS(SpaceTimeGrid(1, 1, -1.0, 0.0, 1.0), InvalidArgument);
    CHECK_THROWS_AS(SpaceTimeGrid(1, 1, 1.0, 2.0, 1.0), InvalidArgument);
}

TEST_CASE("single-cell penalty block for the flux dofs is the 1D mass matrix") {
    SpaceTimeGrid g(1, 1, 1.0, 1.0, 2.0); // dt = h = 1
    const AssembledForms forms = assemble_heat(g);
    const std::size_t p0 = g.ip(0, 0), p1 = g.ip(0, 1);
    CHECK(entry(forms.b, p0, p0) == Catch::Approx(1.0 / 3.0).epsilon(1e-13));
    CHECK(entry(forms.b, p0, p1) == Catch::Approx(1.0 / 6.0).epsilon(1e-13));
    CHECK(entry(forms.b, p1, p1) == Catch::Approx(1.0 / 3.0).epsilon(1e-13));
}

TEST_CASE("constant temperature field only sees the boundary term") {
    SpaceTimeGrid g(3, 4, 2.5, 1.0, 2.0);
    const AssembledForms forms = assemble_heat(g);
    std::vector<double> v(g.n_dofs(), 0.0);
    for (std::size_t i = 0; i < g.n_u(); ++i) v[i] = 1.0;
    CHECK(quad_form(forms.s, v) == Catch::Approx(2.5).epsilon(1e-13)); // = T
    CHECK(quad_form(forms.b, v) == Catch::Approx(0.0).margin(1e-13));
}

TEST_CASE("load of unit Dirichlet data sums to T by partition of unity") {
    SpaceTimeGrid g(5, 3, 1.0, 1.0, 2.0);
    LateralData data{std::vector<double>(6, 1.0), std::vector<double>(6, 0.0)};
    const LoadData load = assemble_heat_load(g, data);
    CHECK(load.c == Catch::Approx(1.0).epsilon(1e-13));
    double sum = 0.0;
    for (double v : load.ell) sum += v;
    CHECK(sum == Catch::Approx(1.0).epsilon(1e-13));

    LateralData bad{std::vector<double>(5, 1.0), std::vector<double>(6, 0.0)};
    CHECK_THROWS_AS(assemble_heat_load(g, bad), DimensionMismatch);
}

TEST_CASE("manufactured solutions satisfy the heat equation") {
    const double fd = 1e-4;
    for (HeatSolution which : {HeatSolution::u1, HeatSolution::u2}) {
        for (double t : {0.1, 0.5, 0.9})
            for (double x : {1.1, 1.5, 1.9}) {
                const double ut = (heat_exact(which, t + fd, x) - heat_exact(which, t - fd, x)) /
                                  (2 * fd);
                const double uxx = (heat_exact(which, t, x + fd) - 2 * heat_exact(which, t, x) +
                                    heat_exact(which, t, x - fd)) /
                                   (fd * fd);
                CHECK(std::abs(ut - uxx) < 1e-6);
            }
    }
}

TEST_CASE("lateral data closed forms at a = 1") {
    SpaceTimeGrid g(4, 4, 1.0, 1.0, 2.0);
    const LateralData d1 = manufactured_heat_data(g, HeatSolution::u1);
    for (std::size_t it = 0; it <= 4; ++it) {
        const double t = g.t_node(it);
        CHECK(d1.gd[it] == Catch::Approx(1.0 / 6.0 + t / 4.0).epsilon(1e-14));
        CHECK(d1.gn[it] == Catch::Approx((1.0 + t) / 4.0).epsilon(1e-14));
    }
    const LateralData d2 = manufactured_heat_data(g, HeatSolution::u2);
    for (std::size_t it = 0; it <= 4; ++it) {
        const double t = g.t_node(it);
        CHECK(d2.gd[it] == Catch::Approx(std::exp(-t / 4.0) * std::sin(0.5)).epsilon(1e-14));
        CHECK(d2.gn[it] ==
              Catch::Approx(0.5 * std::exp(-t / 4.0) * std::cos(0.5)).epsilon(1e-14));
    }
}

TEST_CASE("assembled forms are positive semidefinite") {
    SpaceTimeGrid g(6, 7, 1.0, 1.0, 2.0);
    const AssembledForms forms = assemble_heat(g);
    SplitMix64 rng(3);
    for (int rep = 0; rep < 40; ++rep) {
        std::vector<double> v(g.n_dofs());
        double n2 = 0.0;
        for (double& x : v) {
            x = rng.next_in(-1.0, 1.0);
            n2 += x * x;
        }
        CHECK(quad_form(forms.s, v) >= -1e-12 * n2);
        CHECK(quad_form(forms.b, v) >= -1e-12 * n2);
    }
}

TEST_CASE("regularized matrix factors across the eps range") {
    SpaceTimeGrid g(40, 40, 1.0, 1.0, 2.0);
    const AssembledForms forms = assemble_heat(g);
    for (double eps : {0.1, 1.0, 10.0}) {
        DiscreteSystem sys(forms.s, forms.b, eps);
        CHECK_NOTHROW(factorize_system(sys));
    }
}

TEST_CASE("noise amplitude agrees with the load machinery") {
    SpaceTimeGrid g(8, 5, 1.0, 1.0, 2.0);
    const LateralData clean = manufactured_heat_data(g, HeatSolution::u1);
    const NoisySignal nd = corrupt_linf(clean.gd, {0.03, 4});
    const NoisySignal nn = corrupt_linf(clean.gn, {0.02, 9});

    std::vector<double> diff_d(g.nt + 1), diff_n(g.nt + 1);
    for (std::size_t i = 0; i <= g.nt; ++i) {
        diff_d[i] = nd.noisy[i] - nd.clean[i];
        diff_n[i] = nn.noisy[i] - nn.clean[i];
    }
    const std::vector<double> segs(g.nt, g.dt());
    const double delta =
        l2_delta(std::vector<WeightedSignal>{{diff_d, segs}, {diff_n, segs}});

    const LoadData pert = assemble_heat_load(g, LateralData{diff_d, diff_n});
    CHECK(delta == Catch::Approx(std::sqrt(pert.c)).epsilon(1e-10));
}

TEST_CASE("exact-data run: residual decreases, field approaches the truth") {
    // A small regularization weight lets the iteration reach the
    // least-squares limit of the discretization within a short budget;
    // the limiting max-node error at 20x20 is about 5.4e-2.
    SpaceTimeGrid g(20, 20, 1.0, 1.0, 2.0);
    const AssembledForms forms = assemble_heat(g);
    DiscreteSystem sys(forms.s, forms.b, 1e-4);
    SystemFactor factor = factorize_system(sys);
    const LoadData load = assemble_heat_load(g, manufactured_heat_data(g, HeatSolution::u1));

    const RunResult run = run_iterated(factor, sys, load, FixedIterations{120});
    const double sqrt_c = std::sqrt(load.c);
    for (std::size_t m = 1; m < run.trace.rows.size(); ++m)
        CHECK(run.trace.rows[m].residual <
              run.trace.rows[m - 1].residual + 1e-9 * sqrt_c);

    const std::vector<double> exact = manufactured_heat_field(g, HeatSolution::u1);
    const HeatErrorMetrics err = heat_error_metrics(g, run.x, exact);
    CHECK(err.rel_linf < 0.06);
}

TEST_CASE("noisy run: discrepancy rule triggers") {
    // At 20x20 the discrete least-squares floor is about 1.3e-2 for 10%
    // noise, while delta is about 2.7e-2, so the rule has clear headroom.
    SpaceTimeGrid g(20, 20, 1.0, 1.0, 2.0);
    const AssembledForms forms = assemble_heat(g);
    DiscreteSystem sys(forms.s, forms.b, 1.0);
    SystemFactor factor = factorize_system(sys);

    const LateralData clean = manufactured_heat_data(g, HeatSolution::u1);
    const NoisySignal nd = corrupt_linf(clean.gd, {0.10, 11});
    const NoisySignal nn = corrupt_linf(clean.gn, {0.10, 12});
    std::vector<double> diff_d(g.nt + 1), diff_n(g.nt + 1);
    for (std::size_t i = 0; i <= g.nt; ++i) {
        diff_d[i] = nd.noisy[i] - nd.clean[i];
        diff_n[i] = nn.noisy[i] - nn.clean[i];
    }
    const std::vector<double> segs(g.nt, g.dt());
    const double delta = l2_delta(std::vector<WeightedSignal>{{diff_d, segs}, {diff_n, segs}});

    LoadData load = assemble_heat_load(g, LateralData{nd.noisy, nn.noisy});
    load.delta = delta;
    const RunResult run = run_iterated(factor, sys, load, Morozov{1.0, std::nullopt, 4000});
    CHECK(run.trace.stop_reason == StopReason::MorozovReached);
    CHECK(run.trace.rows.back().residual <= delta);
}

TEST_CASE("error metrics basics") {
    SpaceTimeGrid g(3, 3, 1.0, 1.0, 2.0);
    const std::vector<double> exact = manufactured_heat_field(g, HeatSolution::u1);
    const HeatErrorMetrics zero = heat_error_metrics(g, exact, exact);
    CHECK(zero.rel_linf == 0.0);
    CHECK(zero.l2 == 0.0);

    std::vector<double> off = exact;
    off[g.iu(1, 1)] += 0.1;
    const HeatErrorMetrics m = heat_error_metrics(g, off, exact);
    double max_exact = 0.0;
    for (double v : exact) max_exact = std::max(max_exact, std::abs(v));
    CHECK(m.rel_linf == Catch::Approx(0.1 / max_exact));
    CHECK(m.l2 > 0.0);

    const std::vector<double> zero_field(g.n_u(), 0.0);
    CHECK_THROWS_AS(heat_error_metrics(g, exact, zero_field), DivisionByZero);
    CHECK_THROWS_AS(heat_error_metrics(g, std::vector<double>(3, 0.0), exact),
                    DimensionMismatch);
}

TEST_CASE("field CSV layout") {
    SpaceTimeGrid g(2, 2, 1.0, 1.0, 2.0);
    const std::vector<double> exact = manufactured_heat_field(g, HeatSolution::u2);
    std::ostringstream os;
    write_heat_field_csv(os, g, exact, exact);
    std::istringstream is(os.str());
    std::string line;
    std::getline(is, line);
    CHECK(line == "t,x,u_h,u_exact");
    std::size_t rows = 0;
    while (std::getline(is, line)) ++rows;
    CHECK(rows == g.n_u());
}
