#include <catch2/catch_amalgamated.hpp>

#include <iqr/dense_oracle.hpp>
#include <iqr/ldlt.hpp>
#include <iqr/rng.hpp>
#include <iqr/sparse.hpp>

#include <thread>

using namespace iqr;

namespace {

// diagonally dominated random symmetric matrix with a banded-ish pattern
TripletList random_dd_triplets(std::size_t n, SplitMix64& rng) {
    TripletList t(n);
    std::vector<double> rowsum(n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            if (rng.next_unit() < 0.35) {
                const double v = rng.next_in(-1.0, 1.0);
                t.add(i, j, v);
                rowsum[i] += std::abs(v);
                rowsum[j] += std::abs(v);
            }
        }
    for (std::size_t i = 0; i < n; ++i) t.add(i, i, rowsum[i] + 1.0 + rng.next_unit());
    return t;
}

DenseMatrix to_dense(const SymSparse& m) {
    DenseMatrix d(m.n);
    for (std::size_t i = 0; i < m.n; ++i)
        for (std::size_t p = m.row_ptr[i]; p < m.row_ptr[i + 1]; ++p) {
            d(i, m.col_idx[p]) = m.values[p];
            d(m.col_idx[p], i) = m.values[p];
        }
    return d;
}

} // namespace

TEST_CASE("triplets mirror into the upper triangle and accumulate") {
    TripletList t(2);
    t.add(1, 0, 3.0); // lower-triangle input
    SymSparse s = triplets_to_sym(t);
    REQUIRE(s.nnz() == 1);
    CHECK(s.row_ptr == std::vector<std::size_t>{0, 1, 1});
    CHECK(s.col_idx == std::vector<std::size_t>{1});
    CHECK(s.values[0] == 3.0);

    TripletList dup(2);
    dup.add(0, 0, 1.0);
    dup.add(0, 0, 2.0);
    dup.add(0, 1, 0.5);
    dup.add(1, 0, 0.5);
    SymSparse d = triplets_to_sym(dup);
    REQUIRE(d.nnz() == 2);
    CHECK(d.values[0] == 3.0);
    CHECK(d.values[1] == 1.0);

    TripletList bad(2);
    CHECK_THROWS_AS(bad.add(2, 0, 1.0), DimensionMismatch);
}

TEST_CASE("matvec and quad_form expand the symmetric storage") {
    TripletList t(3);
    t.add(0, 0, 2.0);
    t.add(0, 1, -1.0);
    t.add(1, 1, 2.0);
    t.add(1, 2, -1.0);
    t.add(2, 2, 2.0);
    SymSparse m = triplets_to_sym(t);

    const std::vector<double> x{1.0, 2.0, 3.0};
    const std::vector<double> y = matvec(m, x);
    CHECK(y[0] == Catch::Approx(0.0));
    CHECK(y[1] == Catch::Approx(0.0));
    CHECK(y[2] == Catch::Approx(4.0));

    // x^T M x  =  x . (M x)
    CHECK(quad_form(m, x) == Catch::Approx(dot(x, y)));

    CHECK_THROWS_AS(matvec(m, std::vector<double>{1.0}), DimensionMismatch);
    CHECK_THROWS_AS(quad_form(m, std::vector<double>{1.0}), DimensionMismatch);
}

TEST_CASE("add_scaled merges patterns") {
    TripletList ta(2), tb(2);
    ta.add(0, 0, 1.0);
    tb.add(0, 1, 2.0);
    tb.add(1, 1, 4.0);
    SymSparse c = add_scaled(triplets_to_sym(ta), 0.5, triplets_to_sym(tb));
    DenseMatrix d = to_dense(c);
    CHECK(d(0, 0) == 1.0);
    CHECK(d(0, 1) == 1.0);
    CHECK(d(1, 0) == 1.0);
    CHECK(d(1, 1) == 2.0);
}

TEST_CASE("hand elimination of a 2x2 SPD matrix") {
    TripletList t(2);
    t.add(0, 0, 4.0);
    t.add(0, 1, 2.0);
    t.add(1, 1, 3.0);
    // natural ordering so the pivots land in textbook order
    LdltFactor f = factor_spd(triplets_to_sym(t), Ordering::Natural);
    REQUIRE(f.pivots().size() == 2);
    CHECK(f.pivots()[0] == Catch::Approx(4.0));
    CHECK(f.pivots()[1] == Catch::Approx(2.0)); // 3 - (1/2)*4*(1/2)

    const std::vector<double> x = f.solve(std::vector<double>{8.0, 7.0});
    CHECK(x[0] == Catch::Approx(1.25));
    CHECK(x[1] == Catch::Approx(1.5));
}

TEST_CASE("indefinite matrix is rejected with the pivot index") {
    TripletList t(2);
    t.add(0, 0, 1.0);
    t.add(0, 1, 2.0);
    t.add(1, 1, 1.0); // eigenvalues 3 and -1
    SymSparse m = triplets_to_sym(t);
    CHECK_THROWS_AS(factor_spd(m, Ordering::Natural), NotPositiveDefinite);
    try {
        factor_spd(m, Ordering::Natural);
    } catch (const NotPositiveDefinite& e) {
        CHECK(e.pivot_index == 1);
    }
    CHECK_THROWS_AS(factor_spd(m), NotPositiveDefinite); // any ordering
}

TEST_CASE("factor of a scaled identity") {
    TripletList t(4);
    for (std::size_t i = 0; i < 4; ++i) t.add(i, i, 2.0);
    LdltFactor f = factor_spd(triplets_to_sym(t));
    for (double d : f.pivots()) CHECK(d == 2.0);
    std::vector<double> e(4, 0.0);
    e[2] = 1.0;
    const std::vector<double> x = f.solve(e);
    CHECK(x[2] == 0.5);
    CHECK(x[0] == 0.0);
}

TEST_CASE("factor/solve round-trip on random diagonally dominated systems") {
    SplitMix64 rng(2024);
    for (int rep = 0; rep < 100; ++rep) {
        const std::size_t n = 2 + static_cast<std::size_t>(rng.next_u64() % 40);
        SymSparse m = triplets_to_sym(random_dd_triplets(n, rng));
        LdltFactor f = factor_spd(m);
        for (double d : f.pivots()) CHECK(d > 0.0);

        std::vector<double> rhs(n);
        double rhs_norm = 0.0;
        for (double& v : rhs) {
            v = rng.next_in(-2.0, 2.0);
            rhs_norm += v * v;
        }
        rhs_norm = std::sqrt(rhs_norm);
        const std::vector<double> x = f.solve(rhs);
        const std::vector<double> mx = matvec(m, x);
        double err = 0.0;
        for (std::size_t i = 0; i < n; ++i) err += (mx[i] - rhs[i]) * (mx[i] - rhs[i]);
        CHECK(std::sqrt(err) <= 1e-10 * std::max(rhs_norm, 1.0));

        // cross-check against dense elimination
        const std::vector<double> xd = gauss_solve(to_dense(m), rhs);
        for (std::size_t i = 0; i < n; ++i)
            CHECK(x[i] == Catch::Approx(xd[i]).margin(1e-10).epsilon(1e-10));
    }
}

TEST_CASE("rcm ordering is a pure function of the pattern") {
    SplitMix64 rng(7);
    SymSparse m1 = triplets_to_sym(random_dd_triplets(30, rng));
    SymSparse m2 = m1;
    for (double& v : m2.values) v *= 3.7; // same pattern, different values
    CHECK(rcm_ordering(m1) == rcm_ordering(m2));

    // permutation property: each index exactly once
    const std::vector<std::size_t> p = rcm_ordering(m1);
    std::vector<char> seen(30, 0);
    for (std::size_t v : p) {
        REQUIRE(v < 30);
        CHECK(!seen[v]);
        seen[v] = 1;
    }
}

TEST_CASE("concurrent solves on one factor") {
    SplitMix64 rng(11);
    SymSparse m = triplets_to_sym(random_dd_triplets(60, rng));
    LdltFactor f = factor_spd(m);

    std::vector<std::vector<double>> rhs(4), serial(4), parallel(4);
    for (int k = 0; k < 4; ++k) {
        rhs[k].resize(60);
        for (double& v : rhs[k]) v = rng.next_in(-1.0, 1.0);
        serial[k] = f.solve(rhs[k]);
    }
    std::vector<std::thread> pool;
    for (int k = 0; k < 4; ++k)
        pool.emplace_back([&, k] { parallel[k] = f.solve(rhs[k]); });
    for (auto& th : pool) th.join();
    for (int k = 0; k < 4; ++k) CHECK(serial[k] == parallel[k]);
}
