#include <catch_amalgamated.hpp>

#include "hlab/pucci.hpp"
#include "test_util.hpp"

using namespace hlab;
using tutil::rng;

TEST_CASE("pucci values on explicit spectra", "[pucci]") {
    Ellipticity ell(1.0, 2.0);
    SymN z(3);
    CHECK(pucci_plus(ell, z) == 0.0);
    CHECK(pucci_minus(ell, z) == 0.0);

    SymN s(2);
    s(0, 0) = 1.0;
    s(1, 1) = -1.0;
    CHECK(pucci_plus(ell, s) == Catch::Approx(2.0 * 1.0 + 1.0 * (-1.0)).margin(1e-13));
    CHECK(pucci_minus(ell, s) == Catch::Approx(1.0 * 1.0 + 2.0 * (-1.0)).margin(1e-13));

    // identity form: all eigenvalues positive
    Ellipticity e2(0.5, 3.0);
    CHECK(pucci_minus(e2, SymN::identity(3)) == Catch::Approx(3 * 0.5).margin(1e-13));

    // lambda = Lambda = 1 collapses to the trace
    Ellipticity lap(1.0, 1.0);
    auto g = rng(7);
    for (int it = 0; it < 100; ++it) {
        SymN r = tutil::random_sym(g, 3);
        CHECK(pucci_plus(lap, r) == Catch::Approx(trace(r)).margin(1e-11));
        CHECK(pucci_minus(lap, r) == Catch::Approx(trace(r)).margin(1e-11));
    }

    CHECK_THROWS(Ellipticity(0.0, 1.0));
    CHECK_THROWS(OperatorSpec(OperatorKind::laplacian, Ellipticity(0.5, 2.0)));
}

TEST_CASE("pucci_plus equals sup of trace(AS) over the ellipticity class", "[pucci]") {
    Ellipticity ell(0.7, 2.5);
    auto g = rng(17);
    for (int it = 0; it < 50; ++it) {
        SymN s = tutil::random_sym(g, 3);
        double mp = pucci_plus(ell, s);
        // sampled members of the class never exceed it
        for (int k = 0; k < 40; ++k) {
            SymN d(3);
            for (int i = 0; i < 3; ++i) d(i, i) = tutil::unif(g, ell.lambda, ell.Lambda);
            MatN q(3);
            for (int a = 0; a < 3; ++a) {
                VecN c(3);
                for (int i = 0; i < 3; ++i) c[i] = tutil::gauss(g);
                for (int b = 0; b < a; ++b) {
                    VecN prev(3);
                    for (int i = 0; i < 3; ++i) prev[i] = q(i, b);
                    c = c - dot(c, prev) * prev;
                }
                double nn = norm(c);
                for (int i = 0; i < 3; ++i) q(i, a) = c[i] / nn;
            }
            SymN a = conjugate(q, d);
            double tr = 0;
            for (int i = 0; i < 3; ++i)
                for (int j = 0; j < 3; ++j) tr += a(i, j) * s(j, i);
            REQUIRE(tr <= mp + 1e-10);
        }
        // the analytic maximizer attains it: Lambda on the nonnegative
        // eigenspace, lambda on the negative one
        EigenSym es = eigen_sym(s);
        SymN d(3);
        for (int i = 0; i < 3; ++i) d(i, i) = es.values[i] < 0 ? ell.lambda : ell.Lambda;
        SymN astar = conjugate(es.vectors, d);
        double tr = 0;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) tr += astar(i, j) * s(j, i);
        REQUIRE(std::abs(tr - mp) < 1e-10);
    }
}

TEST_CASE("duality, homogeneity, monotonicity, ordering", "[pucci]") {
    Ellipticity ell(0.6, 1.8);
    auto g = rng(27);
    for (int it = 0; it < 10000; ++it) {
        SymN s = tutil::random_sym(g, 3, it % 7 == 0);
        REQUIRE(std::abs(pucci_minus(ell, (-1.0) * s) + pucci_plus(ell, s)) < 1e-12 * (1 + s.max_abs()));
        REQUIRE(pucci_minus(ell, s) <= pucci_plus(ell, s) + 1e-12);
    }
    for (int it = 0; it < 300; ++it) {
        SymN s = tutil::random_sym(g, 3);
        double t = tutil::unif(g, 0.0, 4.0);
        REQUIRE(std::abs(pucci_plus(ell, t * s) - t * pucci_plus(ell, s)) < 1e-11);
        REQUIRE(std::abs(pucci_minus(ell, t * s) - t * pucci_minus(ell, s)) < 1e-11);
        // monotonicity in positive-semidefinite directions
        SymN b = tutil::random_sym(g, 3);
        SymN p = conjugate(MatN::identity(3), b);  // b itself; square it to be psd
        SymN p2(3);
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) {
                double acc = 0;
                for (int k = 0; k < 3; ++k) acc += b(i, k) * b(k, j);
                p2(i, j) = acc;
            }
        REQUIRE(pucci_plus(ell, s + p2) >= pucci_plus(ell, s) - 1e-10);
        REQUIRE(pucci_minus(ell, s + p2) >= pucci_minus(ell, s) - 1e-10);
        (void)p;
    }
}

TEST_CASE("uniform ellipticity sandwich", "[pucci]") {
    Ellipticity ell(0.8, 2.0);
    auto g = rng(37);
    OperatorSpec ops[3] = {OperatorSpec(OperatorKind::pucci_plus, ell),
                           OperatorSpec(OperatorKind::pucci_minus, ell),
                           OperatorSpec(OperatorKind::laplacian, Ellipticity(1, 1))};
    for (int it = 0; it < 10000; ++it) {
        SymN s = tutil::random_sym(g, 3);
        SymN p = tutil::random_sym(g, 3);
        for (auto& op : ops) {
            Ellipticity e = op.kind == OperatorKind::laplacian ? ell : op.ell;
            double diff = apply_operator(op, s + p) - apply_operator(op, s);
            auto [lo, hi] = ellipticity_sandwich(e, p);
            REQUIRE(diff >= lo - 1e-11);
            REQUIRE(diff <= hi + 1e-11);
        }
        // P == 0 collapses the sandwich to a point
        auto [lo0, hi0] = ellipticity_sandwich(ell, SymN(3));
        REQUIRE(lo0 == 0.0);
        REQUIRE(hi0 == 0.0);
    }
    // psd P: sandwich spans [lambda tr P, Lambda tr P]
    for (int it = 0; it < 200; ++it) {
        SymN b = tutil::random_sym(g, 3);
        SymN p2(3);
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) {
                double acc = 0;
                for (int k = 0; k < 3; ++k) acc += b(i, k) * b(k, j);
                p2(i, j) = acc;
            }
        auto [lo, hi] = ellipticity_sandwich(ell, p2);
        REQUIRE(lo == Catch::Approx(ell.lambda * trace(p2)).margin(1e-9));
        REQUIRE(hi == Catch::Approx(ell.Lambda * trace(p2)).margin(1e-9));
    }
}

TEST_CASE("subadditivity chain", "[pucci]") {
    Ellipticity ell(0.5, 2.2);
    SymN z(3);
    auto m0 = subadditivity_check(ell, z, z);
    CHECK(m0.first == 0.0);
    CHECK(m0.second == 0.0);
    CHECK(m0.third == 0.0);

    auto g = rng(47);
    for (int it = 0; it < 10000; ++it) {
        SymN s = tutil::random_sym(g, 3, it % 11 == 0);
        SymN p = tutil::random_sym(g, 3);
        REQUIRE(subadditivity_check(ell, s, p).min() >= -1e-12 * (1 + s.max_abs() + p.max_abs()));
    }
    // S = -P makes the middle inequality tight: M-(0) = 0 = M-(S) + M+(-S)
    for (int it = 0; it < 200; ++it) {
        SymN s = tutil::random_sym(g, 3);
        auto m = subadditivity_check(ell, s, (-1.0) * s);
        REQUIRE(std::abs(m.first) < 1e-11);
        REQUIRE(std::abs(m.second) < 1e-11);
    }
}

TEST_CASE("intrinsic continuity of eigenvalue operators is exact", "[pucci]") {
    ModelManifold H3(3, 1.0), E2(2, 0.0);
    Ellipticity ell(0.7, 1.9);
    auto g = rng(57);
    OperatorSpec ops[3] = {OperatorSpec(OperatorKind::pucci_plus, ell),
                           OperatorSpec(OperatorKind::pucci_minus, ell),
                           OperatorSpec(OperatorKind::laplacian, Ellipticity(1, 1))};
    for (int it = 0; it < 300; ++it) {
        Point x = tutil::random_point(g, H3, 2.0);
        Point y = tutil::random_point(g, H3, 2.0);
        SymForm s = tutil::random_form(g, H3, x);
        for (auto& op : ops) REQUIRE(std::abs(intrinsic_continuity_check(H3, op, x, y, s)) < 1e-11 * (1 + s.matrix.max_abs()));
        REQUIRE(intrinsic_continuity_check(H3, ops[0], x, x, s) == 0.0);
    }
    for (int it = 0; it < 100; ++it) {
        Point x = tutil::random_point(g, E2, 2.0);
        Point y = tutil::random_point(g, E2, 2.0);
        SymForm s = tutil::random_form(g, E2, x);
        REQUIRE(intrinsic_continuity_check(E2, ops[1], x, y, s) == 0.0);
    }
}

TEST_CASE("frame independence under orthogonal conjugation", "[pucci]") {
    Ellipticity ell(0.9, 1.4);
    auto g = rng(67);
    for (int it = 0; it < 500; ++it) {
        SymN s = tutil::random_sym(g, 3);
        MatN q(3);
        for (int a = 0; a < 3; ++a) {
            VecN c(3);
            for (int i = 0; i < 3; ++i) c[i] = tutil::gauss(g);
            for (int b = 0; b < a; ++b) {
                VecN prev(3);
                for (int i = 0; i < 3; ++i) prev[i] = q(i, b);
                c = c - dot(c, prev) * prev;
            }
            double nn = norm(c);
            for (int i = 0; i < 3; ++i) q(i, a) = c[i] / nn;
        }
        SymN s2 = conjugate(q, s);
        REQUIRE(std::abs(pucci_plus(ell, s) - pucci_plus(ell, s2)) < 1e-11 * (1 + s.max_abs()));
        REQUIRE(std::abs(pucci_minus(ell, s) - pucci_minus(ell, s2)) < 1e-11 * (1 + s.max_abs()));
    }
}
