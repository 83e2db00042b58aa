// Dual norms: closed forms, the generic sphere-ascent maximization, and the
// identities connecting H and H0. The closed forms are the oracles for the
// generic path; families without a closed form are held to the Fenchel
// inequality and the involution property instead.

#include <catch2/catch_amalgamated.hpp>
#include <cmath>
#include <random>

#include "fcap/dual.hpp"

using namespace fcap;

namespace {

Vec random_point(std::mt19937_64& rng, int dim) {
    std::normal_distribution<double> gauss;
    Vec v(dim);
    do {
        for (int a = 0; a < dim; ++a) v[a] = gauss(rng);
    } while (v.norm() < 1e-3);
    return v;
}

// A handle that is forced through the scan-and-ascend path even when a
// closed form exists, so the two can be compared.
DualNormHandle generic_dual(const NormSpec& n, int scan_count = 1024) {
    DualNormHandle h;
    h.base = n;
    h.scan_dirs = direction_set(n.dim, scan_count);
    return h;
}

NormSpec test_ellipsoid() {
    Vec d(3);
    d << 1.0, 4.0, 9.0;
    return NormSpec::ellipsoid(Mat(d.asDiagonal()));
}

}  // namespace

TEST_CASE("dual closed-form values", "[dual]") {
    Vec x(3);
    x << 3.0, 4.0, 0.0;
    CHECK(dual_eval(make_dual(NormSpec::euclidean(3)), x) == Catch::Approx(5.0).epsilon(1e-14));

    // Conjugate exponent of l^4 is l^{4/3}.
    Vec ones = Vec::Ones(3);
    CHECK(dual_eval(make_dual(NormSpec::lq(4.0, 0.0, 3)), ones) ==
          Catch::Approx(std::pow(3.0, 0.75)).epsilon(1e-14));

    // Dual of the A-ellipsoid is the A^{-1}-ellipsoid.
    CHECK(dual_eval(make_dual(test_ellipsoid()), ones) ==
          Catch::Approx(std::sqrt(1.0 + 0.25 + 1.0 / 9.0)).epsilon(1e-14));
}

TEST_CASE("generic maximization matches closed forms", "[dual]") {
    std::mt19937_64 rng(29);
    const NormSpec specs[] = {NormSpec::euclidean(3), test_ellipsoid(),
                              NormSpec::lq(4.0, 0.0, 3)};
    for (const auto& n : specs) {
        const auto closed = make_dual(n);
        const auto generic = generic_dual(n);
        Vec hint;
        for (int i = 0; i < 200; ++i) {
            const Vec x = random_point(rng, 3);
            const double a = dual_eval(closed, x);
            const double b = dual_eval(generic, x, &hint);
            REQUIRE(b == Catch::Approx(a).epsilon(1e-5));
            // The ascent maximizes, so it can only fall short of the truth.
            REQUIRE(b <= a * (1.0 + 1e-12));
        }
    }
}

TEST_CASE("dual gradient identities", "[dual]") {
    Vec z(3);
    z << 0.0, 0.0, 2.0;
    const Vec gz = dual_grad(make_dual(NormSpec::euclidean(3)), z);
    CHECK(gz[0] == Catch::Approx(0.0).margin(1e-14));
    CHECK(gz[1] == Catch::Approx(0.0).margin(1e-14));
    CHECK(gz[2] == Catch::Approx(1.0).epsilon(1e-14));

    std::mt19937_64 rng(31);
    struct Case {
        NormSpec n;
        DualNormHandle h;
    };
    Case cases[] = {{test_ellipsoid(), make_dual(test_ellipsoid())},
                    {NormSpec::lq(4.0, 0.1, 3), make_dual(NormSpec::lq(4.0, 0.1, 3))},
                    {test_ellipsoid(), generic_dual(test_ellipsoid())}};
    for (auto& c : cases) {
        Vec hint;
        for (int i = 0; i < 1000; ++i) {
            const Vec x = random_point(rng, 3);
            const Vec g = dual_grad(c.h, x, &hint);
            // grad H0 is H-unit: it is the point where the Wulff shape of H
            // supports the hyperplane normal to x.
            REQUIRE(eval_norm(c.n, g) == Catch::Approx(1.0).epsilon(1e-6));
            // Euler identity.
            REQUIRE(x.dot(g) == Catch::Approx(dual_eval(c.h, x, &hint)).epsilon(1e-9));
        }
    }
}

TEST_CASE("Fenchel pairing bound", "[dual]") {
    std::mt19937_64 rng(37);
    const NormSpec specs[] = {NormSpec::euclidean(3), test_ellipsoid(),
                              NormSpec::lq(4.0, 0.1, 3), NormSpec::lq(3.0, 0.0, 3)};
    for (const auto& n : specs) {
        const auto h = make_dual(n);
        Vec hint;
        for (int i = 0; i < 500; ++i) {
            const Vec x = random_point(rng, 3);
            const Vec xi = random_point(rng, 3);
            REQUIRE(x.dot(xi) <= dual_eval(h, x, &hint) * eval_norm(n, xi) * (1.0 + 1e-10));
        }
    }
}

TEST_CASE("dual of the dual recovers the norm", "[dual]") {
    // Closed-form route: dual of ellipsoid(A) is ellipsoid(A^{-1}); dualizing
    // again must reproduce A exactly.
    const auto ell = test_ellipsoid();
    const auto once = make_dual(ell);
    REQUIRE(once.closed.has_value());
    const auto twice = make_dual(*once.closed);
    REQUIRE(twice.closed.has_value());
    CHECK((twice.closed->A - ell.A).lpNorm<Eigen::Infinity>() < 1e-12);

    // Generic route: treat the closed-form dual as a primal norm and maximize
    // against it; the values must come back to H.
    std::mt19937_64 rng(41);
    const auto back = generic_dual(*once.closed, 2048);
    Vec hint;
    for (int i = 0; i < 200; ++i) {
        const Vec x = random_point(rng, 3);
        REQUIRE(dual_eval(back, x, &hint) == Catch::Approx(eval_norm(ell, x)).epsilon(1e-5));
    }
}

TEST_CASE("dual edge cases", "[dual]") {
    const auto h = make_dual(NormSpec::euclidean(3));
    CHECK(dual_eval(h, Vec::Zero(3)) == 0.0);
    CHECK_THROWS_AS(dual_grad(h, Vec::Zero(3)), Error);
    CHECK_THROWS_AS(dual_eval(h, Vec::Ones(2)), Error);

    // Warm starts change the path taken, never the answer.
    const auto gen = generic_dual(NormSpec::lq(4.0, 0.1, 3));
    std::mt19937_64 rng(43);
    for (int i = 0; i < 50; ++i) {
        const Vec x = random_point(rng, 3);
        Vec hint = random_point(rng, 3);
        const double cold = dual_eval(gen, x);
        const double warm = dual_eval(gen, x, &hint);
        REQUIRE(warm == Catch::Approx(cold).epsilon(1e-6));
    }
}
