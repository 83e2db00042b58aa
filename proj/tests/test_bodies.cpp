// Convex bodies: support functions, containment, Minkowski combination,
// volume, anisotropic perimeter, and the Wulff / homothety fits. Oracles:
// closed-form geometry (boxes, balls, ellipsoids), plus a rejection-sampling
// Monte-Carlo volume estimator that knows nothing about the radial-map
// quadrature used by body_volume.

#include <catch2/catch_amalgamated.hpp>
#include <cmath>
#include <random>

#include "fcap/body.hpp"
#include "fcap/radial.hpp"

using namespace fcap;

namespace {

// Rejection sampling inside the support-function bounding box.
double mc_volume(const ConvexBody& b, int samples, uint64_t seed) {
    const int d = b.dim;
    Vec lo(d), hi(d);
    for (int a = 0; a < d; ++a) {
        Vec e = Vec::Zero(d);
        e[a] = 1.0;
        hi[a] = support(b, e);
        lo[a] = -support(b, (-e).eval());
    }
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    int hits = 0;
    Vec x(d), hint;
    for (int i = 0; i < samples; ++i) {
        for (int a = 0; a < d; ++a) x[a] = lo[a] + (hi[a] - lo[a]) * u01(rng);
        if (contains(b, x, &hint)) ++hits;
    }
    double box = 1.0;
    for (int a = 0; a < d; ++a) box *= hi[a] - lo[a];
    return box * static_cast<double>(hits) / static_cast<double>(samples);
}

NormSpec test_ellipsoid_norm() {
    Vec d(3);
    d << 1.0, 2.0, 4.0;
    return NormSpec::ellipsoid(Mat(d.asDiagonal()));
}

Vec vec3(double x, double y, double z) {
    Vec v(3);
    v << x, y, z;
    return v;
}

}  // namespace

TEST_CASE("support function closed forms", "[bodies]") {
    const auto eucl = NormSpec::euclidean(3);
    const auto ball = ConvexBody::wulff_body(eucl, 1.0);
    std::mt19937_64 rng(47);
    std::normal_distribution<double> gauss;
    for (int i = 0; i < 100; ++i) {
        Vec u(3);
        for (int a = 0; a < 3; ++a) u[a] = gauss(rng);
        u.normalize();
        REQUIRE(support(ball, u) == Catch::Approx(1.0).epsilon(1e-12));
    }

    // The support function of the unit Wulff shape of H is H itself.
    const auto norm = test_ellipsoid_norm();
    const auto wulff = ConvexBody::wulff_body(norm, 1.7);
    for (int i = 0; i < 100; ++i) {
        Vec u(3);
        for (int a = 0; a < 3; ++a) u[a] = gauss(rng);
        REQUIRE(support(wulff, u) == Catch::Approx(1.7 * eval_norm(norm, u)).epsilon(1e-12));
    }

    const auto box = ConvexBody::box_body(vec3(1.0, 1.0, 3.0));
    CHECK(support(box, vec3(0, 0, 1)) == Catch::Approx(3.0));
    CHECK(support(box, vec3(1, 0, 0)) == Catch::Approx(1.0));
    CHECK(support(box, vec3(0, -1, 0)) == Catch::Approx(1.0));
}

TEST_CASE("containment and boundary sampling", "[bodies]") {
    const auto eucl = NormSpec::euclidean(3);
    const auto ball = ConvexBody::wulff_body(eucl, 1.0);
    CHECK(contains(ball, vec3(0.5, 0, 0)));
    CHECK_FALSE(contains(ball, vec3(1.5, 0, 0)));
    CHECK(contains(ConvexBody::box_body(Vec::Ones(3)), vec3(0.99, -0.99, 0)));

    const auto big = ConvexBody::wulff_body(eucl, 2.0);
    const auto dirs = direction_set(3, 256);
    Vec hint;
    for (const auto& d : *dirs) {
        const Vec x = boundary_sample(big, d, &hint);
        REQUIRE(x.norm() == Catch::Approx(2.0).epsilon(1e-10));
        REQUIRE(contains(big, (x * (1.0 - 1e-9)).eval(), &hint));
        REQUIRE_FALSE(contains(big, (x * (1.0 + 1e-9)).eval(), &hint));
    }

    Mat Q = vec3(1.0, 0.25, 4.0).asDiagonal();
    const auto ell = ConvexBody::ellipsoid_body(Q, vec3(0.3, -0.1, 0.2));
    for (const auto& d : *dirs) {
        const Vec x = boundary_sample(ell, d) - ell.center;
        REQUIRE(x.dot(Q * x) == Catch::Approx(1.0).epsilon(1e-10));
    }
}

TEST_CASE("boundary crossing straddles exactly", "[bodies]") {
    const auto norm = test_ellipsoid_norm();
    const auto body = ConvexBody::wulff_body(norm, 1.0, vec3(0.1, 0.0, -0.2));
    std::mt19937_64 rng(53);
    std::normal_distribution<double> gauss;
    Vec hint;
    for (int i = 0; i < 50; ++i) {
        Vec d(3);
        for (int a = 0; a < 3; ++a) d[a] = gauss(rng);
        const Vec a = body.center + 0.3 * d.normalized();
        const Vec b = body.center + 5.0 * d.normalized();
        const double s = boundary_crossing(body, a, b, &hint);
        const Vec x = a + s * (b - a);
        REQUIRE(detail::gauge_offset(body, x - body.center, &hint) ==
                Catch::Approx(1.0).epsilon(1e-10));
    }
    CHECK_THROWS_AS(boundary_crossing(body, body.center + vec3(3, 0, 0), body.center + vec3(4, 0, 0)),
                    Error);
}

TEST_CASE("minkowski combination", "[bodies]") {
    const auto norm = test_ellipsoid_norm();
    const auto A = ConvexBody::wulff_body(norm, 1.0, vec3(0.2, 0, 0));
    const auto B = ConvexBody::wulff_body(norm, 2.0, vec3(0, -0.4, 0));

    // Same-norm Wulff operands stay exact.
    const auto C = minkowski_combine(0.25, A, 0.75, B);
    REQUIRE(C.kind == ConvexBody::Kind::wulff);
    CHECK(C.radius == Catch::Approx(0.25 * 1.0 + 0.75 * 2.0).epsilon(1e-14));
    CHECK((C.center - (0.25 * A.center + 0.75 * B.center)).lpNorm<Eigen::Infinity>() < 1e-14);

    // Mixed kinds: support combines linearly at every sampled direction.
    const auto cube = ConvexBody::box_body(Vec::Constant(3, 0.5));
    const auto ball = ConvexBody::wulff_body(NormSpec::euclidean(3), 1.0);
    const auto M = minkowski_combine(0.5, cube, 0.5, ball, 512);
    REQUIRE(M.kind == ConvexBody::Kind::support_samples);
    for (const auto& u : *M.dirs) {
        const double expect = 0.5 * support(cube, u) + 0.5 * support(ball, u);
        REQUIRE(support(M, u) <= expect * (1.0 + 1e-9));
        REQUIRE(support(M, u) >= expect * (1.0 - 5e-3));  // vertex inner approximation
    }

    // lambda = 0 keeps the first operand's support function.
    const auto K0 = minkowski_combine(1.0, cube, 0.0, ball, 512);
    for (const auto& u : *K0.dirs)
        REQUIRE(K0.center.dot(u) + K0.rel_vals[&u - K0.dirs->data()] ==
                Catch::Approx(support(cube, u)).margin(1e-12));

    // Containment is monotone under combination.
    std::mt19937_64 rng(59);
    std::uniform_real_distribution<double> u01(-0.45, 0.45);
    for (int i = 0; i < 200; ++i) {
        const Vec x = vec3(u01(rng), u01(rng), u01(rng));
        if (contains(cube, x) && contains(ball, x)) REQUIRE(contains(M, x));
    }

    CHECK_THROWS_AS(minkowski_combine(-0.1, cube, 0.5, ball), Error);
}

TEST_CASE("steiner point", "[bodies]") {
    const auto norm = test_ellipsoid_norm();
    const Vec c = vec3(0.4, -0.2, 0.7);
    const auto w = ConvexBody::wulff_body(norm, 1.3, c);
    CHECK((steiner_point(w, 4096) - c).lpNorm<Eigen::Infinity>() < 1e-3);

    const auto box = ConvexBody::box_body(vec3(1.0, 2.0, 0.5), c);
    CHECK((steiner_point(box, 4096) - c).lpNorm<Eigen::Infinity>() < 3e-3);
}

TEST_CASE("volume against closed forms and rejection sampling", "[bodies]") {
    CHECK(body_volume(ConvexBody::box_body(vec3(0.5, 0.5, 1.5))) == Catch::Approx(3.0));

    Mat Q = vec3(1.0, 0.25, 4.0).asDiagonal();
    const double vol_ell = unit_ball_volume(3) / std::sqrt(Q.determinant());
    CHECK(body_volume(ConvexBody::ellipsoid_body(Q)) == Catch::Approx(vol_ell).epsilon(1e-12));

    const auto ball2 = ConvexBody::wulff_body(NormSpec::euclidean(3), 2.0);
    CHECK(body_volume(ball2) == Catch::Approx(8.0 * unit_ball_volume(3)).epsilon(5e-3));

    // Radial-map quadrature vs rejection sampling on a body with no closed
    // form: the Wulff shape of the regularized l^4 norm.
    const auto lq = ConvexBody::wulff_body(NormSpec::lq(4.0, 0.1, 3), 1.0);
    const double quad = body_volume(lq);
    const double mc = mc_volume(lq, 400000, seeds::kVolume);
    CHECK(quad == Catch::Approx(mc).epsilon(0.01));
}

TEST_CASE("finsler perimeter", "[bodies]") {
    const auto eucl = NormSpec::euclidean(3);
    const auto ball = ConvexBody::wulff_body(eucl, 1.0);
    CHECK(finsler_perimeter(ball, eucl) == Catch::Approx(4.0 * kPi).epsilon(5e-3));

    const auto cube = ConvexBody::box_body(Vec::Constant(3, 0.5));
    CHECK(finsler_perimeter(cube, eucl) == Catch::Approx(6.0).epsilon(5e-3));

    // Divergence identity: the H-perimeter of the unit Wulff shape of H is
    // N times its volume.
    const auto norm = test_ellipsoid_norm();
    const auto wulff = ConvexBody::wulff_body(norm, 1.0);
    CHECK(finsler_perimeter(wulff, norm) ==
          Catch::Approx(3.0 * body_volume(wulff)).epsilon(0.01));
}

TEST_CASE("wulff fit round trip and rejection", "[bodies]") {
    const auto norm = test_ellipsoid_norm();
    const auto dual = make_dual(norm);
    const Vec c = vec3(0.15, -0.3, 0.45);
    const auto w = ConvexBody::wulff_body(norm, 1.2, c);

    const auto fit = fit_wulff(w, dual, 512, 1e-3);
    REQUIRE(fit.converged);
    CHECK(fit.radius == Catch::Approx(1.2).epsilon(1e-4));
    CHECK((fit.center - c).lpNorm<Eigen::Infinity>() < 1e-5);

    // A cube is not a ball: spread lands near (sqrt 3 - 1)/sqrt 3.
    const auto cube = ConvexBody::box_body(Vec::Constant(3, 0.5));
    const auto bad = fit_wulff(cube, make_dual(NormSpec::euclidean(3)), 512, 1e-3);
    REQUIRE_FALSE(bad.converged);
    CHECK(bad.spread == Catch::Approx((std::sqrt(3.0) - 1.0) / std::sqrt(3.0)).margin(0.05));
}

TEST_CASE("homothety fit", "[bodies]") {
    const auto norm = test_ellipsoid_norm();
    const auto D = ConvexBody::wulff_body(norm, 1.0);
    const Vec v = vec3(0.3, -0.6, 0.2);
    const auto K = ConvexBody::wulff_body(norm, 2.0, v);

    const auto fit = fit_homothety(K, D);
    CHECK(fit.rho == Catch::Approx(2.0).epsilon(1e-10));
    CHECK((fit.shift - v).lpNorm<Eigen::Infinity>() < 1e-10);
    CHECK(fit.residual < 1e-10);

    const auto self = fit_homothety(D, D);
    CHECK(self.rho == Catch::Approx(1.0).epsilon(1e-10));
    CHECK(self.shift.lpNorm<Eigen::Infinity>() < 1e-10);

    const auto cube = ConvexBody::box_body(Vec::Constant(3, 0.5));
    const auto ball = ConvexBody::wulff_body(NormSpec::euclidean(3), 1.0);
    CHECK(fit_homothety(cube, ball).residual >= 0.05);

    // Swapping the roles inverts the fit: rho -> 1/rho, shift -> -shift/rho.
    const auto fwd = fit_homothety(K, D);
    const auto rev = fit_homothety(D, K);
    CHECK(rev.rho == Catch::Approx(1.0 / fwd.rho).epsilon(1e-8));
    CHECK((rev.shift + fwd.shift / fwd.rho).lpNorm<Eigen::Infinity>() < 1e-8);
}

TEST_CASE("support-sampled bodies are self-consistent", "[bodies]") {
    const auto ball = ConvexBody::wulff_body(NormSpec::euclidean(3), 1.0, vec3(0.2, 0.1, 0.0));
    const auto dirs = direction_set(3, 512);
    std::vector<double> vals;
    vals.reserve(dirs->size());
    for (const auto& u : *dirs) vals.push_back(support(ball, u));
    const auto s = ConvexBody::from_support_samples(dirs, vals);

    // The sampled body is squeezed between the ball and its polytope hull.
    CHECK((s.center - ball.center).lpNorm<Eigen::Infinity>() < 1e-2);
    Vec hint;
    for (const auto& d : *dirs) {
        const Vec x = boundary_sample(s, d, &hint);
        REQUIRE((x - ball.center).norm() >= 1.0 - 1e-9);
        REQUIRE((x - ball.center).norm() <= 1.0 + 5e-3);
    }

    CHECK_THROWS_AS(ConvexBody::from_support_samples(dirs, std::vector<double>(3, 1.0)), Error);
}
