// Theorem checks run against fabricated fields with known behavior: exact
// radial potentials (every verdict should be consistent), deliberately
// tampered fields (exponent or scale shifted, verdicts must flip to
// violated), and degenerate inputs (guards must answer hypothesis_not_met).
// Closed-form Wulff capacities drive the Brunn-Minkowski cases, so only the
// scaling check touches the solver, at deliberately coarse resolution.

#include <catch2/catch_amalgamated.hpp>
#include <cmath>

#include "fcap/analysis.hpp"

using namespace fcap;

namespace {

// Exterior-solve stand-in: one truncation shell, zero truncation weight, the
// free nodes filled by an arbitrary radial profile of the dual gauge.
template <typename F>
SolveResult fabricate(const NormSpec& norm, const ConvexBody& body, double p, double R_out,
                      int res, double capacity, F&& profile) {
    SolveResult r;
    r.norm = norm;
    r.p = p;
    const double k = decay_exponent(body.dim, p);
    r.q = -1.0 / k;
    r.capacity = capacity;
    r.converged = true;

    FieldSolve f;
    f.grid = std::make_shared<Grid>(build_grid(body, make_dual(norm), R_out, res));
    f.R_out = R_out;
    f.truncation_y = 0.0;
    f.stats.converged = true;
    for (int64_t i = 0; i < f.grid->nnodes; ++i)
        if (f.grid->node_class(i) == NodeClass::free_unknown)
            f.grid->value[i] = profile(f.grid->h0[i]);
    r.r_hat = f.grid->r_hat;
    r.L_hat = r.r_hat;
    r.center = f.grid->shell_center;
    r.fields.push_back(std::move(f));
    return r;
}

const NormSpec& eucl3() {
    static const NormSpec n = NormSpec::euclidean(3);
    return n;
}

SolveResult radial_exact(double p, double R_out = 6.0, int res = 48) {
    const double k = decay_exponent(3, p);
    return fabricate(eucl3(), ConvexBody::wulff_body(eucl3(), 1.0), p, R_out, res,
                     radial_capacity(eucl3(), p, 1.0),
                     [k](double r) { return std::pow(r, -k); });
}

}  // namespace

TEST_CASE("concavity exponent of exact radial fields", "[analysis]") {
    for (double p : {2.0, 1.5}) {
        const auto r = radial_exact(p);
        const auto est = estimate_alpha(*r.widest().grid, r.widest().grid->value, r.q);
        CHECK(est.alpha == Catch::Approx(r.q).margin(0.01));
        CHECK_FALSE(est.hi_saturated);
        CHECK_FALSE(est.lo_failed);
        CHECK(est.pairs_used >= 256);

        const auto rep = check_concavity(r, ConvexBody::wulff_body(eucl3(), 1.0));
        CHECK(rep.verdict == "consistent");
        CHECK(std::abs(rep.measured["margin"].as_double()) <= 0.05);
    }
}

TEST_CASE("concavity estimator slack and window edges", "[analysis]") {
    const auto r = radial_exact(2.0);
    const Grid& g = *r.widest().grid;

    AlphaOptions loose;
    loose.slack = 1e-3;
    const auto tight = estimate_alpha(g, g.value, -1.0);
    const auto relax = estimate_alpha(g, g.value, -1.0, loose);
    CHECK(relax.alpha >= tight.alpha - 1e-12);  // larger slack certifies more

    // exp(-r): every negative power is convex, so the window top saturates.
    std::vector<double> expf(g.nnodes, 1.0);
    for (int64_t i = 0; i < g.nnodes; ++i)
        if (g.node_class(i) == NodeClass::free_unknown) expf[i] = std::exp(-g.h0[i]);
    const auto sat = estimate_alpha(g, expf, -1.0);
    CHECK(sat.hi_saturated);
    CHECK(sat.alpha == sat.window_hi);

    // An oscillatory field is midpoint-convex for no exponent in the window.
    std::vector<double> wavy(g.nnodes, 1.0);
    for (int64_t i = 0; i < g.nnodes; ++i)
        if (g.node_class(i) == NodeClass::free_unknown)
            wavy[i] = 2.0 + 0.5 * std::sin(7.0 * g.node_pos(i)[0]);
    const auto bad = estimate_alpha(g, wavy, -1.0);
    CHECK(bad.lo_failed);
    CHECK(bad.alpha == bad.window_lo);

    CHECK_THROWS_AS(estimate_alpha(g, g.value, 0.5), Error);
}

TEST_CASE("concavity verdicts on tampered inputs", "[analysis]") {
    // Radial field attributed to a cube: the strict-improvement bound for
    // non-Wulff bodies must fail.
    const auto rc = fabricate(eucl3(), ConvexBody::box_body(Vec::Constant(3, 0.45)), 2.0, 6.0, 48,
                              2.0 * kPi, [](double r) { return 1.0 / r; });
    const auto rep = check_concavity(rc, ConvexBody::box_body(Vec::Constant(3, 0.45)));
    CHECK(rep.verdict == "violated");
    CHECK_FALSE(rep.measured["is_wulff_body"].as_bool());

    auto r = radial_exact(2.0);
    r.converged = false;
    CHECK(check_concavity(r, ConvexBody::wulff_body(eucl3(), 1.0)).verdict ==
          "hypothesis_not_met");
}

TEST_CASE("overdetermined trace on the exact annulus", "[analysis]") {
    const auto body = ConvexBody::wulff_body(eucl3(), 0.5);
    auto r = fabricate(eucl3(), body, 2.0, 2.0, 32, annulus_capacity(eucl3(), 2.0, 0.5, 2.0),
                       [](double s) { return annulus_profile(3, 2.0, 0.5, 2.0, s); });

    const auto rep = check_overdetermined(r, body);
    CHECK(rep.verdict == "consistent");
    CHECK(rep.measured["trace_mean"].as_double() == Catch::Approx(1.0 / 6.0).epsilon(0.01));
    CHECK(rep.measured["C_hat"].as_double() == Catch::Approx(2.0).epsilon(0.01));
    CHECK(rep.measured["r_glue"].as_double() == Catch::Approx(0.5).epsilon(0.01));
    CHECK(rep.measured["radius_law_residual"].as_double() < 0.02);
    CHECK(rep.measured["trace_cv"].as_double() < 0.005);

    // Same constant-trace field attributed to a cube: with a Wulff-case
    // reference CV the cube must beat 3x that reference to stay consistent,
    // and a constant trace cannot.
    const auto cube = ConvexBody::box_body(Vec::Constant(3, 0.4));
    auto rfake = fabricate(eucl3(), cube, 2.0, 2.0, 32, 1.0,
                           [](double s) { return annulus_profile(3, 2.0, 0.5, 2.0, s); });
    OverdeterminedOptions oo;
    oo.reference_cv = rep.measured["trace_cv"].as_double();
    const auto rep2 = check_overdetermined(rfake, cube, oo);
    CHECK_FALSE(rep2.measured["is_wulff_body"].as_bool());
    CHECK(rep2.verdict == "violated");

    r.converged = false;
    CHECK(check_overdetermined(r, body).verdict == "hypothesis_not_met");
}

TEST_CASE("homothetic level sets of the exact exterior field", "[analysis]") {
    const auto body = ConvexBody::wulff_body(eucl3(), 1.0);
    const auto r = radial_exact(2.0);

    const auto rep = check_homothetic_levels(r, body, 0.25, 0.5);
    CHECK(rep.verdict == "consistent");
    CHECK(rep.measured["rho_hat"].as_double() == Catch::Approx(2.0).epsilon(0.02));
    CHECK(rep.measured["rho_err"].as_double() <= 0.02);
    CHECK(rep.measured["r1_law_err"].as_double() <= 0.02);
    CHECK(rep.measured["r2_law_err"].as_double() <= 0.02);
    CHECK(rep.measured["homothety_residual"].as_double() <= 1e-2);

    // A level beyond the shell's trust band trips the clearance guard.
    CHECK(check_homothetic_levels(r, body, 0.15, 0.5).verdict == "hypothesis_not_met");

    // Wrong decay exponent: level sets stay spherical but the scale ratio
    // disobeys the radius law.
    const auto bent = fabricate(eucl3(), body, 2.0, 6.0, 48, 2.0 * kPi,
                                [](double s) { return std::pow(s, -1.3); });
    CHECK(check_homothetic_levels(bent, body, 0.25, 0.5).verdict == "violated");

    CHECK_THROWS_AS(check_homothetic_levels(r, body, 0.5, 0.5), Error);
    CHECK_THROWS_AS(check_homothetic_levels(r, body, 0.0, 0.5), Error);
    CHECK_THROWS_AS(check_homothetic_levels(r, body, 0.3, 1.0), Error);
}

TEST_CASE("Brunn-Minkowski with closed-form capacities", "[analysis]") {
    for (double p : {2.0, 1.5}) {
        const auto K = ConvexBody::wulff_body(eucl3(), 1.0);
        Vec v(3);
        v << 0.2, -0.1, 0.3;
        const auto D = ConvexBody::wulff_body(eucl3(), 2.0, v);
        const double cK = radial_capacity(eucl3(), p, 1.0);
        const double cD = radial_capacity(eucl3(), p, 2.0);
        for (double lam : {0.5, 0.25}) {
            const double rM = lam * 1.0 + (1.0 - lam) * 2.0;
            const double cM = radial_capacity(eucl3(), p, rM);
            const auto rep = check_bm(K, D, lam, cK, cD, cM, 3, p);
            CHECK(rep.verdict == "consistent");
            CHECK(rep.measured["homothetic_inputs"].as_bool());
            CHECK(std::abs(rep.measured["deficit_rel"].as_double()) < 1e-10);
        }
        // Swapping the bodies mirrors the combination.
        const auto rep = check_bm(D, K, 0.25, cD, cK, radial_capacity(eucl3(), p, 1.75), 3, p);
        CHECK(rep.verdict == "consistent");
    }

    // Non-homothetic pair: consistency demands a strictly positive deficit.
    const auto cube = ConvexBody::box_body(Vec::Constant(3, 0.5));
    const auto ball = ConvexBody::wulff_body(eucl3(), 1.0);
    const double cK = 4.2, cD = 2.0 * kPi;
    const double even = std::pow(0.5 * std::pow(cK, 1.0) + 0.5 * std::pow(cD, 1.0), 1.0);
    {
        const auto rep = check_bm(cube, ball, 0.5, cK, cD, 1.05 * even, 3, 2.0);
        CHECK(rep.verdict == "consistent");
        CHECK_FALSE(rep.measured["homothetic_inputs"].as_bool());
    }
    CHECK(check_bm(cube, ball, 0.5, cK, cD, even, 3, 2.0).verdict == "violated");
    CHECK(check_bm(cube, ball, 0.5, cK, cD, 0.9 * even, 3, 2.0).verdict == "violated");
    CHECK_THROWS_AS(check_bm(cube, ball, 0.0, cK, cD, even, 3, 2.0), Error);
    CHECK_THROWS_AS(check_bm(cube, ball, 1.0, cK, cD, even, 3, 2.0), Error);
}

TEST_CASE("level-set scaling on a coarse real solve", "[analysis]") {
    SolveOptions opts;
    opts.resolution = 20;
    opts.radius_factors = {3.0};
    const auto body = ConvexBody::wulff_body(eucl3(), 1.0);
    const auto r = solve_exterior(body, eucl3(), 2.0, opts);
    REQUIRE(r.converged);

    ScalingOptions so;
    so.levels = {0.5};
    so.ratio_tol = 0.04;
    so.level_count = 256;
    const auto rep = check_scaling(r, body, opts, so);
    CHECK(rep.verdict == "consistent");

    auto broken = r;
    broken.converged = false;
    CHECK(check_scaling(broken, body, opts, so).verdict == "hypothesis_not_met");

    auto clipped = r;
    clipped.fields[0].truncation_y = 0.6;  // level sits below the shell weight
    CHECK_THROWS_AS(check_scaling(clipped, body, opts, so), Error);
}

TEST_CASE("far-field constant of the exact field", "[analysis]") {
    const auto r = radial_exact(2.0);
    const auto fit = asymptotic_constant(r);
    REQUIRE(fit.radii.size() == 8);
    REQUIRE(fit.phi.size() == 8);
    CHECK(fit.L_hat == Catch::Approx(1.0).epsilon(0.01));
    CHECK(fit.L_cap_pred == Catch::Approx(1.0).margin(1e-12));

    CHECK(check_asymptotic(r, 1.0).verdict == "consistent");
    CHECK(check_asymptotic(r, 0.0).verdict == "consistent");  // report-only mode

    const auto scaled = fabricate(eucl3(), ConvexBody::wulff_body(eucl3(), 1.0), 2.0, 6.0, 48,
                                  2.0 * kPi, [](double s) { return 1.15 / s; });
    CHECK(check_asymptotic(scaled, 1.0).verdict == "violated");

    auto bad = radial_exact(2.0);
    bad.converged = false;
    CHECK(check_asymptotic(bad, 1.0).verdict == "hypothesis_not_met");
}
