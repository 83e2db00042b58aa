#pragma once

// Rigidity-theorem checks on solved capacitary potentials: the concavity
// exponent estimator, the overdetermined shell-trace test, homothetic level
// sets with the radius law, the Brunn-Minkowski inequality with its equality
// case, the capacity scaling law for superlevel sets, and the far-field
// constant. Each check returns a TheoremReport with verdict
// consistent | violated | hypothesis_not_met.

#include <algorithm>
#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "fcap/body.hpp"
#include "fcap/level_set.hpp"
#include "fcap/radial.hpp"
#include "fcap/report.hpp"
#include "fcap/solve.hpp"

namespace fcap {

// ---------------------------------------------------------------- concavity

struct AlphaOptions {
    int pairs = 20000;
    uint64_t seed = seeds::kDefaultAnalysis;
    double slack = 1e-6;        // relative midpoint-convexity slack
    int max_offset_cells = 0;   // 0: auto from the body scale
    double min_log_ratio = 0.25;  // discard weak pairs (u_x ~ u_y)
    // Band keeps clear of the cut-cell layer at the body and the truncation
    // shell; short offsets are rejected because their convexity margins sit
    // below discretization noise.
    double band_lo = 1.35, band_hi = 0.9;  // annulus band in units of r_hat / R_out
    double window = 1.5;        // bisection window half-width around q
    double beta_cap = -0.01;    // exponents above this need manual review
    int bisect_steps = 12;
};

struct AlphaEstimate {
    double alpha = 0.0;  // largest exponent with certified midpoint convexity
    bool hi_saturated = false;
    bool lo_failed = false;
    int pairs_used = 0;
    double window_lo = 0.0, window_hi = 0.0;
};

/// Largest beta in the bisection window such that u^beta is midpoint-convex
/// on node-aligned symmetric triples x = m + delta, y = m - delta (the
/// midpoint lands exactly on node m, so no interpolation enters). Convexity
/// of u^beta is monotone in beta for beta < 0 (powers >= 1 of a positive
/// convex function stay convex), which makes the bisection well posed.
inline AlphaEstimate estimate_alpha(const Grid& g, const std::vector<double>& value, double q,
                                    const AlphaOptions& opts = {}) {
    require(q < 0.0, "estimate_alpha: q must be negative");
    AlphaEstimate est;
    est.window_lo = q - opts.window;
    est.window_hi = std::min(q + opts.window, opts.beta_cap);

    const double lo_gauge = opts.band_lo * g.r_hat, hi_gauge = opts.band_hi * g.R_out;
    std::vector<int64_t> band;
    for (int64_t dof = 0; dof < static_cast<int64_t>(g.dof_node.size()); ++dof) {
        const int64_t id = g.dof_node[dof];
        if (g.h0[id] >= lo_gauge && g.h0[id] <= hi_gauge) band.push_back(id);
    }
    require(band.size() >= 64, "estimate_alpha: annulus band too thin at this resolution");

    int K = opts.max_offset_cells;
    if (K <= 0) K = std::min<int>(16, std::max<int>(2, static_cast<int>(std::lround(0.8 * g.r_hat / g.h))));
    const int min_off = std::max(1, K / 2);

    std::mt19937_64 rng(opts.seed);
    std::vector<int> mi(g.dim), xi(g.dim), yi(g.dim);
    struct Triple {
        double um, ux, uy;
    };
    std::vector<Triple> triples;
    triples.reserve(opts.pairs);

    const int64_t max_attempts = 50ll * opts.pairs;
    for (int64_t at = 0; at < max_attempts && static_cast<int>(triples.size()) < opts.pairs; ++at) {
        const int64_t m = band[rng() % band.size()];
        g.node_index(m, mi);
        bool ok = true;
        int maxda = 0;
        int64_t xid = 0, yid = 0;
        for (int a = 0; a < g.dim; ++a) {
            const int da = static_cast<int>(rng() % (2 * K + 1)) - K;
            maxda = std::max(maxda, std::abs(da));
            xi[a] = mi[a] + da;
            yi[a] = mi[a] - da;
            if (xi[a] < 0 || xi[a] >= g.shape[a] || yi[a] < 0 || yi[a] >= g.shape[a]) ok = false;
        }
        if (maxda < min_off || !ok) continue;
        xid = g.node_id(xi);
        yid = g.node_id(yi);
        if (g.node_class(xid) != NodeClass::free_unknown ||
            g.node_class(yid) != NodeClass::free_unknown)
            continue;
        if (g.h0[xid] < lo_gauge || g.h0[xid] > hi_gauge) continue;
        if (g.h0[yid] < lo_gauge || g.h0[yid] > hi_gauge) continue;
        const double ux = value[xid], uy = value[yid], um = value[m];
        if (!(ux > 0.0) || !(uy > 0.0) || !(um > 0.0)) continue;
        if (std::abs(std::log(ux / uy)) < opts.min_log_ratio) continue;
        triples.push_back({um, ux, uy});
    }
    est.pairs_used = static_cast<int>(triples.size());
    require(est.pairs_used >= 256, "estimate_alpha: not enough usable pairs");

    auto passes = [&](double beta) {
        for (const auto& t : triples) {
            const double vm = std::pow(t.um, beta);
            const double avg = 0.5 * (std::pow(t.ux, beta) + std::pow(t.uy, beta));
            if (vm - avg > opts.slack * std::max(vm, avg)) return false;
        }
        return true;
    };

    double lo = est.window_lo, hi = est.window_hi;
    if (passes(hi)) {
        est.alpha = hi;
        est.hi_saturated = true;
        return est;
    }
    if (!passes(lo)) {
        est.alpha = lo;
        est.lo_failed = true;
        return est;
    }
    for (int it = 0; it < opts.bisect_steps; ++it) {
        const double mid = 0.5 * (lo + hi);
        (passes(mid) ? lo : hi) = mid;
    }
    est.alpha = lo;
    return est;
}

/// Whether the body is (numerically) a Wulff shape of the norm.
inline bool classify_wulff(const ConvexBody& body, const NormSpec& norm,
                           const DualNormHandle& dual, double* spread = nullptr) {
    if (body.kind == ConvexBody::Kind::wulff && norms_equal(body.dual.base, norm)) {
        if (spread) *spread = 0.0;
        return true;
    }
    const auto wf = fit_wulff(body, dual);
    if (spread) *spread = wf.spread;
    return wf.converged;
}

inline TheoremReport check_concavity(const SolveResult& res, const ConvexBody& body,
                                     const AlphaOptions& opts = {}, double alpha_tol = 0.05,
                                     Json provenance = Json::Obj{}) {
    const auto& field = res.widest();
    const auto view = exterior_field(field);
    const auto est = estimate_alpha(*field.grid, view, res.q, opts);
    auto dual = make_dual(res.norm);
    double spread = 0.0;
    const bool is_wulff = classify_wulff(body, res.norm, dual, &spread);

    TheoremReport rep;
    rep.check = "concavity_exponent";
    rep.measured["alpha_hat"] = est.alpha;
    rep.measured["q"] = res.q;
    rep.measured["margin"] = res.q - est.alpha;
    rep.measured["is_wulff_body"] = is_wulff;
    rep.measured["body_spread"] = spread;
    rep.measured["pairs_used"] = est.pairs_used;
    rep.measured["hi_saturated"] = est.hi_saturated;
    rep.measured["lo_failed"] = est.lo_failed;
    rep.tolerances["alpha_tol"] = alpha_tol;
    rep.tolerances["slack"] = opts.slack;
    rep.tolerances["window"] = opts.window;
    rep.provenance = std::move(provenance);
    rep.provenance["seed"] = static_cast<int64_t>(opts.seed);
    rep.provenance["pairs_requested"] = opts.pairs;

    if (!res.converged || est.hi_saturated) {
        rep.verdict = "hypothesis_not_met";
    } else if (is_wulff) {
        rep.verdict = std::abs(est.alpha - res.q) <= alpha_tol ? "consistent" : "violated";
    } else {
        rep.verdict = est.alpha <= res.q - 2.0 * alpha_tol ? "consistent" : "violated";
    }
    return rep;
}

// ------------------------------------------------------------ overdetermined

struct OverdeterminedOptions {
    double cv_tol = 0.02;      // Wulff bodies: trace must be this uniform
    double resid_tol = 0.05;   // |r_fit * C_hat / k - 1|
    int trace_count = 512;
    double reference_cv = 0.0;  // >0: non-Wulff threshold is 3x this value
};

/// Overdetermined annulus test: the shell trace H(Du) of the annulus
/// potential is constant iff the inner body is a concentric Wulff shape, and
/// then the glue radius r solving C = k R^(-k-1) / (r^(-k) - R^(-k)) matches
/// the body radius, normalized as r * (k / r) = k.
inline TheoremReport check_overdetermined(const SolveResult& res, const ConvexBody& body,
                                          const OverdeterminedOptions& opts = {},
                                          Json provenance = Json::Obj{}) {
    const auto& field = res.widest();
    const Grid& g = *field.grid;
    const int N = g.dim;
    const double k = decay_exponent(N, res.p);
    auto dual = make_dual(res.norm);

    const auto ts = sample_shell_trace(g, g.value, dual, k, opts.trace_count);
    const double R = g.R_out;
    const double r_glue = std::pow(std::pow(R, -k) + k * std::pow(R, -k - 1.0) / ts.mean, -1.0 / k);
    const double C_hat = k / r_glue;

    double spread = 0.0;
    const bool is_wulff = classify_wulff(body, res.norm, dual, &spread);
    const auto wf = fit_wulff(body, dual);
    const double r_fit = body.kind == ConvexBody::Kind::wulff && is_wulff ? body.radius : wf.radius;
    const double residual = std::abs(r_fit * C_hat / k - 1.0);

    TheoremReport rep;
    rep.check = "overdetermined_shell_trace";
    rep.measured["trace_mean"] = ts.mean;
    rep.measured["trace_cv_raw"] = ts.cv_raw;
    rep.measured["trace_cv"] = ts.cv_smoothed;
    rep.measured["r_glue"] = r_glue;
    rep.measured["C_hat"] = C_hat;
    rep.measured["r_fit"] = r_fit;
    rep.measured["radius_law_residual"] = residual;
    rep.measured["is_wulff_body"] = is_wulff;
    rep.measured["body_spread"] = spread;
    rep.tolerances["cv_tol"] = opts.cv_tol;
    rep.tolerances["resid_tol"] = opts.resid_tol;
    if (opts.reference_cv > 0.0) rep.tolerances["reference_cv"] = opts.reference_cv;
    rep.provenance = std::move(provenance);
    rep.provenance["trace_count"] = opts.trace_count;

    if (!res.converged) {
        rep.verdict = "hypothesis_not_met";
    } else if (is_wulff) {
        rep.verdict = (ts.cv_smoothed <= opts.cv_tol && residual <= opts.resid_tol)
                          ? "consistent"
                          : "violated";
    } else {
        const double thresh = opts.reference_cv > 0.0 ? 3.0 * opts.reference_cv : opts.cv_tol;
        rep.tolerances["nonwulff_cv_threshold"] = thresh;
        rep.verdict = ts.cv_smoothed >= thresh ? "consistent" : "violated";
    }
    return rep;
}

// -------------------------------------------------------- homothetic levels

struct LevelCheckOptions {
    int count = 1024;            // rays per level surface
    double resid_thresh = 1e-2;  // homothety residual separating wulff/non-wulff
    double rho_tol = 0.02;
    double radius_tol = 0.02;
    double min_clearance = 3.0;  // cells between a level and either boundary
};

/// Two superlevel sets of the exterior potential are homothetic iff the body
/// is a Wulff shape; then their scale ratio and gauge radii follow
/// r(t) = r_hat * t^(-1/k).
inline TheoremReport check_homothetic_levels(const SolveResult& res, const ConvexBody& body,
                                             double t1, double t2,
                                             const LevelCheckOptions& opts = {},
                                             Json provenance = Json::Obj{}) {
    require(0.0 < t1 && t1 < t2 && t2 < 1.0, "check_homothetic_levels: need 0 < t1 < t2 < 1");
    const auto& field = res.widest();
    const Grid& g = *field.grid;
    const double k = decay_exponent(g.dim, res.p);
    auto dual = make_dual(res.norm);

    const auto view = exterior_field(field);
    const auto U1 = extract_level_set(g, view, body, dual, t1, opts.count);
    const auto U2 = extract_level_set(g, view, body, dual, t2, opts.count);
    const auto hfit = fit_homothety(U1.hull, U2.hull);

    double spread = 0.0;
    const bool is_wulff = classify_wulff(body, res.norm, dual, &spread);
    const double rho_pred = std::pow(t2 / t1, 1.0 / k);

    const auto wf1 = fit_wulff(U1.hull, dual);
    const auto wf2 = fit_wulff(U2.hull, dual);
    const double r1_pred = res.r_hat * std::pow(t1, -1.0 / k);
    const double r2_pred = res.r_hat * std::pow(t2, -1.0 / k);

    TheoremReport rep;
    rep.check = "homothetic_level_sets";
    rep.measured["rho_hat"] = hfit.rho;
    rep.measured["rho_pred"] = rho_pred;
    rep.measured["rho_err"] = std::abs(hfit.rho / rho_pred - 1.0);
    rep.measured["homothety_residual"] = hfit.residual;
    rep.measured["r1_fit"] = wf1.radius;
    rep.measured["r2_fit"] = wf2.radius;
    rep.measured["r1_law_err"] = std::abs(wf1.radius / r1_pred - 1.0);
    rep.measured["r2_law_err"] = std::abs(wf2.radius / r2_pred - 1.0);
    rep.measured["level_spread_1"] = wf1.spread;
    rep.measured["level_spread_2"] = wf2.spread;
    rep.measured["is_wulff_body"] = is_wulff;
    rep.measured["body_clearance_cells"] = std::min(U1.body_clearance, U2.body_clearance);
    rep.measured["shell_clearance_cells"] = std::min(U1.shell_clearance, U2.shell_clearance);
    rep.measured["rays_lost"] = U1.rays_lost + U2.rays_lost;
    rep.tolerances["resid_thresh"] = opts.resid_thresh;
    rep.tolerances["rho_tol"] = opts.rho_tol;
    rep.tolerances["radius_tol"] = opts.radius_tol;
    rep.tolerances["min_clearance_cells"] = opts.min_clearance;
    rep.provenance = std::move(provenance);
    rep.provenance["t1"] = t1;
    rep.provenance["t2"] = t2;
    rep.provenance["rays"] = opts.count;

    const bool clear = std::min(U1.body_clearance, U2.body_clearance) >= opts.min_clearance &&
                       std::min(U1.shell_clearance, U2.shell_clearance) >= opts.min_clearance &&
                       U1.rays_lost + U2.rays_lost == 0;
    if (!res.converged || !clear) {
        rep.verdict = "hypothesis_not_met";
    } else if (is_wulff) {
        rep.verdict = (hfit.residual <= opts.resid_thresh &&
                       std::abs(hfit.rho / rho_pred - 1.0) <= opts.rho_tol &&
                       std::abs(wf1.radius / r1_pred - 1.0) <= opts.radius_tol &&
                       std::abs(wf2.radius / r2_pred - 1.0) <= opts.radius_tol)
                          ? "consistent"
                          : "violated";
    } else {
        rep.verdict = hfit.residual > opts.resid_thresh ? "consistent" : "violated";
    }
    return rep;
}

// ------------------------------------------------------------ Brunn-Minkowski

struct BmOptions {
    double eq_tol = 1e-2;  // relative deficit resolving the equality case
    int combine_count = 2048;
};

struct BmDeficit {
    double capK = 0.0, capD = 0.0, capM = 0.0;
    double deficit_rel = 0.0;
    bool homothetic_inputs = false;
    double homothety_residual = 0.0;
};

inline BmDeficit bm_deficit(double capK, double capD, double capM, int N, double p,
                            const ConvexBody& K, const ConvexBody& D, double lambda) {
    const double s = 1.0 / (static_cast<double>(N) - p);
    BmDeficit d;
    d.capK = capK;
    d.capD = capD;
    d.capM = capM;
    const double mK = std::pow(capK, s), mD = std::pow(capD, s), mM = std::pow(capM, s);
    d.deficit_rel = (mM - lambda * mK - (1.0 - lambda) * mD) / mM;
    const auto hf = fit_homothety(K, D);
    d.homothety_residual = hf.residual;
    d.homothetic_inputs = hf.residual <= 1e-2;
    return d;
}

/// Brunn-Minkowski for capacity: Cap^(1/(N-p)) is concave under Minkowski
/// combination, with equality iff the bodies are homothetic. Capacities of
/// K, D and lambda K + (1-lambda) D are passed in so callers can reuse solves.
inline TheoremReport check_bm(const ConvexBody& K, const ConvexBody& D, double lambda,
                              double capK, double capD, double capM, int N, double p,
                              const BmOptions& opts = {}, Json provenance = Json::Obj{}) {
    require(0.0 < lambda && lambda < 1.0, "check_bm: lambda must be in (0,1)");
    const auto d = bm_deficit(capK, capD, capM, N, p, K, D, lambda);

    TheoremReport rep;
    rep.check = "brunn_minkowski_capacity";
    rep.measured["cap_K"] = d.capK;
    rep.measured["cap_D"] = d.capD;
    rep.measured["cap_combined"] = d.capM;
    rep.measured["deficit_rel"] = d.deficit_rel;
    rep.measured["homothetic_inputs"] = d.homothetic_inputs;
    rep.measured["homothety_residual"] = d.homothety_residual;
    rep.tolerances["eq_tol"] = opts.eq_tol;
    rep.provenance = std::move(provenance);
    rep.provenance["lambda"] = lambda;

    if (d.deficit_rel < -opts.eq_tol) {
        rep.verdict = "violated";  // concavity itself failed beyond numerics
    } else if (d.homothetic_inputs) {
        rep.verdict = std::abs(d.deficit_rel) <= opts.eq_tol ? "consistent" : "violated";
    } else {
        rep.verdict = d.deficit_rel > opts.eq_tol ? "consistent" : "violated";
    }
    return rep;
}

// ------------------------------------------------------------------ scaling

struct ScalingOptions {
    std::vector<double> levels{0.3, 0.5, 0.7};
    double ratio_tol = 0.03;
    int level_count = 2048;
};

/// Capacity scaling of superlevel sets: Cap(U(t)) = t^(1-p) Cap(Omega),
/// verified both by re-solving the extracted set and by reading the original
/// field's masked energy (whose shared discretization bias cancels in the
/// ratio after the same truncation extrapolation).
inline TheoremReport check_scaling(const SolveResult& res, const ConvexBody& body,
                                   const SolveOptions& solve_opts,
                                   const ScalingOptions& opts = {},
                                   Json provenance = Json::Obj{}) {
    const auto& field = res.widest();
    const Grid& g = *field.grid;
    const int N = g.dim;
    const double k = decay_exponent(N, res.p);
    auto dual = make_dual(res.norm);
    const auto wide_view = exterior_field(field);

    TheoremReport rep;
    rep.check = "level_set_scaling";
    Json::Arr per_level;
    bool all_ok = true;
    double min_clear = std::numeric_limits<double>::infinity();

    for (double t : opts.levels) {
        const auto U = extract_level_set(g, wide_view, body, dual, t, opts.level_count);
        min_clear = std::min({min_clear, U.body_clearance, U.shell_clearance});

        auto re = solve_exterior(U.hull, res.norm, res.p, solve_opts);
        const double ratio_resolve = std::pow(t, res.p - 1.0) * re.capacity / res.capacity;

        // Masked-energy reading per truncation shell: the raw field masked at
        // the shell-local level (t - y)/(1 - y) is the annulus potential of
        // U(t), so its energy corrected by (1 - y/t)^(p-1) reads t^(1-p) Cap.
        // Extrapolated in R^(-k) exactly like the capacity.
        double sy = 0, sc = 0, syy = 0, syc = 0;
        for (const auto& f : res.fields) {
            const double yf = f.truncation_y;
            require(yf < t, "check_scaling: level below the truncation weight");
            const double t_raw = (t - yf) / (1.0 - yf);
            const double Em = masked_level_energy(*f.grid, f.grid->value, t_raw, res.norm, res.p,
                                                  /*stretch_outer=*/true, res.threads);
            const double corr = std::pow(t, res.p - 1.0) *
                                std::pow(1.0 - yf / t, res.p - 1.0) * Em;
            const double y = std::pow(f.R_out, -k);
            sy += y;
            sc += corr;
            syy += y * y;
            syc += y * corr;
        }
        double ratio_masked;
        if (res.fields.size() == 1) {
            ratio_masked = sc / res.capacity;
        } else {
            const double n = static_cast<double>(res.fields.size());
            const double slope = (n * syc - sy * sc) / (n * syy - sy * sy);
            ratio_masked = (sc - slope * sy) / n / res.capacity;
        }

        all_ok = all_ok && std::abs(ratio_resolve - 1.0) <= opts.ratio_tol &&
                 std::abs(ratio_masked - 1.0) <= opts.ratio_tol && re.converged;

        Json entry;
        entry["t"] = t;
        entry["ratio_resolve"] = ratio_resolve;
        entry["ratio_masked"] = ratio_masked;
        entry["cap_level"] = re.capacity;
        per_level.push_back(std::move(entry));
    }

    rep.measured["levels"] = Json(std::move(per_level));
    rep.measured["min_clearance_cells"] = min_clear;
    rep.tolerances["ratio_tol"] = opts.ratio_tol;
    rep.provenance = std::move(provenance);
    rep.verdict = !res.converged ? "hypothesis_not_met" : (all_ok ? "consistent" : "violated");
    return rep;
}

// --------------------------------------------------------------- asymptotics

struct AsymptoticOptions {
    int nradii = 8;
    int count = 512;   // directions per gauge sphere average
    double tol = 0.03;
};

struct AsymptoticFit {
    double L_hat = 0.0;      // intercept of rho^k * mean u against (rho/R)^k
    double L_cap_pred = 0.0;  // radial prediction from the measured capacity
    std::vector<double> radii, phi;
};

inline AsymptoticFit asymptotic_constant(const SolveResult& res,
                                         const AsymptoticOptions& opts = {}) {
    const auto& field = res.widest();
    const Grid& g = *field.grid;
    const int N = g.dim;
    const double k = decay_exponent(N, res.p);
    auto dual = make_dual(res.norm);
    const auto dirs = direction_set(N, opts.count);

    AsymptoticFit fit;
    const double lo = 1.5 * res.r_hat, hi = 0.75 * g.R_out;
    require(hi > lo, "asymptotic_constant: truncation shell too tight");
    const auto view = exterior_field(field);
    Vec dhint;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (int j = 0; j < opts.nradii; ++j) {
        const double rho = lo * std::pow(hi / lo, j / static_cast<double>(opts.nradii - 1));
        double acc = 0.0;
        for (const auto& d : *dirs) {
            const double h0d = dual_eval(dual, d, &dhint);
            acc += sample_field(g, view, g.shell_center + (rho / h0d) * d);
        }
        const double phi = std::pow(rho, k) * acc / static_cast<double>(dirs->size());
        const double x = std::pow(rho / g.R_out, k);
        fit.radii.push_back(rho);
        fit.phi.push_back(phi);
        sx += x;
        sy += phi;
        sxx += x * x;
        sxy += x * phi;
    }
    const double n = static_cast<double>(opts.nradii);
    const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    fit.L_hat = (sy - slope * sx) / n;

    fit.L_cap_pred = std::pow(
        res.p * res.capacity / (std::pow(k, res.p - 1.0) * N * wulff_volume(res.norm)),
        1.0 / (res.p - 1.0));
    return fit;
}

/// Far-field law u ~ L * H0^(-k): asserts L against the exact value for Wulff
/// bodies (L = r^k); the capacity-based prediction is reported, not asserted.
inline TheoremReport check_asymptotic(const SolveResult& res, double L_expected,
                                      const AsymptoticOptions& opts = {},
                                      Json provenance = Json::Obj{}) {
    const auto fit = asymptotic_constant(res, opts);

    TheoremReport rep;
    rep.check = "asymptotic_constant";
    rep.measured["L_hat"] = fit.L_hat;
    rep.measured["L_expected"] = L_expected;
    rep.measured["L_cap_pred"] = fit.L_cap_pred;
    rep.measured["cap_pred_discrepancy"] =
        fit.L_cap_pred > 0 ? fit.L_hat / fit.L_cap_pred - 1.0 : 0.0;
    rep.measured["radii"] = Json(fit.radii);
    rep.measured["phi"] = Json(fit.phi);
    rep.tolerances["tol"] = opts.tol;
    rep.provenance = std::move(provenance);

    if (!res.converged) {
        rep.verdict = "hypothesis_not_met";
    } else if (L_expected > 0.0) {
        rep.verdict = std::abs(fit.L_hat / L_expected - 1.0) <= opts.tol ? "consistent" : "violated";
    } else {
        rep.verdict = "consistent";  // nothing asserted without a reference
    }
    return rep;
}

}  // namespace fcap
