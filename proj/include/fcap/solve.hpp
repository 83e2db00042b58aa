#pragma once

// Capacitary potential solver: preconditioned nonlinear conjugate gradients on
// the discrete energy, epsilon-continuation for degenerate exponents, outer
// truncation at a list of shell radii with Richardson extrapolation of the
// capacity in R^(1/q), q the radial concavity exponent.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <memory>
#include <vector>

#include "fcap/body.hpp"
#include "fcap/energy.hpp"
#include "fcap/grid.hpp"
#include "fcap/radial.hpp"

namespace fcap {

struct SolveOptions {
    int resolution = 64;                       // nodes across the smallest shell
    std::vector<double> radius_factors{4.0, 6.0};  // R_out = factor * circumradius
    bool scale_resolution_with_radius = true;  // keep h equal across the radius list
    std::vector<double> eps_factors{};  // continuation ladder * gradient scale; auto if empty
    int threads = 1;
    double grad_sup_tol = 1e-7;
    double energy_rel_tol = 1e-9;  // trailing-window relative decrease
    int energy_window = 10;
    double iter_cap_factor = 20.0;  // cap = factor * sqrt(ndofs)
    bool cascade_init = false;  // also try a half-resolution solve as the initial guess
};

struct SolveStats {
    int iterations = 0;
    bool converged = false;
    double grad_sup = 0.0;
    double eps_final = 0.0;
    std::vector<std::vector<double>> stage_histories;  // per continuation stage
};

struct FieldSolve {
    GridPtr grid;  // grid->value holds the solution with its Dirichlet extension
    double R_out = 0.0;
    double capacity = 0.0;      // truncated-domain energy at eps = 0
    double truncation_y = 0.0;  // monopole shell weight (L_hat / R_out)^k
    SolveStats stats;
};

struct SolveResult {
    NormSpec norm;
    double p = 2.0;
    double capacity = 0.0;  // corrected and extrapolated to R -> infinity
    double r_hat = 0.0;
    double L_hat = 0.0;  // far-field Wulff radius implied by the capacity
    Vec center;
    double q = 0.0;          // -(p-1)/(N-p)
    double gamma_hat = 0.0;  // radial-likeness bound from the widest field
    int threads = 1;
    bool converged = false;
    std::vector<FieldSolve> fields;  // ascending R_out

    const FieldSolve& widest() const { return fields.back(); }
};

/// Exterior-equivalent reading of a truncated zero-data field: the affine map
/// u -> (1 - y) u + y undoes the shell's monopole effect (exact for Wulff
/// bodies, leading order otherwise). Nodes beyond the shell read y.
inline std::vector<double> exterior_field(const FieldSolve& f) {
    const double y = f.truncation_y;
    std::vector<double> out(f.grid->value.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = (1.0 - y) * f.grid->value[i] + y;
    return out;
}

namespace detail {

struct NcgOutcome {
    int iters = 0;
    bool converged = false;
    double grad_sup = 0.0;
    double energy = 0.0;
};

/// Minimizes the energy over the free nodes of grid->value in place.
/// Deterministic for a fixed thread count; the energy history is strictly
/// non-increasing (Armijo line search accepts only decreases).
inline NcgOutcome minimize_ncg(const EnergyModel& M, std::vector<double>& value, double eps,
                               const SolveOptions& opts, std::vector<double>& history) {
    const auto& dofs = M.grid->dof_node;
    const int64_t nd = static_cast<int64_t>(dofs.size());
    const int64_t max_iters =
        static_cast<int64_t>(opts.iter_cap_factor * std::sqrt(static_cast<double>(nd))) + 10;

    std::vector<double> x(nd), g(nd), diag(nd), z(nd), zp, gp, dir(nd, 0.0);
    for (int64_t i = 0; i < nd; ++i) x[i] = value[dofs[i]];

    auto scatter = [&](const std::vector<double>& v) {
        for (int64_t i = 0; i < nd; ++i) value[dofs[i]] = v[i];
    };

    NcgOutcome out;
    double E = M.energy_grad(value, eps, g, &diag, opts.threads);
    history.push_back(E);

    double gz_prev = 0.0;
    double t_start = 1.0;
    std::vector<double> xt(nd);

    for (int64_t it = 0; it < max_iters; ++it) {
        double dmax = 0.0;
        for (int64_t i = 0; i < nd; ++i) dmax = std::max(dmax, diag[i]);
        const double floor = std::max(dmax * 1e-8, 1e-300);
        double gz = 0.0, gzp = 0.0;
        for (int64_t i = 0; i < nd; ++i) {
            z[i] = g[i] / std::max(diag[i], floor);
            gz += g[i] * z[i];
            if (!zp.empty()) gzp += g[i] * zp[i];
        }

        double beta = 0.0;
        if (!zp.empty() && gz_prev > 0.0) beta = std::max(0.0, (gz - gzp) / gz_prev);
        double gd = 0.0;
        for (int64_t i = 0; i < nd; ++i) {
            dir[i] = -z[i] + beta * dir[i];
            gd += g[i] * dir[i];
        }
        if (gd >= 0.0) {  // restart on a non-descent combination
            gd = -gz;
            for (int64_t i = 0; i < nd; ++i) dir[i] = -z[i];
        }

        double t = t_start;
        bool accepted = false;
        double Et = E;
        for (int bt = 0; bt < 40; ++bt) {
            for (int64_t i = 0; i < nd; ++i) xt[i] = x[i] + t * dir[i];
            scatter(xt);
            Et = M.energy(value, eps, opts.threads);
            if (Et <= E + 1e-4 * t * gd) {
                accepted = true;
                break;
            }
            t *= 0.5;
        }
        if (!accepted) {
            scatter(x);  // restore the last accepted iterate
            out.converged = true;
            break;
        }
        x.swap(xt);
        t_start = std::min(2.0 * t, 4.0);

        zp = z;
        gz_prev = gz;
        E = M.energy_grad(value, eps, g, &diag, opts.threads);
        history.push_back(E);
        ++out.iters;

        double gsup = 0.0;
        for (int64_t i = 0; i < nd; ++i) gsup = std::max(gsup, std::abs(g[i]));
        out.grad_sup = gsup;
        if (gsup < opts.grad_sup_tol) {
            out.converged = true;
            break;
        }
        const int w = opts.energy_window;
        if (static_cast<int>(history.size()) > w) {
            const double Eold = history[history.size() - 1 - w];
            if (Eold - E < opts.energy_rel_tol * std::max(std::abs(E), 1e-300)) {
                out.converged = true;
                break;
            }
        }
    }
    out.energy = E;
    return out;
}

inline std::vector<double> continuation_ladder(double p, double grad_scale,
                                               const std::vector<double>& factors) {
    if (!factors.empty()) {
        std::vector<double> eps;
        for (double f : factors) eps.push_back(f * grad_scale);
        return eps;
    }
    if (p < 2.0) return {1e-2 * grad_scale, 1e-3 * grad_scale, 1e-4 * grad_scale};
    return {0.0};
}

/// Radial-likeness diagnostic: spread of H(Du) * H0^(1+k) against the exact
/// radial value k * r^k over the band 1.5 r <= H0 <= 0.7 R.
inline double gamma_hat(const Grid& g, const std::vector<double>& value, const NormSpec& norm,
                        double k_decay) {
    const double lo = 1.5 * g.r_hat, hi = 0.7 * g.R_out;
    const double ref = k_decay * std::pow(g.r_hat, k_decay);
    double rmin = std::numeric_limits<double>::infinity(), rmax = 0.0;
    Vec du(g.dim);
    for (int64_t dof = 0; dof < static_cast<int64_t>(g.dof_node.size()); ++dof) {
        const int64_t id = g.dof_node[dof];
        const double h0v = g.h0[id];
        if (h0v < lo || h0v > hi) continue;
        for (int a = 0; a < g.dim; ++a)
            du[a] = (value[id + g.stride[a]] - value[id - g.stride[a]]) / (2.0 * g.h);
        if (du.squaredNorm() == 0.0) continue;
        const double rho = eval_norm(norm, du) * std::pow(h0v, 1.0 + k_decay) / ref;
        rmin = std::min(rmin, rho);
        rmax = std::max(rmax, rho);
    }
    if (!(rmin > 0.0) || rmax == 0.0) return std::numeric_limits<double>::infinity();
    return std::max(rmax, 1.0 / rmin);
}

struct StageRun {
    SolveStats stats;
    double capacity = 0.0;
};

/// Runs the continuation ladder on one grid whose Dirichlet data is already
/// set, then reads the truncated capacity at eps = 0.
inline StageRun run_stages(const EnergyModel& M, Grid& grid, double p, const SolveOptions& opts) {
    StageRun run;
    const auto ladder = continuation_ladder(p, grid.gradient_scale, opts.eps_factors);
    bool all_ok = true;
    for (double eps : ladder) {
        std::vector<double> hist;
        const auto out = minimize_ncg(M, grid.value, eps, opts, hist);
        run.stats.iterations += out.iters;
        run.stats.grad_sup = out.grad_sup;
        run.stats.eps_final = eps;
        run.stats.stage_histories.push_back(std::move(hist));
        all_ok = all_ok && out.converged;
    }
    run.stats.converged = all_ok;
    run.capacity = M.energy(grid.value, 0.0, opts.threads);
    return run;
}

constexpr int kCascadeFloor = 24;  // coarsest shell resolution worth solving

struct ShellSolve {
    GridPtr grid;
    StageRun run;
};

/// Solves one truncation shell (u = 1 on the body, u = 0 on the Wulff shell).
/// Initialization picks the lower-energy of two candidates: the radial
/// annulus profile (exact for Wulff bodies) and, when the resolution allows,
/// an interpolated half-resolution solve of the same shell (better for bodies
/// far from the norm's Wulff shape).
inline ShellSolve solve_shell(const ConvexBody& body, const NormSpec& norm,
                              const DualNormHandle& dual, double p, double k_decay, double R_out,
                              int res, const SolveOptions& opts) {
    ShellSolve out;
    out.grid = std::make_shared<Grid>(build_grid(body, dual, R_out, res, opts.threads));
    Grid& grid = *out.grid;
    const double rh = grid.r_hat;

    ShellSolve coarse;
    int carried_iters = 0;
    const bool cascade = opts.cascade_init && res >= 2 * kCascadeFloor;
    if (cascade) {
        coarse = solve_shell(body, norm, dual, p, k_decay, R_out, res / 2, opts);
        carried_iters = coarse.run.stats.iterations;
    }

    const auto model = make_energy_model(grid, body, norm, p, /*stretch_outer=*/true,
                                         opts.threads);
    const double eps0 = continuation_ladder(p, grid.gradient_scale, opts.eps_factors).front();

    for (int64_t id = 0; id < grid.nnodes; ++id) {
        if (grid.node_class(id) != NodeClass::free_unknown) continue;  // body 1, outer 0
        grid.value[id] =
            std::max(0.0, annulus_profile(grid.dim, p, rh, R_out, std::max(grid.h0[id], rh)));
    }
    if (cascade) {
        const double E_profile = model.energy(grid.value, eps0, opts.threads);
        std::vector<double> profile = grid.value;
        for (int64_t id = 0; id < grid.nnodes; ++id) {
            if (grid.node_class(id) != NodeClass::free_unknown) continue;
            grid.value[id] = std::clamp(
                sample_field(*coarse.grid, coarse.grid->value, grid.node_pos(id)), 0.0, 1.0);
        }
        if (E_profile < model.energy(grid.value, eps0, opts.threads)) grid.value = std::move(profile);
    }
    coarse.grid.reset();

    out.run = run_stages(model, grid, p, opts);
    out.run.stats.iterations += carried_iters;
    return out;
}

}  // namespace detail

/// Exterior capacitary potential of `body` for the norm's Dirichlet energy:
/// u = 1 on the body, u = 0 on Wulff shells R_out = factor * circumradius.
/// Each truncated energy obeys Cap_R = Cap_inf (1 - (L/R_out)^k)^(1-p) to
/// monopole order, where L is the far-field Wulff radius; L is iterated from
/// the capacity itself, the corrected energies are extrapolated linearly in
/// R^(-k), and the fixed point is exact for Wulff bodies.
inline SolveResult solve_exterior(const ConvexBody& body, const NormSpec& norm, double p,
                                  const SolveOptions& opts = {}) {
    const int N = body.dim;
    require(1.0 < p && p < static_cast<double>(N), "solve_exterior: need 1 < p < dim");
    const double k_decay = decay_exponent(N, p);
    auto dual = make_dual(norm);

    std::vector<double> factors = opts.radius_factors;
    require(!factors.empty(), "solve_exterior: need at least one radius factor");
    std::sort(factors.begin(), factors.end());

    SolveResult res;
    res.norm = norm;
    res.p = p;
    res.q = -1.0 / k_decay;
    res.threads = opts.threads;
    res.converged = true;

    const Vec center = (body.kind == ConvexBody::Kind::support_samples) ? body.center
                                                                        : steiner_point(body);
    const double circ = circumradius_gauge(body, dual, center);

    for (std::size_t k = 0; k < factors.size(); ++k) {
        const double R_out = factors[k] * circ;
        int res_k = opts.resolution;
        if (opts.scale_resolution_with_radius && k > 0)
            res_k = static_cast<int>(
                std::lround((opts.resolution - 1) * factors[k] / factors[0])) + 1;

        auto shell = detail::solve_shell(body, norm, dual, p, k_decay, R_out, res_k, opts);

        FieldSolve fs;
        fs.grid = shell.grid;
        fs.R_out = R_out;
        fs.capacity = shell.run.capacity;
        fs.stats = shell.run.stats;
        res.converged = res.converged && shell.run.stats.converged;
        res.fields.push_back(std::move(fs));
    }

    res.r_hat = res.fields.front().grid->r_hat;
    res.center = res.fields.front().grid->shell_center;

    // Annulus-law correction and extrapolation. The unit capacity ties L to
    // Cap through Cap(Wulff_L) = L^(N-p) Cap(Wulff_1).
    const double cap_unit = radial_capacity(norm, p, 1.0);
    double L = res.r_hat;
    for (int pass = 0; pass < 4; ++pass) {
        double cap;
        if (res.fields.size() == 1) {
            const auto& f = res.fields[0];
            cap = f.capacity * std::pow(1.0 - std::pow(L / f.R_out, k_decay), p - 1.0);
        } else {
            double sy = 0, sc = 0, syy = 0, syc = 0;
            const double n = static_cast<double>(res.fields.size());
            for (const auto& f : res.fields) {
                const double y = std::pow(f.R_out, -k_decay);
                const double corr =
                    f.capacity * std::pow(1.0 - std::pow(L / f.R_out, k_decay), p - 1.0);
                sy += y;
                sc += corr;
                syy += y * y;
                syc += y * corr;
            }
            const double slope = (n * syc - sy * sc) / (n * syy - sy * sy);
            cap = (sc - slope * sy) / n;
        }
        res.capacity = cap;
        L = std::pow(std::max(cap, 1e-300) / cap_unit, 1.0 / (N - p));
    }
    res.L_hat = L;
    for (auto& f : res.fields) f.truncation_y = std::pow(L / f.R_out, k_decay);

    const auto wide_view = exterior_field(res.widest());
    res.gamma_hat = detail::gamma_hat(*res.widest().grid, wide_view, norm, k_decay);
    return res;
}

/// Annulus potential: u = 1 on the body, u = 0 on the Wulff shell of gauge
/// radius R_out (imposed on the exact shell through shortened edges). The
/// capacity is the truncated energy itself, no extrapolation.
inline SolveResult solve_annulus(const ConvexBody& body, const NormSpec& norm, double p,
                                 double R_out, const SolveOptions& opts = {}) {
    const int N = body.dim;
    require(1.0 < p && p < static_cast<double>(N), "solve_annulus: need 1 < p < dim");
    const double k_decay = decay_exponent(N, p);
    auto dual = make_dual(norm);

    SolveResult res;
    res.norm = norm;
    res.p = p;
    res.q = -1.0 / k_decay;
    res.threads = opts.threads;

    auto shell = detail::solve_shell(body, norm, dual, p, k_decay, R_out, opts.resolution, opts);

    FieldSolve fs;
    fs.grid = shell.grid;
    fs.R_out = R_out;
    fs.capacity = shell.run.capacity;
    fs.stats = shell.run.stats;
    res.converged = shell.run.stats.converged;
    res.capacity = shell.run.capacity;
    res.fields.push_back(std::move(fs));
    res.r_hat = res.fields[0].grid->r_hat;
    res.center = res.fields[0].grid->shell_center;
    res.gamma_hat =
        detail::gamma_hat(*res.fields[0].grid, res.fields[0].grid->value, norm, k_decay);
    return res;
}

}  // namespace fcap
