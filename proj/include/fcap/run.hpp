#pragma once

// Run configuration shared by the CLI subcommands: validated parameters,
// thread-count resolution, and the provenance / manifest blocks embedded in
// every report so a run can be reproduced byte for byte.

#include <cstdlib>
#include <string>
#include <vector>

#include "fcap/radial.hpp"
#include "fcap/report.hpp"
#include "fcap/solve.hpp"
#include "fcap/spec_parse.hpp"

namespace fcap {

struct RunConfig {
    int dim = 3;
    double p = 2.0;
    std::string norm = "euclidean";
    std::string body = "wulff:1";
    int resolution = 64;
    std::vector<double> radius_factors{4.0, 6.0};
    int threads = 0;  // 0: resolve from FCAP_THREADS, default 1
    uint64_t seed = seeds::kDefaultAnalysis;

    void validate() const {
        require(dim >= 3, "config: dimension must be >= 3");
        require(1.0 < p && p < static_cast<double>(dim), "config: need 1 < p < dim");
        require(resolution >= 16, "config: resolution must be >= 16");
        require(!radius_factors.empty(), "config: need at least one radius factor");
        double prev = 0.0;
        for (double f : radius_factors) {
            require(f > prev, "config: radius factors must be positive and increasing");
            prev = f;
        }
    }
};

/// Thread count for a run: an explicit setting wins, otherwise FCAP_THREADS,
/// otherwise single-threaded.
inline int resolve_threads(int requested = 0) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("FCAP_THREADS")) {
        const int n = std::atoi(env);
        if (n > 0) return n;
    }
    return 1;
}

inline SolveOptions solve_options(const RunConfig& cfg) {
    SolveOptions o;
    o.resolution = cfg.resolution;
    o.radius_factors = cfg.radius_factors;
    o.threads = resolve_threads(cfg.threads);
    return o;
}

inline Json provenance_json(const RunConfig& cfg) {
    Json j;
    j["version"] = std::string(kVersion);
    j["dim"] = cfg.dim;
    j["p"] = cfg.p;
    j["norm"] = cfg.norm;
    j["body"] = cfg.body;
    j["resolution"] = cfg.resolution;
    j["radius_factors"] = Json(cfg.radius_factors);
    j["threads"] = resolve_threads(cfg.threads);
    j["seed"] = static_cast<int64_t>(cfg.seed);
    return j;
}

/// Manifest for a completed solve: configuration echo plus the quantities
/// later stages depend on (q, r_hat, per-shell capacities, diagnostics).
inline Json manifest_json(const RunConfig& cfg, const SolveResult& res, double seconds) {
    Json j = provenance_json(cfg);
    j["q"] = res.q;
    j["decay_exponent"] = decay_exponent(cfg.dim, res.p);
    j["capacity"] = res.capacity;
    j["r_hat"] = res.r_hat;
    j["L_hat"] = res.L_hat;
    j["gamma_hat"] = res.gamma_hat;
    j["converged"] = res.converged;
    j["seconds"] = seconds;
    Json::Arr shells;
    for (const auto& f : res.fields) {
        Json s;
        s["R_out"] = f.R_out;
        s["capacity"] = f.capacity;
        s["iterations"] = f.stats.iterations;
        s["converged"] = f.stats.converged;
        s["grad_sup"] = f.stats.grad_sup;
        s["truncation_y"] = f.truncation_y;
        s["eps_final"] = f.stats.eps_final;
        s["nodes"] = static_cast<int64_t>(f.grid->nnodes);
        s["unknowns"] = static_cast<int64_t>(f.grid->dof_node.size());
        s["h"] = f.grid->h;
        shells.push_back(std::move(s));
    }
    j["shells"] = Json(std::move(shells));
    return j;
}

}  // namespace fcap
