#pragma once

// Uniform tensor grid over the truncated exterior domain: node classification
// (body Dirichlet / outer Dirichlet / unknown), a cached gauge field, and
// trilinear field sampling. The grid covers the outer Wulff shell
// { H0(x - c) <= R_out } with one cell of margin.

#include <cmath>
#include <cstdint>
#include <memory>
#include <vector>

#include "fcap/body.hpp"
#include "fcap/common.hpp"
#include "fcap/dual.hpp"

namespace fcap {

enum class NodeClass : uint8_t { free_unknown = 0, body = 1, outer = 2 };

struct Grid {
    int dim = 3;
    double h = 0.0;
    std::vector<int> shape;      // nodes per axis
    std::vector<int64_t> stride; // node id = sum_a idx[a] * stride[a]
    Vec origin;                  // position of node index (0, ..., 0)
    int64_t nnodes = 0;

    Vec shell_center;  // gauge origin of the outer Wulff shell
    double R_out = 0.0;
    double r_hat = 0.0;           // mean gauge radius of the body
    double gradient_scale = 0.0;  // s = 1/r_hat, the typical |Du| scale

    std::vector<uint8_t> cls;   // NodeClass per node
    std::vector<double> value;  // Dirichlet data and current iterate
    std::vector<double> h0;     // H0(x - shell_center) per node

    std::vector<int64_t> dof_node;  // dof -> node id
    std::vector<int64_t> node_dof;  // node id -> dof, -1 for Dirichlet nodes

    int64_t node_id(const std::vector<int>& idx) const {
        int64_t id = 0;
        for (int a = 0; a < dim; ++a) id += static_cast<int64_t>(idx[a]) * stride[a];
        return id;
    }

    void node_index(int64_t id, std::vector<int>& idx) const {
        idx.resize(dim);
        for (int a = 0; a < dim; ++a) idx[a] = static_cast<int>((id / stride[a]) % shape[a]);
    }

    Vec node_pos(int64_t id) const {
        Vec x = origin;
        for (int a = 0; a < dim; ++a)
            x[a] += h * static_cast<double>((id / stride[a]) % shape[a]);
        return x;
    }

    NodeClass node_class(int64_t id) const { return static_cast<NodeClass>(cls[id]); }
};

using GridPtr = std::shared_ptr<Grid>;

namespace detail {

/// True when the body's containment test reduces to the cached shell gauge
/// (a Wulff body of the same norm, concentric with the shell).
inline bool body_matches_shell_gauge(const ConvexBody& body, const DualNormHandle& dual,
                                     const Vec& shell_center) {
    return body.kind == ConvexBody::Kind::wulff && norms_equal(body.dual.base, dual.base) &&
           (body.center - shell_center).lpNorm<Eigen::Infinity>() <= 1e-14;
}

}  // namespace detail

/// Mean gauge radius of the body seen from `center` (the scale r of the
/// closest radial profile (H0/r)^(1/q)).
inline double mean_gauge_radius(const ConvexBody& body, const DualNormHandle& dual,
                                const Vec& center, int count = 256) {
    const auto dirs = direction_set(body.dim, count);
    double acc = 0.0;
    Vec bhint, dhint;
    for (const auto& d : *dirs)
        acc += dual_eval(dual, boundary_sample(body, d, &bhint) - center, &dhint);
    return acc / static_cast<double>(dirs->size());
}

/// Largest gauge value on the body boundary (circumradius in H0).
inline double circumradius_gauge(const ConvexBody& body, const DualNormHandle& dual,
                                 const Vec& center, int count = 256) {
    const auto dirs = direction_set(body.dim, count);
    double best = 0.0;
    Vec bhint, dhint;
    for (const auto& d : *dirs)
        best = std::max(best, dual_eval(dual, boundary_sample(body, d, &bhint) - center, &dhint));
    return best;
}

/// Builds the node grid for the domain between the body and the Wulff shell
/// of gauge radius R_out centered at the body's Steiner point. `resolution`
/// counts nodes across the widest axis of the shell. Dirichlet values: body
/// nodes 1, outer nodes 0; the truncation error this introduces is removed
/// by the annulus-law correction applied after the solve.
inline Grid build_grid(const ConvexBody& body, const DualNormHandle& dual, double R_out,
                       int resolution, int threads = 1) {
    require(resolution >= 16, "build_grid: resolution must be >= 16");
    const int dim = body.dim;
    require(dual.base.dim == dim, "build_grid: norm/body dimension mismatch");

    Grid g;
    g.dim = dim;
    g.shell_center = (body.kind == ConvexBody::Kind::support_samples)
                         ? body.center
                         : steiner_point(body);
    g.R_out = R_out;
    g.r_hat = mean_gauge_radius(body, dual, g.shell_center);
    const double body_circ = circumradius_gauge(body, dual, g.shell_center);
    require(body_circ < R_out, "build_grid: body not strictly inside the outer shell");
    g.gradient_scale = 1.0 / g.r_hat;

    // Shell extent along axis a is R_out * H(e_a); the widest axis carries
    // `resolution` nodes and fixes the (isotropic) spacing.
    Vec ext(dim);
    for (int a = 0; a < dim; ++a) {
        Vec e = Vec::Zero(dim);
        e[a] = 1.0;
        ext[a] = R_out * eval_norm(dual.base, e);
    }
    g.h = 2.0 * ext.maxCoeff() / static_cast<double>(resolution - 1);

    g.shape.resize(dim);
    g.stride.resize(dim);
    g.origin = g.shell_center;
    g.nnodes = 1;
    for (int a = 0; a < dim; ++a) {
        const int m = static_cast<int>(std::ceil(ext[a] / g.h + 1.01));
        g.shape[a] = 2 * m + 1;
        g.origin[a] -= m * g.h;
        g.stride[a] = (a == 0) ? 1 : g.stride[a - 1] * g.shape[a - 1];
        g.nnodes *= g.shape[a];
    }

    g.cls.assign(g.nnodes, 0);
    g.value.assign(g.nnodes, 0.0);
    g.h0.assign(g.nnodes, 0.0);

    const bool shell_gauge_body = detail::body_matches_shell_gauge(body, dual, g.shell_center);

    // Classify line by line (fastest axis contiguous) so the generic dual
    // evaluations can warm-start from the previous node.
    const int64_t line_len = g.shape[0];
    const int64_t nlines = g.nnodes / line_len;
    parallel_for_chunks(nlines, threads, [&](int64_t lb, int64_t le, int) {
        Vec shell_hint, body_hint;
        for (int64_t line = lb; line < le; ++line) {
            const int64_t base = line * line_len;
            for (int64_t i = 0; i < line_len; ++i) {
                const int64_t id = base + i;
                const Vec x = g.node_pos(id);
                const double hv = dual_eval(dual, x - g.shell_center, &shell_hint);
                g.h0[id] = hv;
                bool in_body;
                if (shell_gauge_body) {
                    in_body = hv <= body.radius;
                } else {
                    // Nodes beyond the body's circumradius (plus slack for the
                    // anchor offset) skip the exact gauge test.
                    in_body = hv <= body_circ + 2.0 * g.h &&
                              detail::gauge_offset(body, x - body.center, &body_hint) <= 1.0;
                }
                if (in_body) {
                    g.cls[id] = static_cast<uint8_t>(NodeClass::body);
                    g.value[id] = 1.0;
                } else if (hv >= R_out) {
                    g.cls[id] = static_cast<uint8_t>(NodeClass::outer);
                } else {
                    g.cls[id] = static_cast<uint8_t>(NodeClass::free_unknown);
                }
            }
        }
    });

    g.node_dof.assign(g.nnodes, -1);
    for (int64_t id = 0; id < g.nnodes; ++id) {
        if (g.node_class(id) == NodeClass::free_unknown) {
            g.node_dof[id] = static_cast<int64_t>(g.dof_node.size());
            g.dof_node.push_back(id);
        }
    }
    require(!g.dof_node.empty(), "build_grid: no unknowns between body and shell");
    return g;
}

/// Trilinear interpolation of the node value field (which carries the
/// Dirichlet extension: 1 inside the body, BC values beyond the shell).
inline double sample_field(const Grid& g, const std::vector<double>& value, const Vec& x) {
    const int dim = g.dim;
    int64_t base = 0;
    double w[8 * 8];  // per-axis weights, dim <= 8
    require(dim <= 8, "sample_field: dimension cap exceeded");
    for (int a = 0; a < dim; ++a) {
        double t = (x[a] - g.origin[a]) / g.h;
        t = std::min(std::max(t, 0.0), static_cast<double>(g.shape[a] - 1) - 1e-12);
        const int i = static_cast<int>(t);
        base += static_cast<int64_t>(i) * g.stride[a];
        w[a * 8] = t - i;
    }
    double acc = 0.0;
    const int corners = 1 << dim;
    for (int c = 0; c < corners; ++c) {
        double wt = 1.0;
        int64_t id = base;
        for (int a = 0; a < dim; ++a) {
            if (c & (1 << a)) {
                wt *= w[a * 8];
                id += g.stride[a];
            } else {
                wt *= 1.0 - w[a * 8];
            }
        }
        acc += wt * value[id];
    }
    return acc;
}

}  // namespace fcap
