#pragma once

// Discrete anisotropic Dirichlet energy on grid cells: the multilinear
// element with vertex quadrature. Each cell corner contributes the gradient
// assembled from its incident cell edges, so pure oscillation modes carry
// energy (a single averaged cell gradient would annihilate them). Cells cut
// by a Dirichlet interface shorten the crossing edges to the interface
// (one-sided differences against the boundary value) and carry their
// subcell-sampled free volume.

#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <vector>

#include "fcap/body.hpp"
#include "fcap/common.hpp"
#include "fcap/grid.hpp"

namespace fcap {

namespace detail {

constexpr double kMinEdgeFraction = 0.05;  // cut-edge length floor, in cells

struct EuclidOps {
    int dim;
    double hsq(const double* g) const {
        double s = 0.0;
        for (int a = 0; a < dim; ++a) s += g[a] * g[a];
        return s;
    }
    void hdh(const double* g, double* m) const {
        for (int a = 0; a < dim; ++a) m[a] = g[a];
    }
};

struct EllipsoidOps {
    int dim;
    Mat A;
    double hsq(const double* g) const {
        double s = 0.0;
        for (int i = 0; i < dim; ++i) {
            double r = 0.0;
            for (int j = 0; j < dim; ++j) r += A(i, j) * g[j];
            s += r * g[i];
        }
        return s;
    }
    void hdh(const double* g, double* m) const {
        for (int i = 0; i < dim; ++i) {
            double r = 0.0;
            for (int j = 0; j < dim; ++j) r += A(i, j) * g[j];
            m[i] = r;
        }
    }
};

struct LqOps {
    int dim;
    double q, delta;
    // H^q = S = sum_i w_i^(q/2), w_i = g_i^2 + delta |g|^2.
    double hsq(const double* g) const {
        double r2 = 0.0;
        for (int a = 0; a < dim; ++a) r2 += g[a] * g[a];
        if (r2 == 0.0) return 0.0;
        double S = 0.0;
        for (int a = 0; a < dim; ++a) S += std::pow(g[a] * g[a] + delta * r2, 0.5 * q);
        return std::pow(S, 2.0 / q);
    }
    // H grad H = S^(2/q - 1) * (w_j^(q/2-1) g_j + delta g_j T), T = sum w^(q/2-1).
    void hdh(const double* g, double* m) const {
        double r2 = 0.0;
        for (int a = 0; a < dim; ++a) r2 += g[a] * g[a];
        if (r2 == 0.0) {
            for (int a = 0; a < dim; ++a) m[a] = 0.0;
            return;
        }
        double S = 0.0, T = 0.0;
        std::array<double, 8> wq{};
        for (int a = 0; a < dim; ++a) {
            const double w = g[a] * g[a] + delta * r2;
            const double wh = pow_guarded(w, 0.5 * q - 1.0);
            wq[a] = wh;
            S += wh * w;  // w^(q/2)
            T += wh;
        }
        const double scale = std::pow(S, 2.0 / q - 1.0);
        for (int a = 0; a < dim; ++a) m[a] = scale * (wq[a] * g[a] + delta * g[a] * T);
    }
};

}  // namespace detail

/// Interface crossing along a grid edge: fraction in (0,1) measured from the
/// inner (Dirichlet) endpoint toward the outer one.
using CrossFn = std::function<double(int64_t inner, int64_t outer)>;

/// Free-phase volume fraction of an interface cell (base node id, which
/// Dirichlet phases its corners touch). Return a negative value to fall back
/// to the edge-fraction average.
using VolFn = std::function<double(int64_t base, bool has_inner, bool has_outer)>;

struct EnergyModel {
    const Grid* grid = nullptr;
    NormSpec norm;
    double p = 2.0;

    int dim = 0, corners = 0, epa = 0;  // epa: edges per axis = 2^(dim-1)
    double inv_h = 0.0, cell_vol = 0.0;
    std::vector<int64_t> corner_off;  // node-id offset of each cell corner
    std::vector<int> ec0, ec1;        // corner indices of edge endpoints, axis-major
    std::vector<int> corner_edge;     // edge id incident to corner c along axis a
    std::vector<double> axis_h2;      // H(e_a)^2, Jacobi scaling per axis

    std::vector<int64_t> regular;  // base ids of full interior cells
    std::vector<int64_t> bbase;    // base ids of interface cells
    std::vector<double> bvol;      // absolute volume of interface cells
    std::vector<double> binv;      // per-edge inverse lengths, bbase-major

    int64_t ndofs() const { return static_cast<int64_t>(grid->dof_node.size()); }

    double energy(const std::vector<double>& value, double eps, int threads) const;
    double energy_grad(const std::vector<double>& value, double eps, std::vector<double>& grad,
                       std::vector<double>* diag, int threads) const;

    template <class Ops, bool WithGrad>
    double pass(const Ops& ops, const double* value, double eps_sq, double* grad, double* diag,
                int threads) const;
};

namespace detail {

/// Subcell lattice sampling of an interface cell's free-phase volume: body
/// membership evaluated exactly, shell membership from trilinear
/// interpolation of the cached corner gauges (second order in h, and free of
/// dual-norm evaluations). Returns the free fraction in [0,1].
inline double sampled_free_fraction(const Grid& g, const ConvexBody* body, int64_t base,
                                    bool check_body, bool check_shell) {
    const int dim = g.dim;
    const int m = dim <= 3 ? 4 : 2;  // lattice points per axis
    int npts = 1;
    for (int a = 0; a < dim; ++a) npts *= m;

    std::array<double, 64> h0c{};
    if (check_shell)
        for (int c = 0; c < (1 << dim); ++c) {
            int64_t id = base;
            for (int a = 0; a < dim; ++a)
                if (c & (1 << a)) id += g.stride[a];
            h0c[c] = g.h0[id];
        }

    const Vec lo = g.node_pos(base);
    thread_local Vec hint;
    Vec x(dim);
    std::array<double, 8> th{};
    int inside = 0;
    for (int j = 0; j < npts; ++j) {
        int rem = j;
        for (int a = 0; a < dim; ++a) {
            th[a] = (static_cast<double>(rem % m) + 0.5) / static_cast<double>(m);
            rem /= m;
        }
        bool free = true;
        if (check_shell) {
            double h0 = 0.0;
            for (int c = 0; c < (1 << dim); ++c) {
                double w = 1.0;
                for (int a = 0; a < dim; ++a) w *= (c & (1 << a)) ? th[a] : 1.0 - th[a];
                h0 += w * h0c[c];
            }
            free = h0 < g.R_out;
        }
        if (free && check_body) {
            for (int a = 0; a < dim; ++a) x[a] = lo[a] + g.h * th[a];
            free = gauge_offset(*body, x - body->center, &hint) > 1.0;
        }
        inside += free;
    }
    return static_cast<double>(inside) / static_cast<double>(npts);
}

/// Phase codes for cell assembly: 0 unknown, 1 inner Dirichlet, 2 outer Dirichlet.
inline void build_cells(const Grid& g, const uint8_t* phase, const CrossFn& inner_cross,
                        const VolFn& free_volume, bool stretch_outer, EnergyModel& M,
                        int threads) {
    const int dim = g.dim;
    require(dim >= 2 && dim <= 6, "build_cells: dimension out of range");
    M.grid = &g;
    M.dim = dim;
    M.corners = 1 << dim;
    M.epa = M.corners / 2;
    M.inv_h = 1.0 / g.h;
    M.cell_vol = std::pow(g.h, dim);

    M.corner_off.assign(M.corners, 0);
    for (int c = 0; c < M.corners; ++c)
        for (int a = 0; a < dim; ++a)
            if (c & (1 << a)) M.corner_off[c] += g.stride[a];

    M.ec0.clear();
    M.ec1.clear();
    M.corner_edge.assign(static_cast<std::size_t>(M.corners) * dim, -1);
    for (int a = 0; a < dim; ++a)
        for (int c = 0; c < M.corners; ++c)
            if (!(c & (1 << a))) {
                const int e = static_cast<int>(M.ec0.size());
                M.ec0.push_back(c);
                M.ec1.push_back(c | (1 << a));
                M.corner_edge[static_cast<std::size_t>(c) * dim + a] = e;
                M.corner_edge[static_cast<std::size_t>(c | (1 << a)) * dim + a] = e;
            }

    M.axis_h2.resize(dim);
    for (int a = 0; a < dim; ++a) {
        Vec e = Vec::Zero(dim);
        e[a] = 1.0;
        M.axis_h2[a] = sq(eval_norm(M.norm, e));
    }

    // Cells are enumerated by base node over lines of the fastest axis.
    const int64_t cells_per_line = g.shape[0] - 1;
    int64_t nlines = 1;
    for (int a = 1; a < dim; ++a) nlines *= g.shape[a] - 1;

    const int nedges = dim * M.epa;
    struct Part {
        std::vector<int64_t> regular, bbase;
        std::vector<double> bvol, binv;
    };
    const int nchunks = (threads <= 1 || nlines * cells_per_line < 2048) ? 1 : threads;
    std::vector<Part> parts(nchunks);

    parallel_for_chunks(nlines, threads, [&](std::size_t lb, std::size_t le, int chunk) {
        Part& P = parts[chunk];
        std::vector<int> idx(dim);
        std::array<uint8_t, 64> ph{};
        std::array<double, 64> edge_inv{};
        for (std::size_t line = lb; line < le; ++line) {
            // Decode the line into a base index with idx[0] = 0.
            int64_t rem = static_cast<int64_t>(line);
            int64_t base0 = 0;
            for (int a = 1; a < dim; ++a) {
                idx[a] = static_cast<int>(rem % (g.shape[a] - 1));
                rem /= g.shape[a] - 1;
                base0 += idx[a] * g.stride[a];
            }
            for (int64_t i = 0; i < cells_per_line; ++i) {
                const int64_t base = base0 + i;
                int nfree = 0, ninner = 0;
                for (int c = 0; c < M.corners; ++c) {
                    ph[c] = phase[base + M.corner_off[c]];
                    nfree += ph[c] == 0;
                    ninner += ph[c] == 1;
                }
                if (nfree == 0) continue;
                if (nfree == M.corners) {
                    P.regular.push_back(base);
                    continue;
                }
                double frac_sum = 0.0;
                for (int e = 0; e < nedges; ++e) {
                    const int64_t n0 = base + M.corner_off[M.ec0[e]];
                    const int64_t n1 = base + M.corner_off[M.ec1[e]];
                    const uint8_t p0 = ph[M.ec0[e]], p1 = ph[M.ec1[e]];
                    double frac = 0.0, inv = 0.0;
                    if (p0 == 0 && p1 == 0) {
                        frac = 1.0;
                        inv = M.inv_h;
                    } else if ((p0 == 0 && p1 == 1) || (p0 == 1 && p1 == 0)) {
                        const int64_t inner = p0 == 1 ? n0 : n1;
                        const int64_t outer = p0 == 1 ? n1 : n0;
                        const double s =
                            std::min(1.0, std::max(kMinEdgeFraction, 1.0 - inner_cross(inner, outer)));
                        frac = s;
                        inv = M.inv_h / s;
                    } else if ((p0 == 0 && p1 == 2) || (p0 == 2 && p1 == 0)) {
                        // Shell crossing from the cached gauge, linear along the edge.
                        const int64_t fn = p0 == 0 ? n0 : n1;
                        const int64_t on = p0 == 0 ? n1 : n0;
                        const double denom = g.h0[on] - g.h0[fn];
                        double s = denom > 0 ? (g.R_out - g.h0[fn]) / denom : 1.0;
                        s = std::min(1.0, std::max(kMinEdgeFraction, s));
                        frac = s;
                        inv = stretch_outer ? M.inv_h / s : M.inv_h;
                    } else if (p0 == 2 && p1 == 2) {
                        // Both values are Dirichlet data; keeps the cell gradient
                        // consistent when the BC field is a smooth continuation.
                        inv = M.inv_h;
                    }
                    // inner-inner and inner-outer edges stay zero: both endpoints
                    // carry the interface value, no length inside the domain.
                    frac_sum += frac;
                    edge_inv[e] = inv;
                }
                double vfrac = -1.0;
                if (free_volume)
                    vfrac = free_volume(base, ninner > 0, M.corners - nfree - ninner > 0);
                // Sliver cells sampled at zero keep the edge-average volume so
                // no free node loses its entire energy footprint.
                if (vfrac <= 0.0) vfrac = frac_sum / static_cast<double>(nedges);
                P.bbase.push_back(base);
                P.bvol.push_back(M.cell_vol * vfrac);
                for (int e = 0; e < nedges; ++e) P.binv.push_back(edge_inv[e]);
            }
        }
    });

    M.regular.clear();
    M.bbase.clear();
    M.bvol.clear();
    M.binv.clear();
    for (const auto& P : parts) {
        M.regular.insert(M.regular.end(), P.regular.begin(), P.regular.end());
        M.bbase.insert(M.bbase.end(), P.bbase.begin(), P.bbase.end());
        M.bvol.insert(M.bvol.end(), P.bvol.begin(), P.bvol.end());
        M.binv.insert(M.binv.end(), P.binv.begin(), P.binv.end());
    }
}

}  // namespace detail

/// Assembles the energy model for the solve domain: body nodes are the inner
/// Dirichlet phase (crossings located exactly on the body boundary), outer
/// nodes the truncation phase. `stretch_outer` shortens shell-cut edges so a
/// zero shell value is imposed on the exact shell, not the node staircase;
/// leave it off when the outer values continue smoothly past the shell.
inline EnergyModel make_energy_model(const Grid& g, const ConvexBody& body, const NormSpec& norm,
                                     double p, bool stretch_outer, int threads = 1) {
    require(1.0 < p && p < static_cast<double>(g.dim), "make_energy_model: need 1 < p < dim");
    EnergyModel M;
    M.norm = norm;
    M.p = p;
    detail::build_cells(
        g, g.cls.data(),
        [&g, &body](int64_t inner, int64_t outer) {
            thread_local Vec hint;
            return boundary_crossing(body, g.node_pos(inner), g.node_pos(outer), &hint);
        },
        [&g, &body](int64_t base, bool has_inner, bool has_outer) {
            return detail::sampled_free_fraction(g, &body, base, has_inner, has_outer);
        },
        stretch_outer, M, threads);
    return M;
}

/// Energy of the field restricted to { value < level } inside the shell, after
/// rescaling by 1/level: the trial field for the superlevel set's own exterior
/// problem. Biases shared with the full solve cancel in energy ratios.
inline double masked_level_energy(const Grid& g, const std::vector<double>& value, double level,
                                  const NormSpec& norm, double p, bool stretch_outer,
                                  int threads = 1) {
    require(level > 0.0 && level < 1.0, "masked_level_energy: level must be in (0,1)");
    std::vector<uint8_t> phase(g.nnodes);
    std::vector<double> w(g.nnodes);
    for (int64_t id = 0; id < g.nnodes; ++id) {
        if (value[id] >= level) {
            phase[id] = 1;
            w[id] = 1.0;
        } else {
            phase[id] = g.cls[id] == static_cast<uint8_t>(NodeClass::outer) ? 2 : 0;
            w[id] = value[id] / level;
        }
    }
    EnergyModel M;
    M.norm = norm;
    M.p = p;
    detail::build_cells(
        g, phase.data(),
        [&value, level](int64_t inner, int64_t outer) {
            return (value[inner] - level) / (value[inner] - value[outer]);
        },
        // Shell-cut cells share the solve's sampled volumes so the outer
        // layer treatment cancels in energy ratios; mask-cut cells keep the
        // edge average (the mask surface is a field level, not a gauge).
        [&g](int64_t base, bool has_inner, bool has_outer) {
            if (has_inner || !has_outer) return -1.0;
            return detail::sampled_free_fraction(g, nullptr, base, false, true);
        },
        stretch_outer, M, threads);
    return M.energy(w, 0.0, threads);
}

template <class Ops, bool WithGrad>
double EnergyModel::pass(const Ops& ops, const double* value, double eps_sq, double* grad,
                         double* diag, int threads) const {
    const Grid& g = *grid;
    const int nedges = dim * epa;
    const double corner_w = 1.0 / static_cast<double>(corners);
    const int nchunks = std::max(1, threads);

    std::vector<double> partial(2 * nchunks, 0.0);
    std::vector<std::vector<double>> tl_grad, tl_diag;
    const int64_t nd = ndofs();
    if constexpr (WithGrad) {
        tl_grad.assign(nchunks, {});
        if (diag) tl_diag.assign(nchunks, {});
    }

    auto run_cells = [&](bool is_regular, int part_off) {
        const std::vector<int64_t>& bases = is_regular ? regular : bbase;
        parallel_for_chunks(bases.size(), threads, [&](std::size_t b, std::size_t e, int chunk) {
            double E = 0.0;
            double* gbuf = nullptr;
            double* dbuf = nullptr;
            if constexpr (WithGrad) {
                if (tl_grad[chunk].empty()) tl_grad[chunk].assign(nd, 0.0);
                gbuf = tl_grad[chunk].data();
                if (diag) {
                    if (tl_diag[chunk].empty()) tl_diag[chunk].assign(nd, 0.0);
                    dbuf = tl_diag[chunk].data();
                }
            }
            std::array<double, 64> cv;
            std::array<double, 192> de, ecoef, dcoef;
            std::array<double, 8> gvec, m;
            for (std::size_t ci = b; ci < e; ++ci) {
                const int64_t base = bases[ci];
                const double* inv = is_regular ? nullptr : &binv[ci * nedges];
                const double vol_c = (is_regular ? cell_vol : bvol[ci]) * corner_w;
                for (int c = 0; c < corners; ++c) cv[c] = value[base + corner_off[c]];
                for (int e0 = 0; e0 < nedges; ++e0)
                    de[e0] = (cv[ec1[e0]] - cv[ec0[e0]]) * (is_regular ? inv_h : inv[e0]);
                if constexpr (WithGrad)
                    for (int e0 = 0; e0 < nedges; ++e0) ecoef[e0] = dcoef[e0] = 0.0;

                // Vertex quadrature: one gradient stencil per corner, built from
                // the cell edges incident to that corner.
                for (int c = 0; c < corners; ++c) {
                    const int* ce = &corner_edge[static_cast<std::size_t>(c) * dim];
                    for (int a = 0; a < dim; ++a) gvec[a] = de[ce[a]];
                    const double W = ops.hsq(gvec.data()) + eps_sq;
                    if (W <= 0.0) continue;
                    E += vol_c * pow_half_p(W, p) / p;
                    if constexpr (WithGrad) {
                        const double wfac = vol_c * pow_half_p_minus1(W, p);
                        ops.hdh(gvec.data(), m.data());
                        for (int a = 0; a < dim; ++a) {
                            ecoef[ce[a]] += wfac * m[a];
                            if (dbuf) dcoef[ce[a]] += wfac * axis_h2[a];
                        }
                    }
                }

                if constexpr (WithGrad) {
                    for (int e0 = 0; e0 < nedges; ++e0) {
                        const double ie = is_regular ? inv_h : inv[e0];
                        if (ie == 0.0) continue;
                        if (ecoef[e0] == 0.0 && (!dbuf || dcoef[e0] == 0.0)) continue;
                        const int64_t d0 = g.node_dof[base + corner_off[ec0[e0]]];
                        const int64_t d1 = g.node_dof[base + corner_off[ec1[e0]]];
                        if (d1 >= 0) {
                            gbuf[d1] += ecoef[e0] * ie;
                            if (dbuf) dbuf[d1] += dcoef[e0] * ie * ie;
                        }
                        if (d0 >= 0) {
                            gbuf[d0] -= ecoef[e0] * ie;
                            if (dbuf) dbuf[d0] += dcoef[e0] * ie * ie;
                        }
                    }
                }
            }
            partial[part_off + chunk] += E;
        });
    };

    run_cells(true, 0);
    run_cells(false, nchunks);

    double E = 0.0;
    for (double v : partial) E += v;

    if constexpr (WithGrad) {
        for (int64_t i = 0; i < nd; ++i) grad[i] = 0.0;
        for (const auto& buf : tl_grad)
            if (!buf.empty())
                for (int64_t i = 0; i < nd; ++i) grad[i] += buf[i];
        if (diag) {
            for (int64_t i = 0; i < nd; ++i) diag[i] = 0.0;
            for (const auto& buf : tl_diag)
                if (!buf.empty())
                    for (int64_t i = 0; i < nd; ++i) diag[i] += buf[i];
        }
    }
    return E;
}

namespace detail {

template <bool WithGrad>
inline double dispatch_pass(const EnergyModel& M, const double* value, double eps_sq, double* grad,
                            double* diag, int threads) {
    switch (M.norm.kind) {
        case NormSpec::Kind::euclidean:
            return M.pass<EuclidOps, WithGrad>({M.dim}, value, eps_sq, grad, diag, threads);
        case NormSpec::Kind::ellipsoid:
            return M.pass<EllipsoidOps, WithGrad>({M.dim, M.norm.A}, value, eps_sq, grad, diag,
                                                  threads);
        case NormSpec::Kind::lq_regularized:
            return M.pass<LqOps, WithGrad>({M.dim, M.norm.lq_q, M.norm.lq_delta}, value, eps_sq,
                                           grad, diag, threads);
    }
    return 0.0;
}

}  // namespace detail

inline double EnergyModel::energy(const std::vector<double>& value, double eps, int threads) const {
    return detail::dispatch_pass<false>(*this, value.data(), eps * eps, nullptr, nullptr, threads);
}

inline double EnergyModel::energy_grad(const std::vector<double>& value, double eps,
                                       std::vector<double>& grad, std::vector<double>* diag,
                                       int threads) const {
    grad.resize(ndofs());
    if (diag) diag->resize(ndofs());
    return detail::dispatch_pass<true>(*this, value.data(), eps * eps, grad.data(),
                                       diag ? diag->data() : nullptr, threads);
}

/// Dirichlet energy of a field configuration; with eps = 0 this is the
/// truncated-domain capacity reading of the field.
inline double discrete_energy(const EnergyModel& model, const std::vector<double>& value,
                              double eps = 0.0, int threads = 1) {
    return model.energy(value, eps, threads);
}

}  // namespace fcap
