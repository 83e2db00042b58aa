#pragma once

// Dual norm H0(x) = sup_{xi != 0} <x, xi> / H(xi), with closed forms where
// they exist and a sphere-constrained ascent otherwise. The maximizer also
// yields grad H0(x) = xi* / H(xi*).

#include <Eigen/Dense>
#include <cmath>
#include <optional>

#include "fcap/common.hpp"
#include "fcap/geometry.hpp"
#include "fcap/norm.hpp"

namespace fcap {

struct DualNormHandle {
    NormSpec base;
    std::optional<NormSpec> closed;  // dual evaluates through another NormSpec
    DirectionSetPtr scan_dirs;       // generic path: coarse scan before ascent
    double refine_tol = 1e-7;        // on |P grad| / value; value error is quadratic
    int max_refine_iters = 128;
};

inline DualNormHandle make_dual(const NormSpec& n, int scan_count = 1024) {
    DualNormHandle h;
    h.base = n;
    switch (n.kind) {
        case NormSpec::Kind::euclidean:
            h.closed = NormSpec::euclidean(n.dim);
            break;
        case NormSpec::Kind::ellipsoid: {
            Mat inv = n.A.inverse();
            h.closed = NormSpec::ellipsoid(0.5 * (inv + inv.transpose()));
            break;
        }
        case NormSpec::Kind::lq_regularized:
            if (n.lq_delta == 0.0) {
                h.closed = NormSpec::lq(n.lq_q / (n.lq_q - 1.0), 0.0, n.dim);
            } else {
                h.scan_dirs = direction_set(n.dim, scan_count);
            }
            break;
    }
    return h;
}

namespace detail {

/// Maximizes g(xi) = <x, xi> / H(xi) over the unit sphere. Returns the value;
/// writes the maximizing direction into dir_out if non-null. A nonzero *hint
/// skips the coarse scan and ascends locally (warm starts along grid sweeps).
inline double dual_max(const DualNormHandle& h, const Vec& x, Vec* dir_out, const Vec* hint) {
    const NormSpec& n = h.base;
    const int d = n.dim;

    auto value = [&](const Vec& xi) { return x.dot(xi) / norm_eval(n, xi.data(), d); };

    Vec best;
    if (hint && hint->size() == d && hint->squaredNorm() > 0) {
        best = hint->normalized();
    } else {
        double bv = -std::numeric_limits<double>::infinity();
        for (const auto& u : *h.scan_dirs) {
            const double v = value(u);
            if (v > bv) {
                bv = v;
                best = u;
            }
        }
        // A symmetric direction set can still miss the sign; the norm is even,
        // so the antipode flips the value.
        if (value(-best) > bv) best = -best;
    }

    double g = value(best);
    Vec grad(d), pg(d);
    double step = 0.5;
    for (int it = 0; it < h.max_refine_iters; ++it) {
        const double hv = norm_eval(n, best.data(), d);
        norm_grad(n, best.data(), d, grad.data());
        // grad of g at xi on the sphere, tangentially projected.
        pg = (x - g * grad) / hv;
        pg -= pg.dot(best) * best;
        const double pn2 = pg.squaredNorm();
        if (std::sqrt(pn2) <= h.refine_tol * std::abs(g)) break;

        bool moved = false;
        double t = step;
        for (int bt = 0; bt < 40; ++bt) {
            Vec cand = (best + t * pg).normalized();
            const double gv = value(cand);
            if (gv >= g + 1e-4 * t * pn2) {
                best = cand;
                g = gv;
                step = std::min(2.0 * t, 4.0);
                moved = true;
                break;
            }
            t *= 0.5;
        }
        if (!moved) break;
    }
    if (dir_out) *dir_out = best;
    return g;
}

}  // namespace detail

/// H0(x); pass a warm-start direction via hint (updated in place) to avoid the
/// coarse scan on the generic path.
inline double dual_eval(const DualNormHandle& h, const Vec& x, Vec* hint = nullptr) {
    require(x.size() == h.base.dim, "dual_eval: dimension mismatch");
    detail::check_finite(x.data(), h.base.dim, "dual_eval");
    if (x.squaredNorm() == 0.0) return 0.0;
    if (h.closed) return detail::norm_eval(*h.closed, x.data(), h.base.dim);
    Vec dir;
    const double v = detail::dual_max(h, x, hint ? &dir : nullptr, hint);
    if (hint) *hint = dir;
    return v;
}

/// grad H0(x) = xi*/H(xi*) for the maximizing direction xi*; unit in H.
inline Vec dual_grad(const DualNormHandle& h, const Vec& x, Vec* hint = nullptr) {
    require(x.size() == h.base.dim, "dual_grad: dimension mismatch");
    require(x.squaredNorm() > 0.0, "dual_grad: zero vector where a direction is required");
    if (h.closed) return grad_norm(*h.closed, x);
    Vec dir;
    detail::dual_max(h, x, &dir, hint);
    if (hint) *hint = dir;
    return dir / detail::norm_eval(h.base, dir.data(), h.base.dim);
}

}  // namespace fcap
