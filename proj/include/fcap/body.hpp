#pragma once

// Convex bodies: Wulff shapes, ellipsoids, boxes, and support-sampled bodies
// (the closure of Minkowski combination). Every kind is star-shaped around a
// stored center with a positively homogeneous gauge, which gives exact
// containment tests, radial boundary maps, and boundary crossings.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <memory>
#include <vector>

#include "fcap/common.hpp"
#include "fcap/dual.hpp"
#include "fcap/geometry.hpp"
#include "fcap/norm.hpp"

namespace fcap {

inline bool norms_equal(const NormSpec& a, const NormSpec& b) {
    if (a.kind != b.kind || a.dim != b.dim) return false;
    switch (a.kind) {
        case NormSpec::Kind::euclidean:
            return true;
        case NormSpec::Kind::ellipsoid:
            return (a.A - b.A).cwiseAbs().maxCoeff() <= 1e-14 * a.A.cwiseAbs().maxCoeff();
        case NormSpec::Kind::lq_regularized:
            return a.lq_q == b.lq_q && a.lq_delta == b.lq_delta;
    }
    return false;
}

struct ConvexBody {
    enum class Kind { wulff, ellipsoid, box, support_samples };

    Kind kind = Kind::wulff;
    int dim = 3;
    Vec center;  // gauge anchor; strictly interior

    // wulff: { x : H0(x - center) <= radius }
    DualNormHandle dual;
    double radius = 1.0;

    // ellipsoid: { x : (x - center) . Q (x - center) <= 1 }, Q SPD
    Mat Q, Qinv;

    // box: { x : |x_i - center_i| <= half_i }
    Vec half;

    // support_samples: intersection of halfspaces <x - center, u_i> <= rel_vals_i
    DirectionSetPtr dirs;
    std::vector<double> rel_vals;  // all positive
    Mat dirs_scaled;               // rows u_i / rel_vals_i, so gauge = max(dirs_scaled * d)
    std::vector<Vec> pts;          // boundary points for generic support queries

    static ConvexBody wulff_body(const NormSpec& n, double r, Vec c = Vec()) {
        require(r > 0.0, "wulff_body: radius must be positive");
        ConvexBody b;
        b.kind = Kind::wulff;
        b.dim = n.dim;
        b.dual = make_dual(n);
        b.radius = r;
        b.center = (c.size() == n.dim) ? c : Vec::Zero(n.dim).eval();
        require(b.center.size() == n.dim, "wulff_body: center dimension mismatch");
        return b;
    }

    static ConvexBody ellipsoid_body(const Mat& Q, Vec c = Vec()) {
        Eigen::LLT<Mat> llt(Q);
        require(Q.rows() == Q.cols() && llt.info() == Eigen::Success,
                "ellipsoid_body: Q must be square positive definite");
        ConvexBody b;
        b.kind = Kind::ellipsoid;
        b.dim = static_cast<int>(Q.rows());
        b.Q = 0.5 * (Q + Q.transpose());
        Mat inv = b.Q.inverse();
        b.Qinv = 0.5 * (inv + inv.transpose());
        b.center = (c.size() == b.dim) ? c : Vec::Zero(b.dim).eval();
        require(b.center.size() == b.dim, "ellipsoid_body: center dimension mismatch");
        return b;
    }

    static ConvexBody box_body(const Vec& half, Vec c = Vec()) {
        require(half.size() >= 2 && half.minCoeff() > 0.0,
                "box_body: half-widths must be positive");
        ConvexBody b;
        b.kind = Kind::box;
        b.dim = static_cast<int>(half.size());
        b.half = half;
        b.center = (c.size() == b.dim) ? c : Vec::Zero(b.dim).eval();
        require(b.center.size() == b.dim, "box_body: center dimension mismatch");
        return b;
    }

    /// Builds the outer polytope with support values vals (absolute) on dirs.
    /// The anchor is the Steiner point of the sampled support function.
    static ConvexBody from_support_samples(DirectionSetPtr dirs, const std::vector<double>& vals);
};

namespace detail {

/// Gauge of the body at offset d from its center: contains(center + d) iff
/// gauge_offset <= 1. Positively homogeneous in d. hint warm-starts the
/// generic dual evaluation of Wulff gauges.
inline double gauge_offset(const ConvexBody& b, const Vec& d, Vec* hint = nullptr) {
    switch (b.kind) {
        case ConvexBody::Kind::wulff:
            return dual_eval(b.dual, d, hint) / b.radius;
        case ConvexBody::Kind::ellipsoid:
            return std::sqrt(std::max(0.0, d.dot(b.Q * d)));
        case ConvexBody::Kind::box: {
            double g = 0;
            for (int i = 0; i < b.dim; ++i) g = std::max(g, std::abs(d[i]) / b.half[i]);
            return g;
        }
        case ConvexBody::Kind::support_samples:
            return (b.dirs_scaled * d).maxCoeff();
    }
    return 0.0;
}

}  // namespace detail

inline bool contains(const ConvexBody& b, const Vec& x, Vec* hint = nullptr) {
    require(x.size() == b.dim, "contains: dimension mismatch");
    return detail::gauge_offset(b, x - b.center, hint) <= 1.0;
}

/// Support function h_K(u) = sup_{x in K} <x, u>. Exact for wulff, ellipsoid
/// and box; support-sampled bodies answer from their boundary vertices (an
/// inner approximation between the sampled directions).
inline double support(const ConvexBody& b, const Vec& u) {
    require(u.size() == b.dim, "support: dimension mismatch");
    switch (b.kind) {
        case ConvexBody::Kind::wulff:
            return b.center.dot(u) + b.radius * eval_norm(b.dual.base, u);
        case ConvexBody::Kind::ellipsoid:
            return b.center.dot(u) + std::sqrt(std::max(0.0, u.dot(b.Qinv * u)));
        case ConvexBody::Kind::box: {
            double s = b.center.dot(u);
            for (int i = 0; i < b.dim; ++i) s += b.half[i] * std::abs(u[i]);
            return s;
        }
        case ConvexBody::Kind::support_samples: {
            double best = -std::numeric_limits<double>::infinity();
            for (const auto& p : b.pts) best = std::max(best, p.dot(u));
            return best;
        }
    }
    return 0.0;
}

/// The boundary point hit by the ray center + t * d, t > 0.
inline Vec boundary_sample(const ConvexBody& b, const Vec& d, Vec* hint = nullptr) {
    require(d.size() == b.dim && d.squaredNorm() > 0, "boundary_sample: need a nonzero direction");
    const double g = detail::gauge_offset(b, d, hint);
    require(g > 0.0, "boundary_sample: ray does not leave the body");
    return b.center + d / g;
}

/// Outward euclidean unit normal at the boundary point in direction d.
inline Vec boundary_normal(const ConvexBody& b, const Vec& d, Vec* hint = nullptr) {
    require(d.size() == b.dim && d.squaredNorm() > 0, "boundary_normal: need a nonzero direction");
    switch (b.kind) {
        case ConvexBody::Kind::wulff:
            return dual_grad(b.dual, d, hint).normalized();
        case ConvexBody::Kind::ellipsoid:
            return (b.Q * d).normalized();
        case ConvexBody::Kind::box: {
            int arg = 0;
            double g = 0;
            for (int i = 0; i < b.dim; ++i) {
                const double gi = std::abs(d[i]) / b.half[i];
                if (gi > g) {
                    g = gi;
                    arg = i;
                }
            }
            Vec n = Vec::Zero(b.dim);
            n[arg] = d[arg] > 0 ? 1.0 : -1.0;
            return n;
        }
        case ConvexBody::Kind::support_samples: {
            const auto& ds = *b.dirs;
            size_t arg = 0;
            double g = -std::numeric_limits<double>::infinity();
            for (size_t i = 0; i < ds.size(); ++i) {
                const double gi = d.dot(ds[i]) / b.rel_vals[i];
                if (gi > g) {
                    g = gi;
                    arg = i;
                }
            }
            return ds[arg];
        }
    }
    return Vec();
}

/// Fraction s in [0, 1] along the segment a -> outside_b at which the boundary
/// is crossed. Requires a inside, outside_b outside. Bisection on the gauge;
/// the inside sublevel meets the segment in an interval, so the crossing is
/// unique.
inline double boundary_crossing(const ConvexBody& b, const Vec& a, const Vec& outside_b,
                                Vec* hint = nullptr, int iters = 60) {
    const Vec da = a - b.center;
    const Vec db = outside_b - b.center;
    double lo = 0.0, hi = 1.0;
    double glo = detail::gauge_offset(b, da, hint);
    double ghi = detail::gauge_offset(b, db, hint);
    require(glo <= 1.0 + 1e-12 && ghi > 1.0, "boundary_crossing: endpoints must straddle the boundary");
    for (int i = 0; i < iters && hi - lo > 1e-14; ++i) {
        const double mid = 0.5 * (lo + hi);
        const double g = detail::gauge_offset(b, da + mid * (db - da), hint);
        (g <= 1.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

inline ConvexBody ConvexBody::from_support_samples(DirectionSetPtr dirs,
                                                   const std::vector<double>& vals) {
    require(dirs && !dirs->empty() && dirs->size() == vals.size(),
            "from_support_samples: need matching directions and values");
    ConvexBody b;
    b.kind = Kind::support_samples;
    b.dim = static_cast<int>((*dirs)[0].size());
    b.dirs = dirs;

    // Steiner point of the sampled support function is strictly interior for
    // a genuinely convex sample.
    Vec anchor = Vec::Zero(b.dim);
    for (size_t i = 0; i < vals.size(); ++i) anchor += vals[i] * (*dirs)[i];
    anchor *= static_cast<double>(b.dim) / static_cast<double>(vals.size());
    b.center = anchor;

    b.rel_vals.resize(vals.size());
    b.dirs_scaled.resize(static_cast<int64_t>(vals.size()), b.dim);
    for (size_t i = 0; i < vals.size(); ++i) {
        b.rel_vals[i] = vals[i] - anchor.dot((*dirs)[i]);
        require(b.rel_vals[i] > 0.0, "from_support_samples: anchor not interior; sample too sparse");
        b.dirs_scaled.row(static_cast<int64_t>(i)) = (*dirs)[i].transpose() / b.rel_vals[i];
    }

    b.pts.reserve(dirs->size());
    for (const auto& d : *dirs) b.pts.push_back(boundary_sample(b, d));
    return b;
}

/// Minkowski combination a*A + b*B represented through its support function.
/// Same-norm Wulff operands stay exact (Wulff shapes are closed under the
/// combination); anything else is sampled on a shared direction set.
inline ConvexBody minkowski_combine(double a, const ConvexBody& A, double b, const ConvexBody& B,
                                    int count = 2048) {
    require(A.dim == B.dim, "minkowski_combine: dimension mismatch");
    require(a >= 0.0 && b >= 0.0 && a + b > 0.0, "minkowski_combine: coefficients must be >= 0");
    if (A.kind == ConvexBody::Kind::wulff && B.kind == ConvexBody::Kind::wulff &&
        norms_equal(A.dual.base, B.dual.base)) {
        return ConvexBody::wulff_body(A.dual.base, a * A.radius + b * B.radius,
                                      a * A.center + b * B.center);
    }
    DirectionSetPtr dirs = A.kind == ConvexBody::Kind::support_samples ? A.dirs
                           : B.kind == ConvexBody::Kind::support_samples
                               ? B.dirs
                               : direction_set(A.dim, count);
    std::vector<double> vals(dirs->size());
    for (size_t i = 0; i < dirs->size(); ++i) {
        const Vec& u = (*dirs)[i];
        const double ha = (A.kind == ConvexBody::Kind::support_samples && A.dirs == dirs)
                              ? A.center.dot(u) + A.rel_vals[i]
                              : support(A, u);
        const double hb = (B.kind == ConvexBody::Kind::support_samples && B.dirs == dirs)
                              ? B.center.dot(u) + B.rel_vals[i]
                              : support(B, u);
        vals[i] = a * ha + b * hb;
    }
    return ConvexBody::from_support_samples(dirs, vals);
}

/// Steiner point: dim * average of h(u) u over uniform directions.
inline Vec steiner_point(const ConvexBody& b, int count = 2048) {
    if (b.kind == ConvexBody::Kind::support_samples) {
        return b.center;  // the anchor is the Steiner point of the sample
    }
    const auto dirs = direction_set(b.dim, count);
    Vec s = Vec::Zero(b.dim);
    for (const auto& u : *dirs) s += support(b, u) * u;
    return s * (static_cast<double>(b.dim) / static_cast<double>(dirs->size()));
}

/// Volume by the radial map from the center: V = mean over the sphere of
/// t*(omega)^N * area(S) / N. Boxes and ellipsoids are closed forms.
inline double body_volume(const ConvexBody& b, int count = 16384) {
    const int N = b.dim;
    switch (b.kind) {
        case ConvexBody::Kind::box: {
            double v = 1.0;
            for (int i = 0; i < N; ++i) v *= 2.0 * b.half[i];
            return v;
        }
        case ConvexBody::Kind::ellipsoid:
            return unit_ball_volume(N) / std::sqrt(b.Q.determinant());
        default: {
            const auto dirs = direction_set(N, count);
            double acc = 0.0;
            Vec hint;
            for (const auto& d : *dirs) {
                const double g = detail::gauge_offset(b, d, &hint);
                acc += std::pow(1.0 / g, N);
            }
            return acc / static_cast<double>(dirs->size()) * sphere_area(N) / N;
        }
    }
}

/// Anisotropic perimeter P_H(K) = integral of H(nu) over the boundary (nu the
/// outward euclidean unit normal). Radial-graph quadrature from the center:
/// dS = t*^(N-1) / <nu, omega> d(omega). Boxes sum their faces exactly.
inline double finsler_perimeter(const ConvexBody& b, const NormSpec& H, int count = 8192) {
    require(H.dim == b.dim, "finsler_perimeter: dimension mismatch");
    const int N = b.dim;
    if (b.kind == ConvexBody::Kind::box) {
        double p = 0.0;
        for (int a = 0; a < N; ++a) {
            double area = 1.0;
            for (int i = 0; i < N; ++i)
                if (i != a) area *= 2.0 * b.half[i];
            Vec e = Vec::Zero(N);
            e[a] = 1.0;
            p += area * (eval_norm(H, e) + eval_norm(H, -e));
        }
        return p;
    }
    const auto dirs = direction_set(N, count);
    double acc = 0.0;
    Vec hint, nhint;
    for (const auto& d : *dirs) {
        const double g = detail::gauge_offset(b, d, &hint);
        const Vec nu = boundary_normal(b, d, &nhint);
        const double cosang = nu.dot(d);
        require(cosang > 1e-12, "finsler_perimeter: degenerate radial map");
        acc += eval_norm(H, nu) * std::pow(1.0 / g, N - 1) / cosang;
    }
    return acc / static_cast<double>(dirs->size()) * sphere_area(N);
}

struct WulffFit {
    bool converged = false;
    Vec center;
    double radius = 0.0;
    double spread = 0.0;  // (max - min) / mean of H0(x_j - center)
};

/// Fits a Wulff shape of the given norm to boundary points by minimizing the
/// relative spread of H0(x_j - c) over the center c (coordinate descent with
/// shrinking ternary searches). spread <= spread_tol declares convergence.
inline WulffFit fit_wulff(const std::vector<Vec>& points, const DualNormHandle& dual,
                          double spread_tol = 2e-2, int max_sweeps = 6) {
    require(points.size() >= 8, "fit_wulff: need at least 8 boundary points");
    const int dim = dual.base.dim;

    std::vector<Vec> sample;
    const size_t cap = 512;
    const size_t stride = std::max<size_t>(1, points.size() / cap);
    for (size_t i = 0; i < points.size(); i += stride) sample.push_back(points[i]);

    std::vector<Vec> hints(sample.size());
    auto spread_at = [&](const Vec& c, double* mean_out) {
        double lo = std::numeric_limits<double>::infinity(), hi = 0.0, mean = 0.0;
        for (size_t j = 0; j < sample.size(); ++j) {
            const double v = dual_eval(dual, sample[j] - c, &hints[j]);
            lo = std::min(lo, v);
            hi = std::max(hi, v);
            mean += v;
        }
        mean /= static_cast<double>(sample.size());
        if (mean_out) *mean_out = mean;
        return (hi - lo) / mean;
    };

    Vec c = Vec::Zero(dim);
    for (const auto& p : sample) c += p;
    c /= static_cast<double>(sample.size());

    double mean = 0.0;
    double best = spread_at(c, &mean);
    double window = 0.25 * mean;
    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        for (int a = 0; a < dim; ++a) {
            double lo = c[a] - window, hi = c[a] + window;
            for (int it = 0; it < 32; ++it) {
                const double m1 = lo + (hi - lo) / 3.0, m2 = hi - (hi - lo) / 3.0;
                Vec c1 = c, c2 = c;
                c1[a] = m1;
                c2[a] = m2;
                if (spread_at(c1, nullptr) < spread_at(c2, nullptr))
                    hi = m2;
                else
                    lo = m1;
            }
            c[a] = 0.5 * (lo + hi);
        }
        best = spread_at(c, &mean);
        window *= 0.5;
        if (best <= 0.25 * spread_tol) break;
    }

    WulffFit fit;
    fit.center = c;
    fit.spread = spread_at(c, &mean);
    fit.radius = mean;
    fit.converged = fit.spread <= spread_tol;
    return fit;
}

/// Convenience overload sampling the boundary of a body.
inline WulffFit fit_wulff(const ConvexBody& b, const DualNormHandle& dual, int count = 512,
                          double spread_tol = 2e-2) {
    const auto dirs = direction_set(b.dim, count);
    std::vector<Vec> pts;
    pts.reserve(dirs->size());
    Vec hint;
    for (const auto& d : *dirs) pts.push_back(boundary_sample(b, d, &hint));
    return fit_wulff(pts, dual, spread_tol);
}

struct HomothetyFit {
    double rho = 0.0;   // scale factor
    Vec shift;          // translation
    double residual = 0.0;  // sup |h_K - rho h_D - <shift, u>| / mean h_K
};

/// Least-squares fit h_K(u) = rho * h_D(u) + <shift, u> over a direction set;
/// a small residual certifies that K is homothetic to D.
inline HomothetyFit fit_homothety(const ConvexBody& K, const ConvexBody& D, int count = 512) {
    require(K.dim == D.dim, "fit_homothety: dimension mismatch");
    const int dim = K.dim;
    DirectionSetPtr dirs =
        K.kind == ConvexBody::Kind::support_samples ? K.dirs : direction_set(dim, count);
    const int m = static_cast<int>(dirs->size());

    Mat M(m, dim + 1);
    Vec rhs(m);
    double scale = 0.0;
    for (int i = 0; i < m; ++i) {
        const Vec& u = (*dirs)[i];
        const double hk = (K.kind == ConvexBody::Kind::support_samples && K.dirs == dirs)
                              ? K.center.dot(u) + K.rel_vals[i]
                              : support(K, u);
        M(i, 0) = support(D, u);
        for (int a = 0; a < dim; ++a) M(i, 1 + a) = u[a];
        rhs[i] = hk;
        scale += hk;
    }
    scale /= m;

    Vec sol = M.colPivHouseholderQr().solve(rhs);
    HomothetyFit fit;
    fit.rho = sol[0];
    fit.shift = sol.segment(1, dim);
    fit.residual = (M * sol - rhs).cwiseAbs().maxCoeff() / std::abs(scale);
    return fit;
}

}  // namespace fcap
