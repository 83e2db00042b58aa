#pragma once

// Anisotropic norm evaluation: H, its gradient, Hessians of powers of H,
// and the regularity-class membership check (positive tangential Hessian
// plus locally Lipschitz Hessian of H^p).

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include "fcap/common.hpp"
#include "fcap/geometry.hpp"

namespace fcap {

struct NormSpec {
    enum class Kind { euclidean, ellipsoid, lq_regularized };

    Kind kind = Kind::euclidean;
    int dim = 3;
    Mat A;               // ellipsoid quadratic form, SPD
    double lq_q = 0.0;   // lq exponent, > 1
    double lq_delta = 0.0;

    static NormSpec euclidean(int dim) {
        require(dim >= 2, "NormSpec: dim must be >= 2");
        NormSpec n;
        n.kind = Kind::euclidean;
        n.dim = dim;
        return n;
    }

    /// H(xi) = sqrt(xi . A xi). A must be symmetric positive definite.
    static NormSpec ellipsoid(const Mat& A) {
        require(A.rows() == A.cols() && A.rows() >= 2, "NormSpec: A must be square, dim >= 2");
        require((A - A.transpose()).cwiseAbs().maxCoeff() <= 1e-12 * A.cwiseAbs().maxCoeff(),
                "NormSpec: A must be symmetric");
        Eigen::LLT<Mat> llt(A);
        require(llt.info() == Eigen::Success, "NormSpec: A must be positive definite");
        NormSpec n;
        n.kind = Kind::ellipsoid;
        n.dim = static_cast<int>(A.rows());
        n.A = 0.5 * (A + A.transpose());
        return n;
    }

    /// H(xi) = (sum_i (xi_i^2 + delta |xi|^2)^(q/2))^(1/q); smooth for delta > 0.
    static NormSpec lq(double q_exp, double delta, int dim) {
        require(q_exp > 1.0, "NormSpec: lq exponent must be > 1");
        require(delta >= 0.0, "NormSpec: lq delta must be >= 0");
        require(dim >= 2, "NormSpec: dim must be >= 2");
        NormSpec n;
        n.kind = Kind::lq_regularized;
        n.dim = dim;
        n.lq_q = q_exp;
        n.lq_delta = delta;
        return n;
    }
};

namespace detail {

inline void check_finite(const double* xi, int d, const char* who) {
    for (int i = 0; i < d; ++i)
        require(std::isfinite(xi[i]), std::string(who) + ": non-finite input component");
}

inline double norm_eval(const NormSpec& n, const double* xi, int d) {
    switch (n.kind) {
        case NormSpec::Kind::euclidean: {
            double s = 0;
            for (int i = 0; i < d; ++i) s += sq(xi[i]);
            return std::sqrt(s);
        }
        case NormSpec::Kind::ellipsoid: {
            double s = 0;
            for (int i = 0; i < d; ++i) {
                double row = 0;
                for (int j = 0; j < d; ++j) row += n.A(i, j) * xi[j];
                s += xi[i] * row;
            }
            return std::sqrt(std::max(0.0, s));
        }
        case NormSpec::Kind::lq_regularized: {
            const double q = n.lq_q, delta = n.lq_delta;
            double r2 = 0;
            for (int i = 0; i < d; ++i) r2 += sq(xi[i]);
            double S = 0;
            for (int i = 0; i < d; ++i) S += std::pow(sq(xi[i]) + delta * r2, 0.5 * q);
            return std::pow(S, 1.0 / q);
        }
    }
    return 0.0;
}

/// Writes grad H into out. Requires xi != 0.
inline void norm_grad(const NormSpec& n, const double* xi, int d, double* out) {
    switch (n.kind) {
        case NormSpec::Kind::euclidean: {
            const double h = norm_eval(n, xi, d);
            for (int i = 0; i < d; ++i) out[i] = xi[i] / h;
            return;
        }
        case NormSpec::Kind::ellipsoid: {
            const double h = norm_eval(n, xi, d);
            for (int i = 0; i < d; ++i) {
                double row = 0;
                for (int j = 0; j < d; ++j) row += n.A(i, j) * xi[j];
                out[i] = row / h;
            }
            return;
        }
        case NormSpec::Kind::lq_regularized: {
            const double q = n.lq_q, delta = n.lq_delta;
            double r2 = 0;
            for (int i = 0; i < d; ++i) r2 += sq(xi[i]);
            double S = 0, T = 0;
            for (int i = 0; i < d; ++i) {
                const double w = sq(xi[i]) + delta * r2;
                S += pow_guarded(w, 0.5 * q);
                T += pow_guarded(w, 0.5 * q - 1.0);
            }
            const double outer = std::pow(S, 1.0 / q - 1.0);
            for (int i = 0; i < d; ++i) {
                const double w = sq(xi[i]) + delta * r2;
                out[i] = outer * (pow_guarded(w, 0.5 * q - 1.0) * xi[i] + delta * xi[i] * T);
            }
            return;
        }
    }
}

/// Hessian of H^pow (pow > 0), written row-major into out (d*d).
inline void norm_hess_pow(const NormSpec& n, double pow_p, const double* xi, int d, double* out) {
    switch (n.kind) {
        case NormSpec::Kind::euclidean: {
            double r2 = 0;
            for (int i = 0; i < d; ++i) r2 += sq(xi[i]);
            const double r = std::sqrt(r2);
            const double a = pow_p * std::pow(r, pow_p - 2.0);
            const double b = pow_p * (pow_p - 2.0) * std::pow(r, pow_p - 4.0);
            for (int i = 0; i < d; ++i)
                for (int j = 0; j < d; ++j) out[i * d + j] = b * xi[i] * xi[j] + (i == j ? a : 0.0);
            return;
        }
        case NormSpec::Kind::ellipsoid: {
            double W = 0;
            std::vector<double> Ax(d, 0.0);
            for (int i = 0; i < d; ++i) {
                double row = 0;
                for (int j = 0; j < d; ++j) row += n.A(i, j) * xi[j];
                Ax[i] = row;
                W += xi[i] * row;
            }
            const double a = pow_p * std::pow(W, 0.5 * pow_p - 1.0);
            const double b = pow_p * (pow_p - 2.0) * std::pow(W, 0.5 * pow_p - 2.0);
            for (int i = 0; i < d; ++i)
                for (int j = 0; j < d; ++j) out[i * d + j] = b * Ax[i] * Ax[j] + a * n.A(i, j);
            return;
        }
        case NormSpec::Kind::lq_regularized: {
            const double q = n.lq_q, delta = n.lq_delta;
            double r2 = 0;
            for (int i = 0; i < d; ++i) r2 += sq(xi[i]);
            double S = 0, T = 0, U = 0;
            std::vector<double> w(d), gS(d), c(d);
            for (int i = 0; i < d; ++i) {
                w[i] = sq(xi[i]) + delta * r2;
                S += pow_guarded(w[i], 0.5 * q);
                T += pow_guarded(w[i], 0.5 * q - 1.0);
                U += pow_guarded(w[i], 0.5 * q - 2.0);
            }
            for (int i = 0; i < d; ++i) {
                gS[i] = q * (pow_guarded(w[i], 0.5 * q - 1.0) * xi[i] + delta * xi[i] * T);
                c[i] = pow_guarded(w[i], 0.5 * q - 2.0) * xi[i];
            }
            const double m = pow_p / q;
            const double sm1 = std::pow(S, m - 1.0);
            const double sm2 = std::pow(S, m - 2.0);
            for (int i = 0; i < d; ++i) {
                for (int j = 0; j < d; ++j) {
                    double h2s = (q - 2.0) * delta * (c[i] * xi[j] + xi[i] * c[j]) +
                                 (q - 2.0) * delta * delta * U * xi[i] * xi[j];
                    if (i == j)
                        h2s += (q - 2.0) * pow_guarded(w[i], 0.5 * q - 2.0) * sq(xi[i]) +
                               pow_guarded(w[i], 0.5 * q - 1.0) + delta * T;
                    h2s *= q;
                    out[i * d + j] = m * (m - 1.0) * sm2 * gS[i] * gS[j] + m * sm1 * h2s;
                }
            }
            return;
        }
    }
}

}  // namespace detail

/// H(xi). Zero input returns 0 by homogeneity.
inline double eval_norm(const NormSpec& n, const Vec& xi) {
    require(xi.size() == n.dim, "eval_norm: dimension mismatch");
    detail::check_finite(xi.data(), n.dim, "eval_norm");
    return detail::norm_eval(n, xi.data(), n.dim);
}

/// grad H(xi); 0-homogeneous, defined away from the origin.
inline Vec grad_norm(const NormSpec& n, const Vec& xi) {
    require(xi.size() == n.dim, "grad_norm: dimension mismatch");
    detail::check_finite(xi.data(), n.dim, "grad_norm");
    require(xi.squaredNorm() > 0.0, "grad_norm: zero vector where a direction is required");
    Vec g(n.dim);
    detail::norm_grad(n, xi.data(), n.dim, g.data());
    return g;
}

/// Hessian of H^p at xi, 1 < p < dim (the capacity exponent range).
inline Mat hess_p(const NormSpec& n, double p, const Vec& xi) {
    require(xi.size() == n.dim, "hess_p: dimension mismatch");
    require(p > 1.0 && p < n.dim, "hess_p: exponent must satisfy 1 < p < dim");
    detail::check_finite(xi.data(), n.dim, "hess_p");
    require(xi.squaredNorm() > 0.0, "hess_p: zero vector where a direction is required");
    Mat h(n.dim, n.dim);
    detail::norm_hess_pow(n, p, xi.data(), n.dim, h.data());
    // row-major kernel into column-major Eigen: Hessians are symmetric, so
    // the layouts coincide.
    return h;
}

struct ClassJpReport {
    bool in_class = false;
    double min_tangential_eig = 0.0;   // over sampled unit directions
    double hess_lipschitz = 0.0;       // sampled Lipschitz constant of Hess(H^p)
    double threshold = 0.0;
    int samples = 0;
};

/// Samples unit directions (always including the coordinate axes, where the
/// lq family degenerates first) and checks that the tangential Hessian of H
/// stays positive; the Lipschitz constant of Hess(H^p) is estimated from
/// perturbed pairs and reported.
inline ClassJpReport check_class_Jp(const NormSpec& n, double p, int samples = 512,
                                    double threshold = 1e-8) {
    require(p > 1.0 && p < n.dim, "check_class_Jp: exponent must satisfy 1 < p < dim");
    const int d = n.dim;
    DirectionSet dirs = *direction_set(d, samples);
    for (int a = 0; a < d; ++a) {
        Vec e = Vec::Zero(d);
        e[a] = 1.0;
        dirs.push_back(e);
        dirs.push_back(-e);
    }

    ClassJpReport rep;
    rep.threshold = threshold;
    rep.samples = static_cast<int>(dirs.size());
    rep.min_tangential_eig = std::numeric_limits<double>::infinity();

    std::vector<double> hbuf(d * d), hbuf2(d * d);
    std::mt19937_64 rng(seeds::kDirectionSet ^ 0x5bull);
    std::normal_distribution<double> gauss(0.0, 1.0);
    bool finite = true;

    for (const auto& xi : dirs) {
        detail::norm_hess_pow(n, 1.0, xi.data(), d, hbuf.data());
        Mat hess = Eigen::Map<Mat>(hbuf.data(), d, d);
        if (!hess.allFinite()) {
            finite = false;
            continue;
        }
        // Orthonormal basis of the tangent space xi^perp.
        Eigen::HouseholderQR<Mat> qr(xi);
        Mat Q = qr.householderQ();
        Mat B = Q.rightCols(d - 1);
        Eigen::SelfAdjointEigenSolver<Mat> eig(B.transpose() * hess * B);
        rep.min_tangential_eig = std::min(rep.min_tangential_eig, eig.eigenvalues().minCoeff());

        // Hess(H^p) Lipschitz sample on a nearby pair.
        Vec eta(d);
        for (int i = 0; i < d; ++i) eta[i] = gauss(rng);
        Vec xi2 = (xi + 1e-3 * eta).normalized();
        detail::norm_hess_pow(n, p, xi.data(), d, hbuf.data());
        detail::norm_hess_pow(n, p, xi2.data(), d, hbuf2.data());
        double diff = 0;
        for (int k = 0; k < d * d; ++k) diff += sq(hbuf[k] - hbuf2[k]);
        const double dist = (xi - xi2).norm();
        if (dist > 0 && std::isfinite(diff))
            rep.hess_lipschitz = std::max(rep.hess_lipschitz, std::sqrt(diff) / dist);
    }
    rep.in_class = finite && rep.min_tangential_eig > threshold;
    return rep;
}

}  // namespace fcap
