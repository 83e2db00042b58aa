#pragma once

// Exact radial solutions of the anisotropic p-Laplace capacity problems:
// potentials and capacities for Wulff shapes and Wulff annuli. These are the
// closed-form benchmarks every discrete solve is measured against.

#include <cmath>

#include "fcap/body.hpp"
#include "fcap/common.hpp"
#include "fcap/dual.hpp"
#include "fcap/norm.hpp"

namespace fcap {

/// Decay rate (N - p) / (p - 1) of the capacitary potential at infinity.
inline double decay_exponent(int N, double p) {
    require(N >= 3 && p > 1.0 && p < N, "decay_exponent: need N >= 3 and 1 < p < N");
    return (static_cast<double>(N) - p) / (p - 1.0);
}

/// Homogeneity exponent q = -(p - 1)/(N - p) < 0: the capacitary potential of
/// a Wulff shape is u = (H0/r)^(1/q), so u^q is linear in the gauge H0.
inline double radial_exponent(int N, double p) {
    return -1.0 / decay_exponent(N, p);
}

/// Exterior Wulff potential as a function of the gauge value h0 = H0(x - c).
inline double radial_profile(int N, double p, double r, double h0) {
    require(r > 0.0, "radial_profile: radius must be positive");
    if (h0 <= r) return 1.0;
    return std::pow(h0 / r, -decay_exponent(N, p));
}

inline double radial_potential(const DualNormHandle& dual, double p, double r, const Vec& x,
                               Vec* hint = nullptr) {
    return radial_profile(dual.base.dim, p, r, dual_eval(dual, x, hint));
}

/// Annulus potential between gauge levels r (inner, value 1) and R (outer,
/// value 0): linear in H0^(1/q).
inline double annulus_profile(int N, double p, double r, double R, double h0) {
    require(0.0 < r && r < R, "annulus_profile: need 0 < r < R");
    if (h0 <= r) return 1.0;
    if (h0 >= R) return 0.0;
    const double iq = -decay_exponent(N, p);  // 1/q
    const double lo = std::pow(R, iq), hi = std::pow(r, iq);
    return (std::pow(h0, iq) - lo) / (hi - lo);
}

/// Volume of the unit Wulff shape { H0 <= 1 }.
inline double wulff_volume(const NormSpec& n, int count = 16384) {
    return body_volume(ConvexBody::wulff_body(n, 1.0), count);
}

/// Capacity of the Wulff shape of gauge radius r:
/// (1/p) ((N-p)/(p-1))^(p-1) N |B_H0| r^(N-p).
inline double radial_capacity(const NormSpec& n, double p, double r, int count = 16384) {
    const int N = n.dim;
    require(r > 0.0, "radial_capacity: radius must be positive");
    const double k = decay_exponent(N, p);
    return (1.0 / p) * std::pow(k, p - 1.0) * N * wulff_volume(n, count) * std::pow(r, N - p);
}

/// Capacity of the Wulff annulus r < H0 < R (potential 1 inside, 0 outside):
/// (1/p) ((N-p)/(p-1))^(p-1) N |B_H0| (r^(1/q) - R^(1/q))^(1-p).
inline double annulus_capacity(const NormSpec& n, double p, double r, double R,
                               int count = 16384) {
    const int N = n.dim;
    require(0.0 < r && r < R, "annulus_capacity: need 0 < r < R");
    const double k = decay_exponent(N, p);
    const double iq = -k;
    const double gap = std::pow(r, iq) - std::pow(R, iq);
    return (1.0 / p) * std::pow(k, p - 1.0) * N * wulff_volume(n, count) *
           std::pow(gap, 1.0 - p);
}

}  // namespace fcap
