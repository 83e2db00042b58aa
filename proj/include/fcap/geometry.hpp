#pragma once

// Direction sets, low-discrepancy sequences, and sphere/ball measure
// constants shared by quadrature, sampling, and fitting code.

#include <Eigen/Dense>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <random>
#include <vector>

#include "fcap/common.hpp"

namespace fcap {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

inline constexpr double kPi = 3.141592653589793238462643383279502884;

/// Surface measure of the unit sphere S^{N-1}.
inline double sphere_area(int dim) {
    return 2.0 * std::pow(kPi, 0.5 * dim) / std::tgamma(0.5 * dim);
}

/// Volume of the Euclidean unit ball in R^N.
inline double unit_ball_volume(int dim) {
    return std::pow(kPi, 0.5 * dim) / std::tgamma(0.5 * dim + 1.0);
}

using DirectionSet = std::vector<Vec>;
using DirectionSetPtr = std::shared_ptr<const DirectionSet>;

namespace detail {

/// Quasi-uniform unit directions on S^2 (golden-angle spiral). Deterministic.
inline DirectionSet fibonacci_sphere(int count) {
    DirectionSet dirs;
    dirs.reserve(count);
    const double golden = kPi * (3.0 - std::sqrt(5.0));
    for (int i = 0; i < count; ++i) {
        const double z = 1.0 - 2.0 * (i + 0.5) / count;
        const double rho = std::sqrt(std::max(0.0, 1.0 - z * z));
        const double phi = golden * i;
        Vec d(3);
        d << rho * std::cos(phi), rho * std::sin(phi), z;
        dirs.push_back(std::move(d));
    }
    return dirs;
}

/// Seeded orthonormal batches for N != 3: draws N Gaussian vectors, Gram-
/// Schmidt orthonormalizes, and emits the batch; repeats until count is met.
inline DirectionSet orthonormal_batches(int dim, int count) {
    DirectionSet dirs;
    dirs.reserve(count);
    std::mt19937_64 rng(seeds::kDirectionSet ^ (static_cast<std::uint64_t>(dim) << 32) ^
                        static_cast<std::uint64_t>(count));
    std::normal_distribution<double> gauss(0.0, 1.0);
    while (static_cast<int>(dirs.size()) < count) {
        Mat batch(dim, dim);
        for (int j = 0; j < dim; ++j)
            for (int i = 0; i < dim; ++i) batch(i, j) = gauss(rng);
        for (int j = 0; j < dim && static_cast<int>(dirs.size()) < count; ++j) {
            Vec v = batch.col(j);
            for (int k = 0; k < j; ++k) v -= batch.col(k).dot(v) / batch.col(k).squaredNorm() * batch.col(k);
            batch.col(j) = v;
            const double n = v.norm();
            if (n < 1e-12) continue;
            dirs.push_back(v / n);
        }
    }
    dirs.resize(count);
    return dirs;
}

}  // namespace detail

/// Canonical direction set, cached by (dim, count) so support-sample bodies
/// built on the same set share one vector (pointer identity enables exact
/// support lookup).
inline DirectionSetPtr direction_set(int dim, int count) {
    require(dim >= 2 && count >= dim, "direction_set: need dim >= 2 and count >= dim");
    static std::mutex mu;
    static std::map<std::pair<int, int>, DirectionSetPtr> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto key = std::make_pair(dim, count);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    auto made = std::make_shared<DirectionSet>(
        dim == 3 ? detail::fibonacci_sphere(count) : detail::orthonormal_batches(dim, count));
    cache.emplace(key, made);
    return made;
}

/// Van der Corput radical inverse in the given base.
inline double radical_inverse(std::uint64_t i, int base) {
    double inv = 1.0 / base, x = 0.0, f = inv;
    while (i) {
        x += f * static_cast<double>(i % base);
        i /= base;
        f *= inv;
    }
    return x;
}

/// Halton point in [0,1)^dim (dims up to the prime table length).
inline void halton_point(std::uint64_t index, int dim, double* out) {
    static constexpr int primes[] = {2, 3, 5, 7, 11, 13, 17, 19};
    require(dim <= 8, "halton_point: dimension above prime table");
    for (int d = 0; d < dim; ++d) out[d] = radical_inverse(index + 1, primes[d]);
}

}  // namespace fcap
