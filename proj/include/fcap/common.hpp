#pragma once

// Shared utilities: error type, scalar helpers, deterministic RNG seeds,
// and a chunked parallel-for with order-independent-free (deterministic)
// reduction layout.

#include <cmath>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace fcap {

inline constexpr const char* kVersion = "0.1.0";

class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Precondition / contract check. Throws fcap::Error so the CLI can map
/// contract violations to exit code 1.
inline void require(bool cond, const std::string& msg) {
    if (!cond) throw Error(msg);
}

inline double sq(double x) { return x * x; }

/// Guarded power for the lq kernels: 0 raised to a negative power appears
/// only multiplied by a vanishing factor (delta = 0 on a coordinate axis),
/// where the product limit is 0. 0^0 is taken as 1 (exponent q/2-2 at q=4).
inline double pow_guarded(double w, double e) {
    if (w == 0.0) return e == 0.0 ? 1.0 : 0.0;
    return std::pow(w, e);
}

/// w^(p/2) with fast paths for the exponents the solver actually runs.
inline double pow_half_p(double w, double p) {
    if (p == 2.0) return w;
    if (p == 1.5) return std::sqrt(w * std::sqrt(w));  // w^(3/4)
    return std::pow(w, 0.5 * p);
}

/// w^(p/2 - 1), the weight in the energy gradient.
inline double pow_half_p_minus1(double w, double p) {
    if (p == 2.0) return 1.0;
    if (p == 1.5) return 1.0 / std::sqrt(std::sqrt(w));  // w^(-1/4)
    return std::pow(w, 0.5 * p - 1.0);
}

/// Fixed seed namespace so every quasi-random object in the library is
/// reproducible run to run.
namespace seeds {
inline constexpr std::uint64_t kDirectionSet = 0x9e3779b97f4a7c15ull;
inline constexpr std::uint64_t kVolume = 0xc2b2ae3d27d4eb4full;
inline constexpr std::uint64_t kDefaultAnalysis = 424242ull;
}  // namespace seeds

/// Runs fn(begin, end, chunk) over [0, n) split into `threads` contiguous
/// chunks. Chunk boundaries depend only on (n, threads), so per-chunk
/// partial results combined in chunk order give bit-reproducible sums.
inline void parallel_for_chunks(std::size_t n, int threads,
                                const std::function<void(std::size_t, std::size_t, int)>& fn) {
    if (threads <= 1 || n < 2048) {
        fn(0, n, 0);
        return;
    }
    const int nc = threads;
    std::vector<std::thread> pool;
    pool.reserve(nc - 1);
    const std::size_t step = (n + nc - 1) / nc;
    for (int c = 1; c < nc; ++c) {
        const std::size_t b = std::min(n, step * static_cast<std::size_t>(c));
        const std::size_t e = std::min(n, b + step);
        if (b < e) pool.emplace_back(fn, b, e, c);
    }
    fn(0, std::min(step, n), 0);
    for (auto& t : pool) t.join();
}

}  // namespace fcap
