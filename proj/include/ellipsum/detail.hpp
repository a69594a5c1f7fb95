#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <random>
#include <string>
#include <thread>
#include <vector>

namespace ellipsum::detail {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

inline Matrix symmetrize(const Matrix& m) { return 0.5 * (m + m.transpose()); }

inline double max_abs(const Matrix& m) {
    return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

inline double max_asymmetry(const Matrix& m) {
    return max_abs(m - m.transpose());
}

/// "%.17g" — enough digits for exact double round-trips in text formats.
inline std::string fmt17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

inline std::string fmt_fixed(double x, int digits) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*f", digits, x);
    return buf;
}

/// Standard-normal draw from a seeded mt19937_64. Box-Muller on explicitly
/// mapped uniforms, so the stream is identical across standard libraries.
class GaussianStream {
public:
    explicit GaussianStream(std::uint64_t seed) : rng_(seed) {}

    double next() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = uniform_open();
        double u2 = uniform_open();
        double r = std::sqrt(-2.0 * std::log(u1));
        double a = 2.0 * M_PI * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

    Vector vector(Eigen::Index n) {
        Vector v(n);
        for (Eigen::Index i = 0; i < n; ++i) v(i) = next();
        return v;
    }

    /// Uniform in (0, 1].
    double uniform_open() {
        return (static_cast<double>(rng_() >> 11) + 1.0) * 0x1p-53;
    }

private:
    std::mt19937_64 rng_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

/// Thread cap from ELLIPSUM_THREADS (0 or unset = hardware concurrency).
inline unsigned thread_limit() {
    unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    const char* env = std::getenv("ELLIPSUM_THREADS");
    if (env == nullptr) return hw;
    long v = std::strtol(env, nullptr, 10);
    if (v <= 0) return hw;
    return static_cast<unsigned>(std::min<long>(v, hw));
}

/// Index-parallel loop. Each index is processed exactly once and results
/// must be written by index, which keeps outputs independent of the
/// thread count.
inline void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body) {
    unsigned threads = thread_limit();
    constexpr std::size_t kGrain = 256;
    if (threads <= 1 || count < 2 * kGrain) {
        for (std::size_t i = 0; i < count; ++i) body(i);
        return;
    }
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, count / kGrain + 1));
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (unsigned t = 0; t < threads; ++t) {
        pool.emplace_back([&, t] {
            for (std::size_t i = t; i < count; i += threads) body(i);
        });
    }
    for (auto& th : pool) th.join();
}

} // namespace ellipsum::detail
