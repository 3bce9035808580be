#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <vector>

namespace leakbf {

/// What a random stream is consumed for. Streams keyed by different purposes
/// are statistically independent even for the same (seed, trial, ue).
enum class RngPurpose : std::uint64_t {
    channel = 1,
    codebook = 2,
    true_direction = 3,
    randomization = 4,
    generic = 5,
};

namespace detail {

// splitmix64 finalizer; full-avalanche 64-bit mix.
inline std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

} // namespace detail

/// Counter-based splittable generator. A stream is derived from the tuple
/// (seed, trial, ue, purpose); draws walk a Weyl sequence through the
/// splitmix64 finalizer, so replay is deterministic and streams for distinct
/// trials can be consumed from different threads without coordination.
class StreamRng {
public:
    StreamRng() : counter_(0), key_(0) {}

    static StreamRng keyed(std::uint64_t seed, std::uint64_t trial,
                           std::uint64_t ue, RngPurpose purpose) {
        StreamRng r;
        std::uint64_t k = detail::mix64(seed);
        k = detail::mix64(k ^ (trial * 0xd1342543de82ef95ULL));
        k = detail::mix64(k ^ (ue * 0xaf251af3b0f025b5ULL));
        k = detail::mix64(k ^ static_cast<std::uint64_t>(purpose));
        r.key_ = k;
        return r;
    }

    std::uint64_t next_u64() {
        return detail::mix64(key_ + (counter_++) * 0x9e3779b97f4a7c15ULL);
    }

    /// Uniform double in [0, 1).
    double uniform() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    /// Standard normal via Box-Muller (pairs cached).
    double gaussian() {
        if (have_cached_) {
            have_cached_ = false;
            return cached_;
        }
        double u1 = 1.0 - uniform(); // (0, 1], keeps log finite
        double u2 = uniform();
        double r = std::sqrt(-2.0 * std::log(u1));
        double a = 6.283185307179586476925286766559 * u2;
        cached_ = r * std::sin(a);
        have_cached_ = true;
        return r * std::cos(a);
    }

    /// Entry of a unit-variance circularly symmetric complex Gaussian.
    std::complex<double> complex_gaussian() {
        double re = gaussian();
        double im = gaussian();
        return {re * 0.7071067811865475244, im * 0.7071067811865475244};
    }

    std::vector<std::complex<double>> complex_gaussian_vector(std::size_t n) {
        std::vector<std::complex<double>> v(n);
        for (auto& x : v) x = complex_gaussian();
        return v;
    }

private:
    std::uint64_t counter_;
    std::uint64_t key_;
    double cached_ = 0.0;
    bool have_cached_ = false;
};

} // namespace leakbf
