#pragma once

#include <cmath>
#include <cstdint>
#include <string_view>

namespace eicsr::rng {

inline constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ull;

/// SplitMix64 finalizer. Good avalanche, cheap, stateless.
inline std::uint64_t mix(std::uint64_t x) {
    x += kGolden;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

inline std::uint64_t combine(std::uint64_t a, std::uint64_t b) {
    return mix(a ^ (b + kGolden + (a << 6) + (a >> 2)));
}

/// FNV-1a over bytes; used to key noise streams by node path.
inline std::uint64_t hash_bytes(std::string_view s) {
    std::uint64_t h = 0xCBF29CE484222325ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001B3ull;
    }
    return h;
}

/// Uniform double in (0, 1].
inline double u01_open(std::uint64_t x) {
    return static_cast<double>((x >> 11) + 1) * 0x1.0p-53;
}

/// Uniform double in [0, 1).
inline double u01(std::uint64_t x) {
    return static_cast<double>(x >> 11) * 0x1.0p-53;
}

/// Standard normal draw keyed by an arbitrary 64-bit counter. Stateless, so
/// draws are identical no matter which thread or in which order they are made.
inline double normal(std::uint64_t key) {
    const std::uint64_t a = mix(key);
    const std::uint64_t b = mix(key ^ 0xD1B54A32D192ED03ull);
    const double u1 = u01_open(a);
    const double u2 = u01(b);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
}

/// Small keyed stream for sequential draws (generator, search operators).
class Stream {
public:
    explicit Stream(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        state_ += kGolden;
        return mix(state_);
    }

    /// Derive an independent child stream; parent state is not advanced.
    Stream fork(std::uint64_t salt) const { return Stream(combine(state_, salt)); }

    double uniform() { return u01(next()); }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    double gauss() { return normal(next()); }

    /// Uniform integer in [0, n). n must be > 0.
    std::uint64_t below(std::uint64_t n) { return next() % n; }

    std::int64_t range_int(std::int64_t lo, std::int64_t hi) {
        return lo + static_cast<std::int64_t>(below(static_cast<std::uint64_t>(hi - lo + 1)));
    }

    bool bernoulli(double p) { return uniform() < p; }

private:
    std::uint64_t state_;
};

} // namespace eicsr::rng
