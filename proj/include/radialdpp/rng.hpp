#pragma once

#include <cmath>
#include <cstdint>

#include "util.hpp"

namespace radialdpp {

namespace detail {

inline constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ull;

inline std::uint64_t mix64(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xBF58476D1CE4E5B9ull;
    z ^= z >> 27;
    z *= 0x94D049BB133111EBull;
    z ^= z >> 31;
    return z;
}

} // namespace detail

/// Counter-mode generator (splitmix64 stream). Streams are keyed by
/// (seed, replicate, kind, index) so any particle's randomness is a pure
/// function of its key: the draw order across particles, replicates, or
/// threads cannot change results.
class CounterRng {
public:
    enum Kind : std::uint64_t {
        kRadius = 1,
        kSegment = 2,
        kGeneric = 3,
    };

    CounterRng(std::uint64_t seed, std::uint64_t replicate, std::uint64_t kind,
               std::uint64_t index) {
        std::uint64_t s = detail::mix64(seed + detail::kGolden);
        s = detail::mix64(s ^ (replicate * 0xC2B2AE3D27D4EB4Full + 0x165667B19E3779F9ull));
        s = detail::mix64(s ^ (kind * 0x27D4EB2F165667C5ull + detail::kGolden));
        s = detail::mix64(s ^ (index * 0x9E3779B97F4A7C15ull + 0xD6E8FEB86659FD93ull));
        state_ = s;
    }

    std::uint64_t next_u64() {
        state_ += detail::kGolden;
        return detail::mix64(state_);
    }

    /// Uniform on [0, 1).
    double uniform() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    /// Uniform on (0, 1].
    double uniform_pos() {
        return (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
    }

    /// Standard normal (Box-Muller, cosine branch).
    double normal() {
        const double u1 = uniform_pos();
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * kPi * u2);
    }

    /// Gamma(shape, 1) via the squeeze/rejection method with a normal-based
    /// proposal for shape >= 1; shapes below 1 are boosted by one and
    /// corrected with a power of an extra uniform.
    double gamma(double shape) {
        if (shape < 1.0) {
            const double u = uniform_pos();
            return gamma(shape + 1.0) * std::pow(u, 1.0 / shape);
        }
        const double d = shape - 1.0 / 3.0;
        const double c = 1.0 / std::sqrt(9.0 * d);
        for (;;) {
            double x, v;
            do {
                x = normal();
                v = 1.0 + c * x;
            } while (v <= 0.0);
            v = v * v * v;
            const double u = uniform_pos();
            if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
            if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
        }
    }

    /// Beta(a, b) as a ratio of gammas. Also exposes one-minus the draw
    /// computed without cancellation, for values crowding 1.
    struct BetaDraw {
        double value;
        double one_minus;
    };

    BetaDraw beta(double a, double b) {
        const double x = gamma(a);
        const double y = gamma(b);
        const double s = x + y;
        return {x / s, y / s};
    }

private:
    std::uint64_t state_;
};

} // namespace radialdpp
