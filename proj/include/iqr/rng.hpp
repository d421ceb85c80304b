#pragma once

// Deterministic random number generation.  Results must be bit-identical for
// a given seed across platforms and standard libraries, so we do not touch
// <random>: the generator is SplitMix64 (Steele/Lea/Flood; the finalizer
// constants are written out below) and normal variates come from the
// Box-Muller transform applied to 53-bit uniforms.

#include <cmath>
#include <cstdint>

namespace iqr {

/// SplitMix64: state advances by the golden-ratio increment
/// 0x9E3779B97F4A7C15; output mixing multiplies by 0xBF58476D1CE4E5B9 and
/// 0x94D049BB133111EB with xor-shifts 30/27/31.
class SplitMix64 {
  public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    /// Uniform double in (0,1]: top 53 bits scaled by 2^-53, zero mapped up
    /// to 2^-53 so logarithms stay finite.
    double next_unit() {
        const double u = static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
        return u > 0.0 ? u : 0x1.0p-53;
    }

    /// Uniform double in [lo, hi).
    double next_in(double lo, double hi) {
        return lo + (hi - lo) * (static_cast<double>(next_u64() >> 11) * 0x1.0p-53);
    }

    /// Standard normal variate, Box-Muller: z = sqrt(-2 ln u1) cos(2 pi u2).
    /// Both variates of each pair are consumed (cos then sin) so draws map
    /// to generator outputs in a fixed pattern.
    double next_normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        const double u1 = next_unit();
        const double u2 = next_unit();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 6.283185307179586476925286766559 * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

  private:
    std::uint64_t state_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

} // namespace iqr
