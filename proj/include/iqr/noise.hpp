#pragma once

// Synthetic measurement noise.  A signal is corrupted by i.i.d. standard
// normals rescaled so the L-infinity ratio max|noisy - clean| / max|clean|
// equals alpha exactly (up to a final rounding); the generator is the fixed
// SplitMix64 / Box-Muller pipeline from rng.hpp, so a seed pins every byte
// downstream.

#include <cmath>
#include <cstdint>
#include <cstddef>
#include <span>
#include <vector>

#include "errors.hpp"
#include "rng.hpp"

namespace iqr {

struct NoiseSpec {
    double alpha = 0.0;      ///< relative L-inf noise level, >= 0
    std::uint64_t seed = 0;  ///< generator seed
};

struct NoisySignal {
    std::vector<double> clean;
    std::vector<double> noisy;
};

/// Additive noise with exact L-inf calibration.  alpha = 0 returns the
/// signal unchanged without consuming randomness.
inline NoisySignal corrupt_linf(std::span<const double> clean, const NoiseSpec& spec) {
    if (spec.alpha < 0.0) throw InvalidArgument("corrupt_linf: alpha must be nonnegative");
    NoisySignal out;
    out.clean.assign(clean.begin(), clean.end());
    out.noisy = out.clean;
    if (spec.alpha == 0.0 || clean.empty()) return out;

    double max_clean = 0.0;
    for (const double v : clean) max_clean = std::max(max_clean, std::abs(v));
    if (max_clean == 0.0) throw ZeroSignal("corrupt_linf: cannot scale noise on a zero signal");

    SplitMix64 rng(spec.seed);
    std::vector<double> draws(clean.size());
    double max_draw = 0.0;
    for (double& d : draws) {
        d = rng.next_normal();
        max_draw = std::max(max_draw, std::abs(d));
    }
    // max_draw > 0 with probability 1; all-zero draws cannot scale
    if (max_draw == 0.0) throw ZeroSignal("corrupt_linf: degenerate noise draw");
    const double target = spec.alpha * max_clean;
    for (std::size_t i = 0; i < draws.size(); ++i)
        out.noisy[i] = out.clean[i] + draws[i] * target / max_draw;
    return out;
}

/// One perturbation signal with its piecewise-linear geometry: values at
/// nodes of a polyline (open chain), seg_len[i] the length of the segment
/// between nodes i and i+1.  Closed chains repeat the first node at the end.
struct WeightedSignal {
    std::vector<double> diff;
    std::vector<double> seg_len;
};

/// Combined noise amplitude
///   delta = sqrt( sum_signals integral (noisy - clean)^2 )
/// where each integral treats the samples as a piecewise-linear function and
/// is evaluated exactly -- the same quadrature the load assembly uses for the
/// data terms, so delta agrees with the c of the perturbation to rounding.
inline double l2_delta(std::span<const WeightedSignal> signals) {
    double acc = 0.0;
    for (const WeightedSignal& s : signals) {
        if (s.diff.size() < 2) {
            if (!s.diff.empty() && !s.seg_len.empty())
                throw DimensionMismatch("l2_delta: segment count must be node count - 1");
            continue;
        }
        if (s.seg_len.size() + 1 != s.diff.size())
            throw DimensionMismatch("l2_delta: segment count must be node count - 1");
        for (std::size_t i = 0; i + 1 < s.diff.size(); ++i) {
            const double a = s.diff[i], b = s.diff[i + 1];
            if (!(s.seg_len[i] > 0.0)) throw InvalidArgument("l2_delta: segment length <= 0");
            acc += s.seg_len[i] / 3.0 * (a * a + a * b + b * b);
        }
    }
    return std::sqrt(acc);
}

} // namespace iqr
