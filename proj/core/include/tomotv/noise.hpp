#pragma once

#include <cstdint>
#include <string>

#include "tomotv/grid.hpp"

namespace tomotv {

/// splitmix64 step; the stream and keying scheme below are the reproducibility
/// contract for all sampled noise.
inline std::uint64_t splitmix64_next(std::uint64_t& state) {
    state += 0x9E3779B97F4A7C15ull;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

inline std::uint64_t hash64(std::uint64_t x) {
    return splitmix64_next(x);
}

/// Counter-based stream: state0 = hash64(hash64(seed) + counter), then the
/// plain splitmix64 sequence. Streams keyed by (seed, pixel index) make the
/// output independent of evaluation order and thread count.
class RngStream {
public:
    RngStream(std::uint64_t seed, std::uint64_t counter)
        : state_(hash64(hash64(seed) + counter)) {}

    std::uint64_t next_u64() { return splitmix64_next(state_); }
    /// Uniform double in [0, 1).
    double next_double() { return (next_u64() >> 11) * 0x1.0p-53; }

private:
    std::uint64_t state_;
};

/// Exact Poisson sample: Knuth's product method for mean < 30, PTRS
/// transformed rejection above.
std::uint64_t poisson_sample(double mean, RngStream& rng);

enum class NoisePreset { none, low, high };

NoisePreset noise_preset_from_string(const std::string& name);
std::string to_string(NoisePreset preset);

/// Poisson corruption model. The single scale knob is the target mean photon
/// count at the sinogram maximum: each pixel is drawn as
///   out = scale_factor * Poisson(g / scale_factor),
/// scale_factor = max(g) / mean_counts_at_max.
struct NoiseModel {
    double mean_counts_at_max = 0.0;
    std::uint64_t seed = 0;
};

/// Preset count levels, calibrated once on the two-disc reference phantom so
/// the corrupted sinogram lands at the reported SNR levels (about 18.5 dB and
/// 8.7 dB); frozen here.
inline constexpr double kLowNoiseCounts = 125.0;
inline constexpr double kHighNoiseCounts = 13.0;

NoiseModel make_noise_model(NoisePreset preset, std::uint64_t seed);

/// Applies seeded Poisson corruption; rejects negative input pixels and
/// all-zero sinograms (no scale can be formed). Zero pixels stay zero.
Sinogram apply_poisson(const Sinogram& g, const NoiseModel& model);

} // namespace tomotv
