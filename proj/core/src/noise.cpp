#include "tomotv/noise.hpp"

#include <cmath>
#include <stdexcept>

namespace tomotv {

namespace {

std::uint64_t poisson_knuth(double mean, RngStream& rng) {
    const double limit = std::exp(-mean);
    std::uint64_t k = 0;
    double p = 1.0;
    do {
        ++k;
        p *= rng.next_double();
    } while (p > limit);
    return k - 1;
}

/// Hormann's PTRS transformed-rejection sampler, exact for mean >= ~10.
std::uint64_t poisson_ptrs(double mean, RngStream& rng) {
    const double b = 0.931 + 2.53 * std::sqrt(mean);
    const double a = -0.059 + 0.02483 * b;
    const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
    const double v_r = 0.9277 - 3.6224 / (b - 2.0);
    const double log_mean = std::log(mean);
    for (;;) {
        double u = rng.next_double() - 0.5;
        double v = rng.next_double();
        const double us = 0.5 - std::abs(u);
        const double kf = std::floor((2.0 * a / us + b) * u + mean + 0.43);
        if (us >= 0.07 && v <= v_r) return static_cast<std::uint64_t>(kf);
        if (kf < 0.0 || (us < 0.013 && v > us)) continue;
        if (std::log(v * inv_alpha / (a / (us * us) + b)) <=
            kf * log_mean - mean - std::lgamma(kf + 1.0))
            return static_cast<std::uint64_t>(kf);
    }
}

} // namespace

std::uint64_t poisson_sample(double mean, RngStream& rng) {
    if (!std::isfinite(mean) || mean < 0.0)
        throw std::invalid_argument("poisson_sample: mean must be finite and nonnegative");
    if (mean == 0.0) return 0;
    if (mean < 30.0) return poisson_knuth(mean, rng);
    return poisson_ptrs(mean, rng);
}

NoisePreset noise_preset_from_string(const std::string& name) {
    if (name == "none") return NoisePreset::none;
    if (name == "low") return NoisePreset::low;
    if (name == "high") return NoisePreset::high;
    throw std::invalid_argument("unknown noise preset: " + name);
}

std::string to_string(NoisePreset preset) {
    switch (preset) {
        case NoisePreset::none: return "none";
        case NoisePreset::low: return "low";
        case NoisePreset::high: return "high";
    }
    return "?";
}

NoiseModel make_noise_model(NoisePreset preset, std::uint64_t seed) {
    NoiseModel m;
    m.seed = seed;
    switch (preset) {
        case NoisePreset::none: m.mean_counts_at_max = 0.0; break;
        case NoisePreset::low: m.mean_counts_at_max = kLowNoiseCounts; break;
        case NoisePreset::high: m.mean_counts_at_max = kHighNoiseCounts; break;
    }
    return m;
}

Sinogram apply_poisson(const Sinogram& g, const NoiseModel& model) {
    if (!(model.mean_counts_at_max > 0.0) || !std::isfinite(model.mean_counts_at_max))
        throw std::invalid_argument("apply_poisson: mean_counts_at_max must be positive");
    double gmax = 0.0;
    for (std::size_t q = 0; q < g.size(); ++q) {
        if (!(g[q] >= 0.0))
            throw std::invalid_argument("apply_poisson: negative input pixel");
        gmax = std::max(gmax, g[q]);
    }
    if (gmax == 0.0)
        throw std::invalid_argument("apply_poisson: all-zero sinogram");

    const double scale_factor = gmax / model.mean_counts_at_max;
    Sinogram out(g.rows(), g.cols());
    for (std::size_t q = 0; q < g.size(); ++q) {
        if (g[q] == 0.0) continue;
        RngStream rng(model.seed, q);
        out[q] = scale_factor *
                 static_cast<double>(poisson_sample(g[q] / scale_factor, rng));
    }
    return out;
}

} // namespace tomotv
