#pragma once

#include <string>

#include "beltloc/common.hpp"
#include "beltloc/stft.hpp"

namespace beltloc {

// Squared exponential kernel parameters. length_scale is in samples.
struct KernelParams {
    double sigma = 1.0;
    double length_scale = 0.707;
};

inline void validate(const KernelParams& k) {
    if (k.sigma <= 0.0) throw ConfigError("kernel sigma must be positive");
    if (k.length_scale <= 0.0) throw ConfigError("kernel length scale must be positive");
}

// Pipeline parameters. Defaults follow the reference operating point:
// 1024-sample frames with 50% overlap at 44.1 kHz (a ~23 ms analysis
// window), mask threshold +3 dB over the noise floor, lags clipped to
// +/-64 samples.
struct PipelineConfig {
    double sample_rate = 44100.0;
    int frame_size = 1024;
    int hop = 512;
    Window window = Window::hann;
    double mask_threshold = 2.0;       // beta, power ratio over the noise floor
    int tau_max = 64;                  // samples
    double min_mask_density = 0.05;    // below this a frame is unreliable
    bool allow_unreliable_fallback = false;
    KernelParams kernel;
};

inline void validate(const PipelineConfig& cfg) {
    if (cfg.sample_rate <= 0.0) throw ConfigError("sample_rate must be positive");
    if (!is_power_of_two(static_cast<size_t>(cfg.frame_size)))
        throw ConfigError("frame_size must be a power of two, got " +
                          std::to_string(cfg.frame_size));
    if (cfg.hop < 1 || cfg.hop > cfg.frame_size)
        throw ConfigError("hop must satisfy 1 <= hop <= frame_size");
    if (cfg.mask_threshold <= 0.0) throw ConfigError("mask_threshold must be positive");
    if (cfg.tau_max < 1 || cfg.tau_max >= cfg.frame_size / 2)
        throw ConfigError("tau_max must satisfy 1 <= tau_max < frame_size/2");
    if (cfg.min_mask_density < 0.0 || cfg.min_mask_density > 1.0)
        throw ConfigError("min_mask_density must lie in [0, 1]");
    validate(cfg.kernel);
}

}  // namespace beltloc
