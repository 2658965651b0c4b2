#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "beltloc/common.hpp"
#include "beltloc/stft.hpp"

namespace beltloc {

// Stationary background noise estimate: per-bin power averaged over the
// frames and channels of a designated-silence recording.
struct NoiseProfile {
    std::vector<double> psd;  // length N/2+1, same units as |X|^2
    long frames_observed = 0;
};

// A profile that masks nothing: psd = 0 everywhere, so any bin with
// nonzero power passes. Used when no silence recording is available.
inline NoiseProfile zero_noise_profile(int frame_size) {
    NoiseProfile p;
    p.psd.assign(static_cast<size_t>(frame_size / 2 + 1), 0.0);
    p.frames_observed = 1;
    return p;
}

inline NoiseProfile estimate_noise(const std::vector<Spectrogram>& silence_spectrograms) {
    if (silence_spectrograms.empty() || silence_spectrograms[0].frame_count() == 0)
        throw AlgorithmError("noise estimation needs at least one silence frame");
    const int bins = silence_spectrograms[0].bin_count();
    NoiseProfile profile;
    profile.psd.assign(static_cast<size_t>(bins), 0.0);
    long count = 0;
    for (const auto& spec : silence_spectrograms) {
        if (spec.bin_count() != bins)
            throw ConfigError("silence spectrograms have mismatched bin counts");
        for (const auto& frame : spec.frames) {
            for (int f = 0; f < bins; ++f) profile.psd[static_cast<size_t>(f)] += std::norm(frame[static_cast<size_t>(f)]);
            ++count;
        }
    }
    if (count == 0) throw AlgorithmError("noise estimation needs at least one silence frame");
    for (auto& v : profile.psd) v /= static_cast<double>(count);
    profile.frames_observed = count;
    return profile;
}

// Binary time-frequency mask shared by all microphone pairs; values[t][f]
// is 0 or 1.
struct BinaryMask {
    std::vector<std::vector<uint8_t>> values;

    int frame_count() const { return static_cast<int>(values.size()); }

    // Fraction of ones in frame t.
    double frame_density(int t) const {
        const auto& row = values[static_cast<size_t>(t)];
        if (row.empty()) return 0.0;
        long ones = 0;
        for (uint8_t v : row) ones += v;
        return static_cast<double>(ones) / static_cast<double>(row.size());
    }
};

// M(t,f) = 1 iff the channel-averaged power at (t,f) strictly exceeds
// threshold_factor * psd(f).
inline BinaryMask compute_mask(const std::vector<Spectrogram>& spectrograms,
                               const NoiseProfile& noise, double threshold_factor) {
    if (spectrograms.empty()) throw ConfigError("compute_mask: no spectrograms");
    if (threshold_factor <= 0.0) throw ConfigError("mask threshold factor must be positive");
    const int bins = spectrograms[0].bin_count();
    const int frames = spectrograms[0].frame_count();
    if (noise.psd.size() != static_cast<size_t>(bins))
        throw ConfigError("noise profile has " + std::to_string(noise.psd.size()) +
                          " bins, spectrogram has " + std::to_string(bins));
    if (noise.frames_observed < 1)
        throw ConfigError("noise profile has not observed any frames");
    for (const auto& spec : spectrograms)
        if (spec.frame_count() != frames || spec.bin_count() != bins)
            throw ConfigError("compute_mask: spectrogram shapes disagree");

    BinaryMask mask;
    mask.values.assign(static_cast<size_t>(frames),
                       std::vector<uint8_t>(static_cast<size_t>(bins), 0));
    const double channels = static_cast<double>(spectrograms.size());
    for (int t = 0; t < frames; ++t) {
        for (int f = 0; f < bins; ++f) {
            double power = 0.0;
            for (const auto& spec : spectrograms)
                power += std::norm(spec.frames[static_cast<size_t>(t)][static_cast<size_t>(f)]);
            power /= channels;
            if (power > threshold_factor * noise.psd[static_cast<size_t>(f)])
                mask.values[static_cast<size_t>(t)][static_cast<size_t>(f)] = 1;
        }
    }
    return mask;
}

}  // namespace beltloc
