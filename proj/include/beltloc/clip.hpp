#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "beltloc/common.hpp"

namespace beltloc {

// Multichannel time-domain audio, one sample vector per channel.
// Amplitudes are dimensionless, nominally in [-1, 1].
struct MultichannelClip {
    std::vector<std::vector<double>> samples;
    double sample_rate = 0.0;

    int channel_count() const { return static_cast<int>(samples.size()); }
    size_t frame_count() const { return samples.empty() ? 0 : samples[0].size(); }
    double duration() const {
        return sample_rate > 0.0 ? static_cast<double>(frame_count()) / sample_rate : 0.0;
    }
};

// Checks the clip invariants: >= 2 channels, equal channel lengths,
// positive sample rate. Throws ConfigError describing the violation.
inline void validate(const MultichannelClip& clip) {
    if (clip.channel_count() < 2)
        throw ConfigError("clip must have at least 2 channels, has " +
                          std::to_string(clip.channel_count()));
    if (clip.sample_rate <= 0.0)
        throw ConfigError("clip sample rate must be positive");
    const size_t len = clip.samples[0].size();
    for (int c = 1; c < clip.channel_count(); ++c) {
        if (clip.samples[c].size() != len)
            throw ConfigError("clip channels have unequal lengths (channel " +
                              std::to_string(c + 1) + ")");
    }
}

}  // namespace beltloc
