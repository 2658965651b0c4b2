#pragma once

#include <complex>
#include <span>
#include <string>
#include <vector>

#include "beltloc/clip.hpp"
#include "beltloc/common.hpp"
#include "beltloc/fft.hpp"

namespace beltloc {

enum class Window { hann, rectangular };

// Periodic Hann, the usual choice for 50% overlap analysis.
inline std::vector<double> make_window(Window kind, int n) {
    std::vector<double> w(static_cast<size_t>(n), 1.0);
    if (kind == Window::hann) {
        for (int i = 0; i < n; ++i)
            w[static_cast<size_t>(i)] =
                0.5 * (1.0 - std::cos(2.0 * kPi * static_cast<double>(i) / static_cast<double>(n)));
    }
    return w;
}

// Complex bins indexed by (frame t, frequency bin f), f in 0..N/2.
struct Spectrogram {
    std::vector<std::vector<std::complex<double>>> frames;
    int frame_size = 0;  // N
    int hop = 0;
    double sample_rate = 0.0;

    int frame_count() const { return static_cast<int>(frames.size()); }
    int bin_count() const { return frame_size / 2 + 1; }
};

// Forward STFT of one channel. Frame t covers samples
// [t*hop, t*hop + frame_size); the trailing partial frame is dropped.
inline Spectrogram stft_channel(std::span<const double> samples, double sample_rate,
                                int frame_size, int hop, Window window, const Fft& fft) {
    if (hop < 1 || hop > frame_size)
        throw ConfigError("stft hop must satisfy 1 <= hop <= frame_size");
    if (samples.size() < static_cast<size_t>(frame_size))
        throw AlgorithmError("insufficient samples: clip has " + std::to_string(samples.size()) +
                             ", one frame needs " + std::to_string(frame_size));
    const auto win = make_window(window, frame_size);
    const size_t frame_count = (samples.size() - static_cast<size_t>(frame_size)) /
                                   static_cast<size_t>(hop) +
                               1;
    Spectrogram spec;
    spec.frame_size = frame_size;
    spec.hop = hop;
    spec.sample_rate = sample_rate;
    spec.frames.reserve(frame_count);
    std::vector<double> frame(static_cast<size_t>(frame_size));
    for (size_t t = 0; t < frame_count; ++t) {
        const size_t start = t * static_cast<size_t>(hop);
        for (size_t i = 0; i < frame.size(); ++i) frame[i] = samples[start + i] * win[i];
        spec.frames.push_back(fft.forward_real(frame));
    }
    return spec;
}

// Per-channel STFTs of a multichannel clip.
inline std::vector<Spectrogram> stft(const MultichannelClip& clip, int frame_size, int hop,
                                     Window window = Window::hann) {
    validate(clip);
    if (!is_power_of_two(static_cast<size_t>(frame_size)))
        throw ConfigError("stft frame size must be a power of two, got " +
                          std::to_string(frame_size));
    const Fft fft(static_cast<size_t>(frame_size));
    std::vector<Spectrogram> specs;
    specs.reserve(static_cast<size_t>(clip.channel_count()));
    for (const auto& channel : clip.samples)
        specs.push_back(stft_channel(channel, clip.sample_rate, frame_size, hop, window, fft));
    return specs;
}

// Inverse DFT of a full-length complex sequence assembled with conjugate
// symmetry; scaled by 1/N. Index n maps to lag tau = n for n < N/2 and
// tau = n - N for n >= N/2 (circular lag convention).
inline std::vector<double> inverse_transform_correlation(
    std::span<const std::complex<double>> spectrum_row) {
    if (!is_power_of_two(spectrum_row.size()))
        throw ConfigError("inverse_transform_correlation: length must be a power of two, got " +
                          std::to_string(spectrum_row.size()));
    const Fft fft(spectrum_row.size());
    return fft.inverse_real(spectrum_row);
}

}  // namespace beltloc
