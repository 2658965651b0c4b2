#pragma once

#include <algorithm>
#include <complex>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "beltloc/clip.hpp"
#include "beltloc/common.hpp"
#include "beltloc/config.hpp"
#include "beltloc/fft.hpp"
#include "beltloc/masking.hpp"
#include "beltloc/stft.hpp"

namespace beltloc {

// Per-pair delays in samples, ordered by the pair enumeration (28 entries
// for eight channels). The sign convention matches the geometric delay
// (|src-mic_u| - |src-mic_v|) * fs / c: positive when the pair's first
// microphone is farther from the source.
using TdoaVector = std::vector<double>;

// One frame of cross-correlation, values indexed by lag in
// [-tau_max, +tau_max]. `reliable` carries the mask-density flag.
struct CorrelationFrame {
    std::vector<double> values;
    int tau_max = 0;
    bool reliable = false;

    int lag_count() const { return static_cast<int>(values.size()); }
    double at_lag(int tau) const { return values[static_cast<size_t>(tau + tau_max)]; }
};

// Frequency-domain cross-correlation of one frame pair: Xu * conj(Xv),
// elementwise over the half spectrum.
inline std::vector<std::complex<double>> cross_spectrum(
    std::span<const std::complex<double>> xu, std::span<const std::complex<double>> xv) {
    if (xu.size() != xv.size())
        throw ConfigError("cross_spectrum: length mismatch (" + std::to_string(xu.size()) +
                          " vs " + std::to_string(xv.size()) + ")");
    std::vector<std::complex<double>> r(xu.size());
    for (size_t f = 0; f < xu.size(); ++f) r[f] = xu[f] * std::conj(xv[f]);
    return r;
}

// Masked GCC-PHAT for one frame pair. Each bin of the half spectrum is
// whitened to unit magnitude, zeroed where the mask is 0 (bins with
// |R| = 0 contribute zero as well), mirrored to the full spectrum and
// inverse transformed. Output is truncated to lags [-tau_max, +tau_max]
// using the circular lag convention.
inline CorrelationFrame gcc_phat(std::span<const std::complex<double>> cross,
                                 std::span<const uint8_t> mask_row, int tau_max, const Fft& fft,
                                 double min_mask_density = 0.05) {
    const size_t n = fft.size();
    if (cross.size() != n / 2 + 1)
        throw ConfigError("gcc_phat: cross spectrum has " + std::to_string(cross.size()) +
                          " bins, expected " + std::to_string(n / 2 + 1));
    if (mask_row.size() != cross.size())
        throw ConfigError("gcc_phat: mask row length mismatch");
    if (tau_max < 1 || static_cast<size_t>(tau_max) >= n / 2)
        throw ConfigError("gcc_phat: tau_max must satisfy 1 <= tau_max < N/2");

    std::vector<std::complex<double>> full(n, {0.0, 0.0});
    long kept = 0;
    for (size_t f = 0; f < cross.size(); ++f) {
        if (!mask_row[f]) continue;
        ++kept;
        const double mag = std::abs(cross[f]);
        if (mag == 0.0) continue;
        const std::complex<double> w = cross[f] / mag;
        full[f] = w;
        if (f > 0 && f < n / 2) full[n - f] = std::conj(w);
    }

    CorrelationFrame frame;
    frame.tau_max = tau_max;
    frame.reliable = static_cast<double>(kept) / static_cast<double>(cross.size()) >=
                     min_mask_density;
    frame.values.resize(static_cast<size_t>(2 * tau_max + 1));
    if (kept == 0) return frame;  // correlation identically zero

    const std::vector<double> corr = fft.inverse_real(full);
    for (int tau = -tau_max; tau <= tau_max; ++tau) {
        const size_t idx = tau >= 0 ? static_cast<size_t>(tau) : n - static_cast<size_t>(-tau);
        frame.values[static_cast<size_t>(tau + tau_max)] = corr[idx];
    }
    return frame;
}

// Convenience overload constructing the transform internally.
inline CorrelationFrame gcc_phat(std::span<const std::complex<double>> cross,
                                 std::span<const uint8_t> mask_row, int tau_max,
                                 double min_mask_density = 0.05) {
    const Fft fft((cross.size() - 1) * 2);
    return gcc_phat(cross, mask_row, tau_max, fft, min_mask_density);
}

// Argmax over lags; exact ties resolve to the smallest (most negative) lag.
inline int peak_lag(const CorrelationFrame& frame) {
    if (frame.values.empty()) throw ConfigError("peak_lag: empty correlation frame");
    int best = -frame.tau_max;
    double best_value = frame.at_lag(best);
    for (int tau = -frame.tau_max + 1; tau <= frame.tau_max; ++tau) {
        const double v = frame.at_lag(tau);
        if (v > best_value) {
            best_value = v;
            best = tau;
        }
    }
    return best;
}

struct FrameLag {
    int lag = 0;
    bool reliable = false;
};

// Mode over the reliable frames' integer lags; ties resolve to the
// smallest lag. With fallback enabled, all frames are used when none are
// reliable.
inline double aggregate_mode(std::span<const FrameLag> per_frame_lags,
                             bool fallback_to_all = false) {
    std::map<int, long> histogram;
    for (const auto& fl : per_frame_lags)
        if (fl.reliable) ++histogram[fl.lag];
    if (histogram.empty() && fallback_to_all)
        for (const auto& fl : per_frame_lags) ++histogram[fl.lag];
    if (histogram.empty())
        throw AlgorithmError("no reliable frames");
    int best_lag = 0;
    long best_count = -1;
    for (const auto& [lag, count] : histogram) {  // ascending lag order
        if (count > best_count) {
            best_count = count;
            best_lag = lag;
        }
    }
    return static_cast<double>(best_lag);
}

// Full per-pair TDoA estimation: STFT, shared binary mask, masked GCC-PHAT
// and peak picking per frame, mode aggregation per pair.
inline TdoaVector estimate_tdoas(const MultichannelClip& clip, const NoiseProfile& noise,
                                 const PipelineConfig& cfg) {
    validate(cfg);
    validate(clip);
    if (clip.sample_rate != cfg.sample_rate)
        throw ConfigError("clip sample rate " + std::to_string(clip.sample_rate) +
                          " does not match configured rate " + std::to_string(cfg.sample_rate));

    const auto specs = stft(clip, cfg.frame_size, cfg.hop, cfg.window);
    const auto mask = compute_mask(specs, noise, cfg.mask_threshold);
    const auto pairs = enumerate_pairs(clip.channel_count());
    const Fft fft(static_cast<size_t>(cfg.frame_size));

    const int frames = specs[0].frame_count();
    std::vector<std::vector<FrameLag>> lags(pairs.size());
    for (auto& v : lags) v.reserve(static_cast<size_t>(frames));

    for (int t = 0; t < frames; ++t) {
        const auto& mask_row = mask.values[static_cast<size_t>(t)];
        for (size_t p = 0; p < pairs.size(); ++p) {
            const auto& xu = specs[static_cast<size_t>(pairs[p].u)].frames[static_cast<size_t>(t)];
            const auto& xv = specs[static_cast<size_t>(pairs[p].v)].frames[static_cast<size_t>(t)];
            const auto cross = cross_spectrum(xu, xv);
            const auto corr = gcc_phat(cross, mask_row, cfg.tau_max, fft, cfg.min_mask_density);
            lags[p].push_back({peak_lag(corr), corr.reliable});
        }
    }

    TdoaVector delays(pairs.size());
    for (size_t p = 0; p < pairs.size(); ++p)
        delays[p] = aggregate_mode(lags[p], cfg.allow_unreliable_fallback);
    return delays;
}

}  // namespace beltloc
