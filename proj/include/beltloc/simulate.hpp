#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "beltloc/clip.hpp"
#include "beltloc/common.hpp"
#include "beltloc/fft.hpp"
#include "beltloc/geometry.hpp"

namespace beltloc {

// Self-contained deterministic RNG so synthesized clips are bit-identical
// across platforms and standard libraries.
class SplitMix64 {
public:
    explicit SplitMix64(uint64_t seed) : state_(seed) {}

    uint64_t next() {
        uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // Uniform in [0, 1).
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    // Standard normal via Box-Muller.
    double gaussian() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        const double u1 = 1.0 - uniform();  // (0, 1]
        const double u2 = uniform();
        const double radius = std::sqrt(-2.0 * std::log(u1));
        const double angle = 2.0 * kPi * u2;
        spare_ = radius * std::sin(angle);
        have_spare_ = true;
        return radius * std::cos(angle);
    }

private:
    uint64_t state_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

inline uint64_t mix_seed(uint64_t base, uint64_t stream) {
    SplitMix64 g(base ^ (0xd1342543de82ef95ULL * (stream + 1)));
    return g.next();
}

struct SignalSpec {
    enum class Kind { white_noise, band_noise, tone_complex, wav_file, silence };

    Kind kind = Kind::white_noise;
    double f_lo = 100.0;   // band_noise only, Hz
    double f_hi = 500.0;   // band_noise only, Hz
    double f0 = 440.0;     // tone_complex fundamental, Hz
    int harmonics = 5;     // tone_complex
    std::string wav_path;  // wav_file only

    std::string describe() const {
        switch (kind) {
            case Kind::white_noise: return "white-noise";
            case Kind::band_noise:
                return "band-limited-noise(" + std::to_string(f_lo) + "," + std::to_string(f_hi) + ")";
            case Kind::tone_complex:
                return "tone-complex(f0=" + std::to_string(f0) +
                       ",harmonics=" + std::to_string(harmonics) + ")";
            case Kind::wav_file: return "wav-file(" + wav_path + ")";
            case Kind::silence: return "silence";
        }
        return "unknown";
    }
};

struct BeltScenario {
    BeltGeometry geometry;
    double source_angle = 0.0;      // degrees
    double source_distance = 2.0;   // meters
    SignalSpec signal;
    double duration = 2.0;          // seconds
    std::optional<double> snr_db;   // absent: no channel noise
    std::optional<double> noise_std;  // absolute override; required for silence
    uint64_t seed = 0;
    double sample_rate = 44100.0;
};

struct GroundTruth {
    double source_angle = 0.0;
    double source_distance = 0.0;
    std::vector<double> delays;  // per-pair geometric TDoAs, samples
    double noise_std = 0.0;
    std::optional<double> snr_db;
    uint64_t seed = 0;
    std::string signal;
    double sample_rate = 0.0;
};

struct SimulatedClip {
    MultichannelClip clip;
    GroundTruth truth;
};

namespace detail {

// Source waveform over an extended index range, unit RMS.
// offset maps buffer index i to sample time i - offset.
inline std::vector<double> make_source(const SignalSpec& spec, size_t length, double sample_rate,
                                       SplitMix64& rng) {
    std::vector<double> s(length, 0.0);
    switch (spec.kind) {
        case SignalSpec::Kind::silence:
            return s;
        case SignalSpec::Kind::white_noise: {
            for (auto& v : s) v = rng.gaussian();
            return s;
        }
        case SignalSpec::Kind::band_noise: {
            if (spec.f_lo < 0.0 || spec.f_hi <= spec.f_lo || spec.f_hi > sample_rate / 2.0)
                throw ConfigError("band-limited-noise needs 0 <= f_lo < f_hi <= fs/2");
            size_t nfft = 1;
            while (nfft < length) nfft <<= 1;
            std::vector<std::complex<double>> buf(nfft, {0.0, 0.0});
            for (size_t i = 0; i < length; ++i) buf[i] = {rng.gaussian(), 0.0};
            const Fft fft(nfft);
            fft.transform(buf.data(), false);
            for (size_t k = 0; k < nfft; ++k) {
                const size_t folded = std::min(k, nfft - k);
                const double freq = static_cast<double>(folded) * sample_rate /
                                    static_cast<double>(nfft);
                if (freq < spec.f_lo || freq > spec.f_hi) buf[k] = {0.0, 0.0};
            }
            fft.transform(buf.data(), true);
            const double scale = 1.0 / static_cast<double>(nfft);
            for (size_t i = 0; i < length; ++i) s[i] = buf[i].real() * scale;
            break;
        }
        case SignalSpec::Kind::tone_complex: {
            if (spec.f0 <= 0.0) throw ConfigError("tone-complex fundamental must be positive");
            int used = 0;
            for (int h = 1; h <= spec.harmonics; ++h) {
                const double freq = spec.f0 * static_cast<double>(h);
                if (freq >= sample_rate / 2.0) break;
                const double phase = 2.0 * kPi * rng.uniform();
                for (size_t i = 0; i < length; ++i)
                    s[i] += std::sin(2.0 * kPi * freq * static_cast<double>(i) / sample_rate + phase);
                ++used;
            }
            if (used == 0)
                throw ConfigError("tone-complex has no harmonics below Nyquist");
            break;
        }
        case SignalSpec::Kind::wav_file:
            // Loaded by the caller (needs file I/O); see synthesize_from_source.
            throw ConfigError("wav-file sources must be expanded before synthesis");
    }
    // Unit RMS so SNR accounting is consistent across signal kinds.
    double power = 0.0;
    for (double v : s) power += v * v;
    power /= static_cast<double>(length);
    if (power > 0.0) {
        const double inv = 1.0 / std::sqrt(power);
        for (auto& v : s) v *= inv;
    }
    return s;
}

// 64-tap Blackman-windowed sinc fractional delay. The taps realize a
// delay of 31 + frac samples; integer delays collapse to a pure shift.
inline std::vector<double> fractional_delay_taps(double frac) {
    constexpr int kTaps = 64;
    constexpr int kCenter = 31;
    std::vector<double> h(kTaps);
    double sum = 0.0;
    for (int j = 0; j < kTaps; ++j) {
        const double x = static_cast<double>(j) - (static_cast<double>(kCenter) + frac);
        const double sinc = x == 0.0 ? 1.0 : std::sin(kPi * x) / (kPi * x);
        const double t = static_cast<double>(j) / static_cast<double>(kTaps - 1);
        const double window = 0.42 - 0.5 * std::cos(2.0 * kPi * t) + 0.08 * std::cos(4.0 * kPi * t);
        h[static_cast<size_t>(j)] = sinc * window;
        sum += h[static_cast<size_t>(j)];
    }
    for (auto& v : h) v /= sum;  // unit DC gain
    return h;
}

}  // namespace detail

// Synthesizes the scenario with an explicit source waveform (unit RMS,
// covering index range [-margin, length+margin) via `source[i + margin]`).
// Used directly for wav-file sources; other kinds go through synthesize().
inline SimulatedClip synthesize_from_source(const BeltScenario& scenario,
                                            const std::vector<double>& source, size_t margin,
                                            size_t length) {
    const auto& g = scenario.geometry;
    if (g.mic_count() < 2) throw ConfigError("scenario geometry has no microphones");
    if (scenario.duration <= 0.0) throw ConfigError("scenario duration must be positive");
    if (scenario.sample_rate <= 0.0) throw ConfigError("scenario sample rate must be positive");
    if (scenario.source_distance <= g.shape.max_radius())
        throw AlgorithmError("source lies inside the belt perimeter");

    const Point2 src = source_position(scenario.source_angle, scenario.source_distance);
    const int channels = g.mic_count();

    SimulatedClip out;
    out.clip.sample_rate = scenario.sample_rate;
    out.clip.samples.assign(static_cast<size_t>(channels), std::vector<double>(length, 0.0));

    double nearest = -1.0;
    int nearest_mic = 0;
    std::vector<double> dist(static_cast<size_t>(channels));
    for (int c = 0; c < channels; ++c) {
        dist[static_cast<size_t>(c)] = distance(src, g.mic_positions[static_cast<size_t>(c)]);
        if (nearest < 0.0 || dist[static_cast<size_t>(c)] < nearest) {
            nearest = dist[static_cast<size_t>(c)];
            nearest_mic = c;
        }
    }

    const bool mute = scenario.signal.kind == SignalSpec::Kind::silence;
    if (!mute) {
        auto src_at = [&](long m) -> double {
            const long idx = m + static_cast<long>(margin);
            if (idx < 0 || idx >= static_cast<long>(source.size())) return 0.0;
            return source[static_cast<size_t>(idx)];
        };
        for (int c = 0; c < channels; ++c) {
            const double delay = dist[static_cast<size_t>(c)] * scenario.sample_rate /
                                 g.speed_of_sound;
            long whole = static_cast<long>(std::floor(delay));
            double frac = delay - static_cast<double>(whole);
            if (frac > 1.0 - 1e-9) {
                ++whole;
                frac = 0.0;
            }
            const double gain = 1.0 / dist[static_cast<size_t>(c)];
            auto& y = out.clip.samples[static_cast<size_t>(c)];
            if (frac < 1e-9) {
                for (size_t n = 0; n < length; ++n)
                    y[n] = gain * src_at(static_cast<long>(n) - whole);
            } else {
                const auto taps = detail::fractional_delay_taps(frac);
                for (size_t n = 0; n < length; ++n) {
                    double acc = 0.0;
                    for (int j = 0; j < static_cast<int>(taps.size()); ++j)
                        acc += taps[static_cast<size_t>(j)] *
                               src_at(static_cast<long>(n) - whole + 31 - j);
                    y[n] = gain * acc;
                }
            }
        }
    }

    // Channel noise level: explicit override, or derived from the SNR
    // against the nearest microphone's clean signal power.
    double noise_std = 0.0;
    if (scenario.noise_std) {
        noise_std = *scenario.noise_std;
        if (noise_std < 0.0) throw ConfigError("noise_std must be nonnegative");
    } else if (scenario.snr_db) {
        if (mute)
            throw ConfigError("silence scenario requires an explicit noise_std");
        double power = 0.0;
        for (double v : out.clip.samples[static_cast<size_t>(nearest_mic)]) power += v * v;
        power /= static_cast<double>(length);
        noise_std = std::sqrt(power * std::pow(10.0, -*scenario.snr_db / 10.0));
    }
    if (noise_std > 0.0) {
        for (int c = 0; c < channels; ++c) {
            SplitMix64 rng(mix_seed(scenario.seed, 0x100u + static_cast<uint64_t>(c)));
            for (auto& v : out.clip.samples[static_cast<size_t>(c)])
                v += noise_std * rng.gaussian();
        }
    }

    out.truth.source_angle = scenario.source_angle;
    out.truth.source_distance = scenario.source_distance;
    out.truth.delays = true_tdoas(g, scenario.source_angle, scenario.source_distance,
                                  scenario.sample_rate);
    out.truth.noise_std = noise_std;
    out.truth.snr_db = scenario.snr_db;
    out.truth.seed = scenario.seed;
    out.truth.signal = scenario.signal.describe();
    out.truth.sample_rate = scenario.sample_rate;
    return out;
}

inline size_t scenario_length(const BeltScenario& scenario) {
    if (scenario.duration <= 0.0) throw ConfigError("scenario duration must be positive");
    if (scenario.sample_rate <= 0.0) throw ConfigError("scenario sample rate must be positive");
    const size_t length =
        static_cast<size_t>(std::llround(scenario.duration * scenario.sample_rate));
    if (length == 0) throw ConfigError("scenario duration must be positive");
    return length;
}

// Head/tail padding covering the largest propagation delay plus the
// fractional-delay filter support.
inline size_t scenario_margin(const BeltScenario& scenario) {
    double max_delay = 0.0;
    const Point2 src = source_position(scenario.source_angle, scenario.source_distance);
    for (const auto& mic : scenario.geometry.mic_positions)
        max_delay = std::max(max_delay, distance(src, mic) * scenario.sample_rate /
                                            scenario.geometry.speed_of_sound);
    return static_cast<size_t>(std::ceil(max_delay)) + 64;
}

inline SimulatedClip synthesize(const BeltScenario& scenario) {
    if (scenario.signal.kind == SignalSpec::Kind::wav_file)
        throw ConfigError("wav-file sources carry file I/O; synthesize them via the manifest "
                          "runner");
    const size_t length = scenario_length(scenario);
    const size_t margin = scenario_margin(scenario);
    SplitMix64 rng(mix_seed(scenario.seed, 1));
    const auto source = detail::make_source(scenario.signal, length + 2 * margin,
                                            scenario.sample_rate, rng);
    return synthesize_from_source(scenario, source, margin, length);
}

// Per-angle sweep item with a deterministically derived seed.
inline BeltScenario sweep_item(const BeltScenario& base, double angle, size_t index) {
    BeltScenario scenario = base;
    scenario.source_angle = angle;
    scenario.seed = mix_seed(base.seed, 0x1000u + index);
    return scenario;
}

// One scenario per angle; per-item seeds derive deterministically from the
// base scenario's seed.
inline std::vector<SimulatedClip> run_sweep(const BeltScenario& base,
                                            const std::vector<double>& angles) {
    if (angles.empty()) throw ConfigError("sweep needs a nonempty angle list");
    std::vector<SimulatedClip> clips;
    clips.reserve(angles.size());
    for (size_t k = 0; k < angles.size(); ++k)
        clips.push_back(synthesize(sweep_item(base, angles[k], k)));
    return clips;
}

}  // namespace beltloc
