#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "beltloc/common.hpp"
#include "beltloc/geometry.hpp"
#include "beltloc/simulate.hpp"
#include "beltloc/wav.hpp"

namespace beltloc {

inline constexpr int kManifestFormatVersion = 1;
inline constexpr const char* kManifestFormatName = "beltloc-manifest";

struct SweepSpec {
    std::string name;
    SignalSpec signal;
    std::vector<double> angles;
    double duration = 2.0;
    std::optional<double> snr_db;
    std::string out_dir;  // relative to the manifest location
};

struct CalibrationSpec {
    std::vector<double> angles{0, 45, 90, 135, 180, 225, 270, 315};
    double duration = 3.0;
    std::optional<double> snr_db;
    double silence_duration = 2.0;
    std::string out_dir = "calibration";
};

// Batch description for the simulator: geometry, source placement, and
// the sweeps to synthesize. All paths are relative to the manifest file.
struct ScenarioManifest {
    BeltShape shape;
    double arc_span = 280.0;
    double speed_of_sound = 343.0;
    double sample_rate = 44100.0;
    double source_distance = 2.0;
    uint64_t seed = 0;
    std::optional<CalibrationSpec> calibration;
    std::vector<SweepSpec> sweeps;

    BeltGeometry geometry() const {
        return make_geometry(shape, arc_span, 8, 15, speed_of_sound);
    }
};

namespace detail {

inline SignalSpec parse_signal(const nlohmann::json& j) {
    SignalSpec spec;
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "white-noise") {
        spec.kind = SignalSpec::Kind::white_noise;
    } else if (kind == "band-limited-noise") {
        spec.kind = SignalSpec::Kind::band_noise;
        spec.f_lo = j.at("f_lo").get<double>();
        spec.f_hi = j.at("f_hi").get<double>();
    } else if (kind == "tone-complex") {
        spec.kind = SignalSpec::Kind::tone_complex;
        spec.f0 = j.value("f0", 440.0);
        spec.harmonics = j.value("harmonics", 5);
    } else if (kind == "wav-file") {
        spec.kind = SignalSpec::Kind::wav_file;
        spec.wav_path = j.at("path").get<std::string>();
    } else if (kind == "silence") {
        spec.kind = SignalSpec::Kind::silence;
    } else {
        throw IoError("manifest rejected: unsupported signal kind \"" + kind + "\"");
    }
    return spec;
}

}  // namespace detail

inline ScenarioManifest parse_manifest(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw IoError(std::string("manifest parse error: ") + e.what());
    }
    try {
        if (j.value("format", "") != kManifestFormatName)
            throw IoError("manifest rejected: not a " + std::string(kManifestFormatName) +
                          " document");
        const int version = j.at("format_version").get<int>();
        if (version != kManifestFormatVersion)
            throw IoError("manifest rejected: unknown format_version " + std::to_string(version));

        ScenarioManifest m;
        const auto& g = j.at("geometry");
        const std::string shape = g.value("shape", "circle");
        if (shape == "circle") {
            const double r = g.at("radius").get<double>();
            m.shape = {r, r};
        } else if (shape == "ellipse") {
            m.shape = {g.at("semi_x").get<double>(), g.at("semi_y").get<double>()};
        } else {
            throw IoError("manifest rejected: unsupported shape \"" + shape + "\"");
        }
        m.arc_span = g.value("arc_span", 280.0);
        m.speed_of_sound = g.value("speed_of_sound", 343.0);
        m.sample_rate = j.value("sample_rate", 44100.0);
        m.source_distance = j.value("source_distance", 2.0);
        m.seed = j.value("seed", uint64_t{0});

        if (j.contains("calibration")) {
            const auto& c = j.at("calibration");
            CalibrationSpec spec;
            if (c.contains("angles")) spec.angles = c.at("angles").get<std::vector<double>>();
            spec.duration = c.value("duration", 3.0);
            if (c.contains("snr_db") && !c.at("snr_db").is_null())
                spec.snr_db = c.at("snr_db").get<double>();
            spec.silence_duration = c.value("silence_duration", 2.0);
            spec.out_dir = c.value("out_dir", std::string("calibration"));
            m.calibration = std::move(spec);
        }
        if (j.contains("sweeps")) {
            for (const auto& s : j.at("sweeps")) {
                SweepSpec spec;
                spec.name = s.at("name").get<std::string>();
                spec.signal = detail::parse_signal(s.at("signal"));
                spec.angles = s.at("angles").get<std::vector<double>>();
                spec.duration = s.value("duration", 2.0);
                if (s.contains("snr_db") && !s.at("snr_db").is_null())
                    spec.snr_db = s.at("snr_db").get<double>();
                spec.out_dir = s.value("out_dir", spec.name);
                m.sweeps.push_back(std::move(spec));
            }
        }
        return m;
    } catch (const nlohmann::json::exception& e) {
        throw IoError(std::string("manifest rejected: ") + e.what());
    }
}

inline ScenarioManifest read_manifest(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open manifest " + path);
    const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return parse_manifest(text);
}

// Resolves a manifest-relative path against the manifest's directory.
inline std::string resolve_manifest_path(const std::string& manifest_path,
                                         const std::string& relative) {
    namespace fs = std::filesystem;
    const fs::path base = fs::path(manifest_path).parent_path();
    return (base / relative).string();
}

// Synthesizes one manifest scenario, expanding wav-file sources (paths
// resolve against the manifest location; the first channel is used).
inline SimulatedClip synthesize_item(const BeltScenario& scenario,
                                     const std::string& manifest_path) {
    if (scenario.signal.kind != SignalSpec::Kind::wav_file) return synthesize(scenario);

    const std::string path = resolve_manifest_path(manifest_path, scenario.signal.wav_path);
    const MultichannelClip wav = [&] {
        try {
            return read_wav(path);
        } catch (const Error& e) {
            throw IoError("wav source unreadable: " + std::string(e.what()));
        }
    }();
    if (wav.sample_rate != scenario.sample_rate)
        throw ConfigError("wav source rate " + std::to_string(wav.sample_rate) +
                          " does not match scenario rate " + std::to_string(scenario.sample_rate));

    const size_t length = scenario_length(scenario);
    const size_t margin = scenario_margin(scenario);
    if (wav.frame_count() < length)
        throw ConfigError("wav source is shorter than the scenario duration");

    std::vector<double> source(length + 2 * margin, 0.0);
    double power = 0.0;
    for (size_t i = 0; i < length; ++i) {
        source[i + margin] = wav.samples[0][i];
        power += wav.samples[0][i] * wav.samples[0][i];
    }
    power /= static_cast<double>(length);
    if (power > 0.0) {
        const double inv = 1.0 / std::sqrt(power);
        for (auto& v : source) v *= inv;
    }
    return synthesize_from_source(scenario, source, margin, length);
}

}  // namespace beltloc
