#pragma once

#include <fstream>
#include <string>

#include <json.hpp>

#include "beltloc/common.hpp"
#include "beltloc/simulate.hpp"
#include "beltloc/wav.hpp"

namespace beltloc {

inline constexpr int kTruthFormatVersion = 1;
inline constexpr const char* kTruthFormatName = "beltloc-truth";

// Ground-truth sidecar accompanying each simulated WAV, so evaluation
// never re-derives truth from filenames.
inline std::string serialize_truth(const GroundTruth& truth) {
    nlohmann::json j;
    j["format"] = kTruthFormatName;
    j["format_version"] = kTruthFormatVersion;
    j["source_angle"] = truth.source_angle;
    j["source_distance"] = truth.source_distance;
    j["delays"] = truth.delays;
    j["noise_std"] = truth.noise_std;
    if (truth.snr_db)
        j["snr_db"] = *truth.snr_db;
    else
        j["snr_db"] = nullptr;
    j["seed"] = truth.seed;
    j["signal"] = truth.signal;
    j["sample_rate"] = truth.sample_rate;
    return j.dump(2) + "\n";
}

inline GroundTruth parse_truth(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw IoError(std::string("truth sidecar parse error: ") + e.what());
    }
    try {
        if (j.value("format", "") != kTruthFormatName)
            throw IoError("truth sidecar rejected: not a " + std::string(kTruthFormatName) +
                          " document");
        if (j.at("format_version").get<int>() != kTruthFormatVersion)
            throw IoError("truth sidecar rejected: unknown format_version");
        GroundTruth truth;
        truth.source_angle = j.at("source_angle").get<double>();
        truth.source_distance = j.at("source_distance").get<double>();
        truth.delays = j.at("delays").get<std::vector<double>>();
        truth.noise_std = j.at("noise_std").get<double>();
        if (j.contains("snr_db") && !j.at("snr_db").is_null())
            truth.snr_db = j.at("snr_db").get<double>();
        truth.seed = j.at("seed").get<uint64_t>();
        truth.signal = j.at("signal").get<std::string>();
        truth.sample_rate = j.at("sample_rate").get<double>();
        return truth;
    } catch (const nlohmann::json::exception& e) {
        throw IoError(std::string("truth sidecar rejected: ") + e.what());
    }
}

inline void write_truth(const GroundTruth& truth, const std::string& path) {
    const std::string text = serialize_truth(truth);
    write_file_atomic(path, text.data(), text.size());
}

inline GroundTruth read_truth(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open truth sidecar " + path);
    const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return parse_truth(text);
}

}  // namespace beltloc
