#pragma once

#include <fstream>
#include <string>

#include <json.hpp>

#include "beltloc/calibration.hpp"
#include "beltloc/common.hpp"
#include "beltloc/version.hpp"
#include "beltloc/wav.hpp"

namespace beltloc {

inline constexpr int kProfileFormatVersion = 1;
inline constexpr const char* kProfileFormatName = "beltloc-profile";

// Serializes the profile as JSON. Doubles are written in shortest
// round-trip decimal form, so parse(serialize(p)) reproduces every
// numeric field bit-exactly.
inline std::string serialize_profile(const CalibrationProfile& profile) {
    nlohmann::json j;
    j["format"] = kProfileFormatName;
    j["format_version"] = kProfileFormatVersion;
    j["sample_rate"] = profile.sample_rate;
    j["frame_size"] = profile.frame_size;
    j["hop"] = profile.hop;
    j["tau_max"] = profile.tau_max;
    j["kernel"] = {{"sigma", profile.kernel.sigma}, {"length_scale", profile.kernel.length_scale}};
    nlohmann::json anchors = nlohmann::json::array();
    for (const auto& anchor : profile.anchors)
        anchors.push_back({{"angle", anchor.angle}, {"tdoas", anchor.tdoas}});
    j["anchors"] = std::move(anchors);
    j["table"] = profile.table;
    j["motor_angles"] = profile.motor_angles;
    j["motor_angles_display"] = profile.motor_angles_display;
    j["created"] = profile.created;
    j["tool_version"] = profile.tool_version;
    return j.dump(2) + "\n";
}

// Parses and fully validates a serialized profile. Any structural or
// invariant problem is rejected as an I/O error naming the cause.
inline CalibrationProfile parse_profile(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw IoError(std::string("profile parse error: ") + e.what());
    }
    try {
        if (j.value("format", "") != kProfileFormatName)
            throw IoError("profile rejected: not a " + std::string(kProfileFormatName) +
                          " document");
        const int version = j.at("format_version").get<int>();
        if (version != kProfileFormatVersion)
            throw IoError("profile rejected: unknown format_version " + std::to_string(version));

        CalibrationProfile profile;
        profile.sample_rate = j.at("sample_rate").get<double>();
        profile.frame_size = j.at("frame_size").get<int>();
        profile.hop = j.at("hop").get<int>();
        profile.tau_max = j.at("tau_max").get<int>();
        profile.kernel.sigma = j.at("kernel").at("sigma").get<double>();
        profile.kernel.length_scale = j.at("kernel").at("length_scale").get<double>();
        for (const auto& a : j.at("anchors")) {
            CalibrationAnchor anchor;
            anchor.angle = a.at("angle").get<double>();
            anchor.tdoas = a.at("tdoas").get<TdoaVector>();
            profile.anchors.push_back(std::move(anchor));
        }
        profile.table = j.at("table").get<std::vector<TdoaVector>>();
        const auto motor_angles = j.at("motor_angles").get<std::vector<double>>();
        const auto display = j.at("motor_angles_display").get<std::vector<int>>();
        if (motor_angles.size() != kMotorCount || display.size() != kMotorCount)
            throw IoError("profile rejected: expected " + std::to_string(kMotorCount) +
                          " motor angles");
        std::copy(motor_angles.begin(), motor_angles.end(), profile.motor_angles.begin());
        std::copy(display.begin(), display.end(), profile.motor_angles_display.begin());
        profile.created = j.value("created", "");
        profile.tool_version = j.value("tool_version", "");

        try {
            validate(profile);
        } catch (const Error& e) {
            throw IoError(std::string("profile rejected: ") + e.what());
        }
        return profile;
    } catch (const nlohmann::json::exception& e) {
        throw IoError(std::string("profile rejected: ") + e.what());
    }
}

inline void write_profile(const CalibrationProfile& profile, const std::string& path) {
    const std::string text = serialize_profile(profile);
    write_file_atomic(path, text.data(), text.size());
}

inline CalibrationProfile read_profile(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open profile " + path);
    const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return parse_profile(text);
}

}  // namespace beltloc
