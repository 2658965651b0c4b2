#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "beltloc/common.hpp"
#include "beltloc/evaluation.hpp"
#include "beltloc/version.hpp"
#include "beltloc/wav.hpp"

namespace beltloc {

inline constexpr int kReportFormatVersion = 1;
inline constexpr const char* kReportFormatName = "beltloc-report";

inline nlohmann::json report_to_json(const EvaluationReport& report) {
    nlohmann::json j;
    j["name"] = report.scenario_id;
    j["mae"] = report.mae;
    j["match_rate"] = report.match_rate;
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& row : report.per_angle) {
        rows.push_back({{"reference", row.reference},
                        {"predicted", row.predicted},
                        {"error", row.error},
                        {"predicted_motor", row.predicted_motor},
                        {"reference_motor", row.reference_motor},
                        {"match", row.match},
                        {"ok", row.ok},
                        {"note", row.note}});
    }
    j["per_angle"] = std::move(rows);
    return j;
}

// Aggregates per-sweep reports into one document.
inline std::string serialize_reports(const std::vector<EvaluationReport>& reports,
                                     const std::string& profile_id) {
    nlohmann::json j;
    j["format"] = kReportFormatName;
    j["format_version"] = kReportFormatVersion;
    j["tool_version"] = kToolVersion;
    j["profile"] = profile_id;
    nlohmann::json sweeps = nlohmann::json::array();
    for (const auto& report : reports) sweeps.push_back(report_to_json(report));
    j["sweeps"] = std::move(sweeps);
    return j.dump(2) + "\n";
}

inline void write_reports(const std::vector<EvaluationReport>& reports,
                          const std::string& profile_id, const std::string& path) {
    const std::string text = serialize_reports(reports, profile_id);
    write_file_atomic(path, text.data(), text.size());
}

}  // namespace beltloc
