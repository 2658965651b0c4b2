#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "beltloc/calibration.hpp"
#include "beltloc/common.hpp"
#include "beltloc/config.hpp"
#include "beltloc/localization.hpp"
#include "beltloc/masking.hpp"
#include "beltloc/simulate.hpp"

namespace beltloc {

// Circular error in [0, 180] between two azimuths.
inline double circular_error(double a, double b) {
    double d = std::fmod(std::fabs(a - b), 360.0);
    return std::min(d, 360.0 - d);
}

inline double compute_mae(const std::vector<double>& predictions,
                          const std::vector<double>& references) {
    if (predictions.empty()) throw ConfigError("MAE needs at least one prediction");
    if (predictions.size() != references.size())
        throw ConfigError("MAE: prediction and reference counts differ");
    double total = 0.0;
    for (size_t k = 0; k < predictions.size(); ++k)
        total += circular_error(predictions[k], references[k]);
    return total / static_cast<double>(predictions.size());
}

// The motor that should be activated for the reference direction, under
// the same selection rule as predictions.
inline int reference_motor(double reference_angle, const CalibrationProfile& profile) {
    return select_motor(reference_angle, profile).first;
}

struct AngleResult {
    double reference = 0.0;      // ground-truth azimuth, degrees
    double predicted = 0.0;      // predicted azimuth, degrees
    double error = 0.0;          // circular error, degrees
    int predicted_motor = 0;
    int reference_motor = 0;
    bool match = false;
    bool ok = true;              // false when localization failed
    std::string note;
};

struct EvaluationReport {
    std::vector<AngleResult> per_angle;
    double mae = 0.0;
    double match_rate = 0.0;
    std::string scenario_id;
    std::string profile_id;
};

// Localizes every clip of a sweep and assembles the report. Failed
// localizations count as misses (180 degrees, no match) rather than
// aborting the sweep.
inline EvaluationReport evaluate_sweep(const std::vector<SimulatedClip>& sweep,
                                       const CalibrationProfile& profile,
                                       const NoiseProfile& noise, const PipelineConfig& cfg) {
    if (sweep.empty()) throw ConfigError("evaluate_sweep: empty sweep");
    EvaluationReport report;
    report.per_angle.reserve(sweep.size());
    double error_total = 0.0;
    long matches = 0;
    for (const auto& item : sweep) {
        AngleResult row;
        row.reference = item.truth.source_angle;
        row.reference_motor = reference_motor(row.reference, profile);
        try {
            const DoaEstimate estimate = localize(item.clip, profile, noise, cfg);
            row.predicted = static_cast<double>(estimate.best_angle);
            row.predicted_motor = estimate.motor_index;
            row.error = circular_error(row.predicted, row.reference);
            row.match = row.predicted_motor == row.reference_motor;
        } catch (const Error& e) {
            row.ok = false;
            row.note = e.what();
            row.error = 180.0;
            row.match = false;
        }
        error_total += row.error;
        matches += row.match ? 1 : 0;
        report.per_angle.push_back(std::move(row));
    }
    report.mae = error_total / static_cast<double>(report.per_angle.size());
    report.match_rate = static_cast<double>(matches) / static_cast<double>(report.per_angle.size());
    return report;
}

}  // namespace beltloc
