#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "beltloc/calibration.hpp"
#include "beltloc/clip.hpp"
#include "beltloc/common.hpp"
#include "beltloc/config.hpp"
#include "beltloc/masking.hpp"
#include "beltloc/tdoa.hpp"

namespace beltloc {

struct DoaEstimate {
    int best_angle = 0;               // degrees, 0..359
    std::vector<double> score_curve;  // f(phi) for phi = 0..359
    int motor_index = 0;              // 1..15
    double motor_angle = 0.0;         // degrees
};

// Squared exponential kernel score between a measured TDoA vector and one
// lookup-table row: sum over pairs of sigma^2 * exp(-(d^2) / (2 l^2)).
inline double score(const TdoaVector& measured, const TdoaVector& table_row,
                    const KernelParams& params) {
    validate(params);
    if (measured.size() != table_row.size())
        throw ConfigError("score: vector length mismatch (" + std::to_string(measured.size()) +
                          " vs " + std::to_string(table_row.size()) + ")");
    const double amplitude = params.sigma * params.sigma;
    const double denom = 2.0 * params.length_scale * params.length_scale;
    double total = 0.0;
    for (size_t p = 0; p < measured.size(); ++p) {
        const double d = measured[p] - table_row[p];
        total += amplitude * std::exp(-(d * d) / denom);
    }
    return total;
}

// Scores the measurement against all 360 table rows and returns the
// argmax; exact ties resolve to the smallest angle.
inline DoaEstimate best_doa(const TdoaVector& measured, const CalibrationProfile& profile,
                            const KernelParams& params) {
    if (profile.table.size() != 360)
        throw ConfigError("best_doa: profile table must have 360 rows");
    DoaEstimate estimate;
    estimate.score_curve.resize(profile.table.size());
    int best = 0;
    double best_score = -1.0;
    for (size_t phi = 0; phi < profile.table.size(); ++phi) {
        const double s = score(measured, profile.table[phi], params);
        estimate.score_curve[phi] = s;
        if (s > best_score) {
            best_score = s;
            best = static_cast<int>(phi);
        }
    }
    estimate.best_angle = best;
    return estimate;
}

// Circular angular distance, min(|a-b|, 360-|a-b|) after wrapping.
inline double circular_distance(double a, double b) {
    const double d = std::fabs(wrap_degrees(a) - wrap_degrees(b));
    return std::min(d, 360.0 - d);
}

// Nearest motor to the predicted direction by circular distance; ties
// resolve to the smallest index. Distance is circular rather than plain
// |theta - phi| so angles across the 0/360 seam pick the right motor.
inline std::pair<int, double> select_motor(double predicted_angle,
                                           const CalibrationProfile& profile) {
    int best_index = 1;
    double best_distance = circular_distance(profile.motor_angles[0], predicted_angle);
    for (int i = 1; i < kMotorCount; ++i) {
        const double d = circular_distance(profile.motor_angles[static_cast<size_t>(i)],
                                           predicted_angle);
        if (d < best_distance) {
            best_distance = d;
            best_index = i + 1;
        }
    }
    return {best_index, profile.motor_angles[static_cast<size_t>(best_index - 1)]};
}

// Full inference: per-pair TDoAs, kernel scan over the lookup table,
// nearest-motor selection. The score curve is kept for diagnostics.
inline DoaEstimate localize(const MultichannelClip& clip, const CalibrationProfile& profile,
                            const NoiseProfile& noise, const PipelineConfig& cfg) {
    if (profile.sample_rate != cfg.sample_rate)
        throw ConfigError("profile sample rate " + std::to_string(profile.sample_rate) +
                          " does not match configured rate " + std::to_string(cfg.sample_rate));
    if (profile.frame_size != cfg.frame_size)
        throw ConfigError("profile frame size " + std::to_string(profile.frame_size) +
                          " does not match configured frame size " +
                          std::to_string(cfg.frame_size));
    const TdoaVector measured = estimate_tdoas(clip, noise, cfg);
    DoaEstimate estimate = best_doa(measured, profile, cfg.kernel);
    const auto [index, angle] = select_motor(static_cast<double>(estimate.best_angle), profile);
    estimate.motor_index = index;
    estimate.motor_angle = angle;
    return estimate;
}

}  // namespace beltloc
