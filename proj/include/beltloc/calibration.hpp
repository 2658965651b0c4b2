#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "beltloc/clip.hpp"
#include "beltloc/common.hpp"
#include "beltloc/config.hpp"
#include "beltloc/masking.hpp"
#include "beltloc/tdoa.hpp"

namespace beltloc {

inline constexpr std::array<double, 8> kAnchorAngles = {0.0,   45.0,  90.0,  135.0,
                                                        180.0, 225.0, 270.0, 315.0};
inline constexpr int kMotorCount = 15;

// One calibration direction: the angle the user faced and the measured
// per-pair delays.
struct CalibrationAnchor {
    double angle = 0.0;  // degrees, one of kAnchorAngles
    TdoaVector tdoas;
};

// The persisted calibration artifact: a 360-row lookup table mapping each
// integer-degree azimuth to its 28 expected delays, plus the fifteen
// motor directions recovered from it.
struct CalibrationProfile {
    std::vector<TdoaVector> table;                   // 360 x 28, real-valued
    std::array<double, kMotorCount> motor_angles{};  // theta_1..theta_15, degrees
    std::array<int, kMotorCount> motor_angles_display{};
    std::vector<CalibrationAnchor> anchors;

    double sample_rate = 0.0;
    int frame_size = 0;
    int hop = 0;
    int tau_max = 0;
    KernelParams kernel;
    std::string created;       // optional timestamp; empty keeps outputs reproducible
    std::string tool_version;
};

// Piecewise-linear interpolation of the eight anchors onto the 1-degree
// grid, wrapping circularly across 315 -> 0. Rows at anchor angles copy
// the anchor values exactly.
inline std::vector<TdoaVector> build_lookup_table(std::vector<CalibrationAnchor> anchors) {
    if (anchors.size() != kAnchorAngles.size())
        throw ConfigError("calibration needs exactly 8 anchors, got " +
                          std::to_string(anchors.size()));
    std::sort(anchors.begin(), anchors.end(),
              [](const CalibrationAnchor& a, const CalibrationAnchor& b) { return a.angle < b.angle; });
    for (size_t i = 0; i < anchors.size(); ++i) {
        if (anchors[i].angle != kAnchorAngles[i])
            throw ConfigError("missing or duplicate anchor angle: expected anchors at "
                              "0,45,...,315 degrees");
        if (anchors[i].tdoas.size() != anchors[0].tdoas.size() || anchors[i].tdoas.empty())
            throw ConfigError("anchor TDoA vectors must be nonempty and equally sized");
    }

    const size_t columns = anchors[0].tdoas.size();
    std::vector<TdoaVector> table(360, TdoaVector(columns));
    for (int phi = 0; phi < 360; ++phi) {
        const size_t seg = static_cast<size_t>(phi / 45);
        const auto& lo = anchors[seg].tdoas;
        const auto& hi = anchors[(seg + 1) % anchors.size()].tdoas;
        const double frac = (phi - kAnchorAngles[seg]) / 45.0;
        auto& row = table[static_cast<size_t>(phi)];
        for (size_t p = 0; p < columns; ++p)
            row[p] = (1.0 - frac) * lo[p] + frac * hi[p];
    }
    return table;
}

namespace detail {

// Sub-degree zero crossings of one pair's interpolated TDoA curve,
// scanning the 1-degree grid circularly. A crossing between integer
// degrees is refined by linear interpolation.
inline std::vector<double> zero_crossings(const std::vector<TdoaVector>& table, int column) {
    std::vector<double> crossings;
    for (int phi = 0; phi < 360; ++phi) {
        const double a = table[static_cast<size_t>(phi)][static_cast<size_t>(column)];
        const double b = table[static_cast<size_t>((phi + 1) % 360)][static_cast<size_t>(column)];
        if (a == 0.0)
            crossings.push_back(static_cast<double>(phi));
        else if (a * b < 0.0)
            crossings.push_back(static_cast<double>(phi) + a / (a - b));
    }
    return crossings;
}

// Recursive search over one crossing per pair, keeping only strictly
// increasing angle sequences and minimizing the spread of consecutive
// gaps (motors are evenly spaced on the belt, so the true assignment is
// the most equally spaced one).
inline void search_assignment(const std::vector<std::vector<double>>& candidates, size_t depth,
                              std::vector<double>& current, std::vector<double>& best,
                              double& best_objective) {
    if (depth == candidates.size()) {
        double objective = 0.0;
        if (current.size() > 1) {
            const double mean = (current.back() - current.front()) /
                                static_cast<double>(current.size() - 1);
            for (size_t i = 0; i + 1 < current.size(); ++i) {
                const double d = current[i + 1] - current[i] - mean;
                objective += d * d;
            }
        }
        if (objective < best_objective) {
            best_objective = objective;
            best = current;
        }
        return;
    }
    for (double angle : candidates[depth]) {
        if (!current.empty() && angle <= current.back()) continue;
        current.push_back(angle);
        search_assignment(candidates, depth + 1, current, best, best_objective);
        current.pop_back();
    }
}

}  // namespace detail

// Recovers theta_2, theta_4, ..., theta_14: motor 2k sits midway between
// microphones k and k+1, so its direction is where the pair-(k,k+1) TDoA
// curve crosses zero. Each pair generically crosses twice per revolution
// (facing the pair and diametrically behind it); the assignment chosen is
// the strictly increasing one closest to equal spacing.
inline std::vector<double> find_even_motor_angles(const std::vector<TdoaVector>& table,
                                                  int channels = 8) {
    if (table.size() != 360) throw ConfigError("lookup table must have 360 rows");
    std::vector<std::vector<double>> candidates;
    for (int k = 0; k < channels - 1; ++k) {
        const int column = pair_column(k, k + 1, channels);
        auto crossings = detail::zero_crossings(table, column);
        if (crossings.empty())
            throw AlgorithmError("calibration degenerate: pair (" + std::to_string(k + 1) + "," +
                                 std::to_string(k + 2) + ") has no zero crossing");
        candidates.push_back(std::move(crossings));
    }

    std::vector<double> best;
    std::vector<double> current;
    double best_objective = std::numeric_limits<double>::infinity();
    detail::search_assignment(candidates, 0, current, best, best_objective);
    if (best.empty())
        throw AlgorithmError("calibration degenerate: no strictly increasing assignment of "
                             "zero crossings exists");
    return best;
}

// theta_{2k+1} = (theta_{2k} + theta_{2k+2}) / 2.
inline std::vector<double> interpolate_odd_motor_angles(const std::vector<double>& theta_even) {
    if (theta_even.size() < 2)
        throw ConfigError("odd motor interpolation needs at least 2 even angles");
    for (size_t i = 0; i + 1 < theta_even.size(); ++i)
        if (theta_even[i] >= theta_even[i + 1])
            throw ConfigError("even motor angles must be strictly increasing");
    std::vector<double> odd(theta_even.size() - 1);
    for (size_t i = 0; i + 1 < theta_even.size(); ++i)
        odd[i] = 0.5 * (theta_even[i] + theta_even[i + 1]);
    return odd;
}

// theta_1 = (3*theta_2 - theta_3) / 2 and theta_15 = (3*theta_14 - theta_13) / 2.
inline std::pair<double, double> extrapolate_end_motor_angles(double theta_2, double theta_3,
                                                              double theta_13, double theta_14) {
    return {0.5 * (3.0 * theta_2 - theta_3), 0.5 * (3.0 * theta_14 - theta_13)};
}

// Assembles all fifteen motor angles from the seven even ones.
inline std::array<double, kMotorCount> assemble_motor_angles(const std::vector<double>& theta_even) {
    if (theta_even.size() != 7)
        throw ConfigError("belt motor assembly needs 7 even angles, got " +
                          std::to_string(theta_even.size()));
    const auto odd = interpolate_odd_motor_angles(theta_even);
    std::array<double, kMotorCount> angles{};
    for (size_t k = 0; k < theta_even.size(); ++k) angles[2 * k + 1] = theta_even[k];  // motors 2,4,..
    for (size_t k = 0; k < odd.size(); ++k) angles[2 * k + 2] = odd[k];                // motors 3,5,..
    const auto [first, last] =
        extrapolate_end_motor_angles(angles[1], angles[2], angles[12], angles[13]);
    angles[0] = first;
    angles[14] = last;
    return angles;
}

// Display values follow floor rounding; internal math stays real-valued.
inline std::array<int, kMotorCount> display_motor_angles(
    const std::array<double, kMotorCount>& angles) {
    std::array<int, kMotorCount> display{};
    for (size_t i = 0; i < angles.size(); ++i)
        display[i] = static_cast<int>(std::floor(angles[i]));
    return display;
}

inline void validate(const CalibrationProfile& profile) {
    if (profile.table.size() != 360)
        throw ConfigError("profile table must have 360 rows, has " +
                          std::to_string(profile.table.size()));
    const size_t columns = profile.table[0].size();
    for (const auto& row : profile.table) {
        if (row.size() != columns) throw ConfigError("profile table rows have unequal lengths");
        for (double v : row)
            if (std::abs(v) > static_cast<double>(profile.tau_max))
                throw ConfigError("profile table entry exceeds tau_max");
    }
    for (size_t i = 0; i + 1 < profile.motor_angles.size(); ++i)
        if (profile.motor_angles[i] >= profile.motor_angles[i + 1])
            throw ConfigError("profile motor angles must be strictly increasing (theta_" +
                              std::to_string(i + 1) + " >= theta_" + std::to_string(i + 2) + ")");
    for (const auto& anchor : profile.anchors) {
        const auto it = std::find(kAnchorAngles.begin(), kAnchorAngles.end(), anchor.angle);
        if (it == kAnchorAngles.end())
            throw ConfigError("profile anchor at non-canonical angle");
        const auto& row = profile.table[static_cast<size_t>(anchor.angle)];
        if (anchor.tdoas != row)
            throw ConfigError("profile table row at anchor angle " +
                              std::to_string(static_cast<int>(anchor.angle)) +
                              " does not reproduce the anchor TDoAs");
    }
}

struct CalibrationRecording {
    double angle = 0.0;
    MultichannelClip clip;
};

// Full calibration: estimate per-anchor TDoAs, interpolate the lookup
// table, recover the motor directions, validate the profile invariants.
inline CalibrationProfile calibrate(const std::vector<CalibrationRecording>& recordings,
                                    const MultichannelClip& silence, const PipelineConfig& cfg) {
    validate(cfg);
    if (recordings.size() != kAnchorAngles.size())
        throw ConfigError("calibration needs exactly 8 recordings, got " +
                          std::to_string(recordings.size()));
    for (const auto& rec : recordings) {
        validate(rec.clip);
        if (static_cast<double>(rec.clip.frame_count()) < cfg.sample_rate)
            throw AlgorithmError("calibration recording at " + std::to_string(rec.angle) +
                                 " degrees is shorter than 1 s");
    }

    const auto noise = estimate_noise(stft(silence, cfg.frame_size, cfg.hop, cfg.window));

    std::vector<CalibrationAnchor> anchors;
    anchors.reserve(recordings.size());
    for (const auto& rec : recordings)
        anchors.push_back({rec.angle, estimate_tdoas(rec.clip, noise, cfg)});

    CalibrationProfile profile;
    profile.anchors = anchors;
    profile.table = build_lookup_table(anchors);
    const auto even = find_even_motor_angles(profile.table, recordings[0].clip.channel_count());
    profile.motor_angles = assemble_motor_angles(even);
    profile.motor_angles_display = display_motor_angles(profile.motor_angles);
    profile.sample_rate = cfg.sample_rate;
    profile.frame_size = cfg.frame_size;
    profile.hop = cfg.hop;
    profile.tau_max = cfg.tau_max;
    profile.kernel = cfg.kernel;

    try {
        validate(profile);
    } catch (const Error& e) {
        throw AlgorithmError(std::string("calibration failed: ") + e.what());
    }
    return profile;
}

}  // namespace beltloc
