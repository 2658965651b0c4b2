#pragma once

#include <array>
#include <cmath>
#include <string>
#include <vector>

#include "beltloc/common.hpp"

namespace beltloc {

using Point2 = std::array<double, 2>;

// Belt perimeter shape: an ellipse with the given semi-axes (meters);
// equal axes give a circle.
struct BeltShape {
    double semi_x = 0.15;
    double semi_y = 0.15;

    bool is_circle() const { return semi_x == semi_y; }
    double max_radius() const { return std::max(semi_x, semi_y); }

    // Radius at azimuth (polar form about the center).
    double radius_at(double azimuth_deg) const {
        const double a = deg_to_rad(azimuth_deg);
        const double cx = semi_y * std::cos(a);
        const double cy = semi_x * std::sin(a);
        return semi_x * semi_y / std::sqrt(cx * cx + cy * cy);
    }

    Point2 point_at(double azimuth_deg) const {
        const double r = radius_at(azimuth_deg);
        const double a = deg_to_rad(azimuth_deg);
        return {r * std::cos(a), r * std::sin(a)};
    }
};

// Planar layout of the belt. Motors 1..15 sit evenly spaced (by arc
// length) along the worn part of the perimeter; microphone k is mounted
// at motor 2k-1, so every even motor lies at the perimeter midpoint of
// its flanking microphones. The closure gap is centered at azimuth 0.
struct BeltGeometry {
    std::vector<Point2> mic_positions;
    std::vector<Point2> motor_positions;
    std::vector<double> mic_azimuths;    // degrees
    std::vector<double> motor_azimuths;  // degrees
    BeltShape shape;
    double arc_span = 280.0;  // degrees of perimeter covered
    double speed_of_sound = 343.0;

    int mic_count() const { return static_cast<int>(mic_positions.size()); }
    int motor_count() const { return static_cast<int>(motor_positions.size()); }
};

namespace detail {

// Azimuths of `count` points evenly spaced in arc length between
// azimuths lo..hi (degrees, endpoints included).
inline std::vector<double> arc_length_spaced_azimuths(const BeltShape& shape, double lo,
                                                      double hi, int count) {
    if (shape.is_circle()) {
        std::vector<double> az(static_cast<size_t>(count));
        for (int i = 0; i < count; ++i)
            az[static_cast<size_t>(i)] = lo + (hi - lo) * static_cast<double>(i) /
                                                  static_cast<double>(count - 1);
        return az;
    }
    // Dense cumulative arc length over the azimuth window, then inversion.
    const int steps = 20000 * count;
    std::vector<double> cumulative(static_cast<size_t>(steps) + 1, 0.0);
    Point2 prev = shape.point_at(lo);
    for (int i = 1; i <= steps; ++i) {
        const double az = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(steps);
        const Point2 p = shape.point_at(az);
        const double dx = p[0] - prev[0];
        const double dy = p[1] - prev[1];
        cumulative[static_cast<size_t>(i)] =
            cumulative[static_cast<size_t>(i) - 1] + std::sqrt(dx * dx + dy * dy);
        prev = p;
    }
    const double total = cumulative.back();
    std::vector<double> az(static_cast<size_t>(count));
    size_t cursor = 0;
    for (int i = 0; i < count; ++i) {
        const double target = total * static_cast<double>(i) / static_cast<double>(count - 1);
        while (cursor + 1 < cumulative.size() && cumulative[cursor + 1] < target) ++cursor;
        double frac = 0.0;
        if (cursor + 1 < cumulative.size()) {
            const double seg = cumulative[cursor + 1] - cumulative[cursor];
            if (seg > 0.0) frac = (target - cumulative[cursor]) / seg;
        }
        az[static_cast<size_t>(i)] =
            lo + (hi - lo) * (static_cast<double>(cursor) + frac) / static_cast<double>(steps);
    }
    az.front() = lo;
    az.back() = hi;
    return az;
}

}  // namespace detail

inline BeltGeometry make_geometry(BeltShape shape, double arc_span, int mic_count = 8,
                                  int motor_count = 15, double speed_of_sound = 343.0) {
    if (shape.semi_x <= 0.0 || shape.semi_y <= 0.0)
        throw ConfigError("belt semi-axes must be positive");
    if (motor_count != 2 * mic_count - 1)
        throw ConfigError("motor count must be 2*mic_count-1 (mic at every second motor)");
    if (mic_count < 2) throw ConfigError("belt needs at least 2 microphones");
    if (arc_span <= 0.0 || arc_span >= 360.0)
        throw ConfigError("arc span must lie in (0, 360) degrees");
    // Even spacing needs a sane minimum arc per motor.
    if (arc_span / static_cast<double>(motor_count - 1) < 1.0)
        throw ConfigError("arc span too small for " + std::to_string(motor_count) + " motors");
    if (speed_of_sound <= 0.0) throw ConfigError("speed of sound must be positive");

    BeltGeometry g;
    g.shape = shape;
    g.arc_span = arc_span;
    g.speed_of_sound = speed_of_sound;

    const double gap = 360.0 - arc_span;
    const double lo = gap / 2.0;
    const double hi = 360.0 - gap / 2.0;
    g.motor_azimuths = detail::arc_length_spaced_azimuths(shape, lo, hi, motor_count);
    for (double az : g.motor_azimuths) g.motor_positions.push_back(shape.point_at(az));
    for (int k = 0; k < mic_count; ++k) {
        const size_t motor = static_cast<size_t>(2 * k);  // motor index 2k+1, zero-based 2k
        g.mic_azimuths.push_back(g.motor_azimuths[motor]);
        g.mic_positions.push_back(g.motor_positions[motor]);
    }
    return g;
}

inline Point2 source_position(double angle_deg, double distance_m) {
    const double a = deg_to_rad(angle_deg);
    return {distance_m * std::cos(a), distance_m * std::sin(a)};
}

inline double distance(const Point2& a, const Point2& b) {
    const double dx = a[0] - b[0];
    const double dy = a[1] - b[1];
    return std::sqrt(dx * dx + dy * dy);
}

// Geometric TDoA in samples for one pair under spherical propagation:
// (|src - mic_u| - |src - mic_v|) * fs / c.
inline double true_tdoa(const BeltGeometry& geometry, double source_angle_deg,
                        double source_distance_m, PairIndex pair, double sample_rate) {
    if (pair.u < 0 || pair.v <= pair.u || pair.v >= geometry.mic_count())
        throw ConfigError("true_tdoa: invalid pair");
    if (source_distance_m <= geometry.shape.max_radius())
        throw AlgorithmError("source lies inside the belt perimeter");
    const Point2 src = source_position(source_angle_deg, source_distance_m);
    const double du = distance(src, geometry.mic_positions[static_cast<size_t>(pair.u)]);
    const double dv = distance(src, geometry.mic_positions[static_cast<size_t>(pair.v)]);
    return (du - dv) * sample_rate / geometry.speed_of_sound;
}

// All 28 geometric TDoAs, ordered by the pair enumeration.
inline std::vector<double> true_tdoas(const BeltGeometry& geometry, double source_angle_deg,
                                      double source_distance_m, double sample_rate) {
    const auto pairs = enumerate_pairs(geometry.mic_count());
    std::vector<double> delays;
    delays.reserve(pairs.size());
    for (const auto& pair : pairs)
        delays.push_back(true_tdoa(geometry, source_angle_deg, source_distance_m, pair, sample_rate));
    return delays;
}

}  // namespace beltloc
