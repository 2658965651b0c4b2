#include <catch2/catch_amalgamated.hpp>

#include "beltloc/geometry.hpp"

using namespace beltloc;

namespace {

// Numeric arc length between two azimuths along the shape perimeter.
double arc_length(const BeltShape& shape, double lo, double hi) {
    const int steps = 200000;
    double total = 0.0;
    Point2 prev = shape.point_at(lo);
    for (int i = 1; i <= steps; ++i) {
        const Point2 p = shape.point_at(lo + (hi - lo) * i / static_cast<double>(steps));
        total += distance(p, prev);
        prev = p;
    }
    return total;
}

}  // namespace

TEST_CASE("circular belt motors are evenly spaced in azimuth", "[geometry]") {
    const auto g = make_geometry({0.15, 0.15}, 280.0);
    REQUIRE(g.mic_count() == 8);
    REQUIRE(g.motor_count() == 15);
    // 280 degrees of arc over 14 gaps -> 20 degrees per motor gap.
    for (int i = 0; i + 1 < g.motor_count(); ++i)
        REQUIRE(g.motor_azimuths[static_cast<size_t>(i + 1)] -
                    g.motor_azimuths[static_cast<size_t>(i)] ==
                Catch::Approx(20.0).margin(1e-9));
    REQUIRE(g.motor_azimuths.front() == Catch::Approx(40.0));
    REQUIRE(g.motor_azimuths.back() == Catch::Approx(320.0));
}

TEST_CASE("symmetric ellipse produces a mic set symmetric about the x axis", "[geometry]") {
    const auto g = make_geometry({0.18, 0.13}, 280.0);
    for (int k = 0; k < g.mic_count(); ++k) {
        const auto& a = g.mic_positions[static_cast<size_t>(k)];
        const auto& b = g.mic_positions[static_cast<size_t>(g.mic_count() - 1 - k)];
        REQUIRE(a[0] == Catch::Approx(b[0]).margin(1e-5));
        REQUIRE(a[1] == Catch::Approx(-b[1]).margin(1e-5));
    }
}

TEST_CASE("every even motor is the perimeter midpoint of its flanking mics", "[geometry]") {
    for (const BeltShape shape : {BeltShape{0.15, 0.15}, BeltShape{0.19, 0.12}}) {
        const auto g = make_geometry(shape, 280.0);
        for (int k = 0; k < 7; ++k) {
            const double mic_lo = g.mic_azimuths[static_cast<size_t>(k)];
            const double mic_hi = g.mic_azimuths[static_cast<size_t>(k + 1)];
            const double motor = g.motor_azimuths[static_cast<size_t>(2 * k + 1)];
            const double left = arc_length(g.shape, mic_lo, motor);
            const double right = arc_length(g.shape, motor, mic_hi);
            REQUIRE(left == Catch::Approx(right).epsilon(1e-3));
        }
    }
}

TEST_CASE("geometry construction rejects bad parameters", "[geometry]") {
    REQUIRE_THROWS_AS(make_geometry({0.15, 0.15}, 10.0), ConfigError);   // arc too small
    REQUIRE_THROWS_AS(make_geometry({0.15, 0.15}, 380.0), ConfigError);  // arc too large
    REQUIRE_THROWS_AS(make_geometry({-0.1, 0.15}, 280.0), ConfigError);
    REQUIRE_THROWS_AS(make_geometry({0.15, 0.15}, 280.0, 8, 16), ConfigError);
}

TEST_CASE("true tdoa is zero on the perpendicular bisector", "[geometry]") {
    const auto g = make_geometry({0.15, 0.15}, 280.0);
    // Motor 2 sits midway between mics 1 and 2 on a circle, so a source at
    // its azimuth is equidistant from both.
    const double angle = g.motor_azimuths[1];
    REQUIRE(true_tdoa(g, angle, 2.0, {0, 1}, 44100.0) == Catch::Approx(0.0).margin(1e-9));
}

TEST_CASE("swapping the pair negates the true tdoa", "[geometry]") {
    const auto g = make_geometry({0.15, 0.15}, 280.0);
    const double a = true_tdoa(g, 73.0, 2.0, {2, 5}, 44100.0);
    // pair_column requires u < v, so compute the swap by hand
    const auto& src = source_position(73.0, 2.0);
    const double d5 = distance(src, g.mic_positions[5]);
    const double d2 = distance(src, g.mic_positions[2]);
    const double swapped = (d5 - d2) * 44100.0 / g.speed_of_sound;
    REQUIRE(swapped == Catch::Approx(-a).margin(1e-12));
}

TEST_CASE("far-field true tdoa approaches the plane-wave closed form", "[geometry]") {
    const auto g = make_geometry({0.15, 0.15}, 280.0);
    const double fs = 44100.0;
    const PairIndex pair{0, 7};
    const auto& pu = g.mic_positions[0];
    const auto& pv = g.mic_positions[7];
    const double mic_sep = distance(pu, pv);
    const double baseline =
        std::atan2(pv[1] - pu[1], pv[0] - pu[0]);  // direction from mic u to mic v
    for (double angle : {0.0, 50.0, 140.0, 260.0}) {
        const double exact = true_tdoa(g, angle, 100.0, pair, fs);
        // Plane wave from direction `angle`: delay = d*cos(angle - baseline)*fs/c.
        const double plane =
            mic_sep * std::cos(deg_to_rad(angle) - baseline) * fs / g.speed_of_sound;
        REQUIRE(std::abs(exact - plane) < 0.1);
    }
}

TEST_CASE("true tdoa rejects a source inside the belt", "[geometry]") {
    const auto g = make_geometry({0.15, 0.15}, 280.0);
    REQUIRE_THROWS_AS(true_tdoa(g, 10.0, 0.1, {0, 1}, 44100.0), AlgorithmError);
}
