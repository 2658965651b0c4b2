#include <catch2/catch_amalgamated.hpp>

#include "beltloc/localization.hpp"
#include "beltloc/simulate.hpp"

using namespace beltloc;

namespace {

TdoaVector random_tdoa_vector(uint64_t seed, double scale = 20.0) {
    SplitMix64 rng(seed);
    TdoaVector v(28);
    for (auto& x : v) x = scale * (rng.uniform() * 2.0 - 1.0);
    return v;
}

// Minimal profile carrying a table and motor angles; pipeline metadata is
// irrelevant for the scoring tests.
CalibrationProfile table_profile(std::vector<TdoaVector> table,
                                 std::array<double, kMotorCount> motors) {
    CalibrationProfile profile;
    profile.table = std::move(table);
    profile.motor_angles = motors;
    profile.motor_angles_display = display_motor_angles(motors);
    profile.tau_max = 64;
    return profile;
}

// Published participant-A motor directions.
constexpr std::array<double, kMotorCount> kParticipantA{36, 51,  80,  109, 134, 159, 169, 180,
                                                        195, 210, 235, 260, 282, 305, 316};

std::vector<TdoaVector> random_table(uint64_t seed) {
    std::vector<TdoaVector> table(360);
    for (int phi = 0; phi < 360; ++phi)
        table[static_cast<size_t>(phi)] = random_tdoa_vector(mix_seed(seed, static_cast<uint64_t>(phi)));
    return table;
}

}  // namespace

TEST_CASE("score of an exact match is 28 sigma^2", "[localization]") {
    const auto v = random_tdoa_vector(1);
    REQUIRE(score(v, v, {1.0, 0.707}) == Catch::Approx(28.0).margin(1e-12));
    REQUIRE(score(v, v, {3.0, 0.707}) == Catch::Approx(28.0 * 9.0).margin(1e-9));
}

TEST_CASE("one pair off by the length scale scores 27 + exp(-1/2)", "[localization]") {
    const auto v = random_tdoa_vector(2);
    auto w = v;
    w[13] += 0.707;
    REQUIRE(score(v, w, {1.0, 0.707}) ==
            Catch::Approx(27.0 + std::exp(-0.5)).margin(1e-9));
}

TEST_CASE("score matches the scalar-loop oracle", "[localization]") {
    const KernelParams params{1.7, 0.9};
    for (uint64_t trial = 0; trial < 20; ++trial) {
        const auto a = random_tdoa_vector(100 + trial);
        const auto b = random_tdoa_vector(200 + trial);
        double expected = 0.0;
        for (size_t p = 0; p < a.size(); ++p)
            expected += params.sigma * params.sigma *
                        std::exp(-std::pow(a[p] - b[p], 2) /
                                 (2.0 * params.length_scale * params.length_scale));
        REQUIRE(score(a, b, params) == Catch::Approx(expected).margin(1e-12));
    }
}

TEST_CASE("score rejects mismatched lengths and invalid kernels", "[localization]") {
    const auto a = random_tdoa_vector(5);
    TdoaVector b(27, 0.0);
    REQUIRE_THROWS_AS(score(a, b, {1.0, 0.707}), ConfigError);
    REQUIRE_THROWS_AS(score(a, a, {0.0, 0.707}), ConfigError);
    REQUIRE_THROWS_AS(score(a, a, {1.0, -1.0}), ConfigError);
}

TEST_CASE("best_doa finds an exact row match with the maximal score", "[localization]") {
    auto profile = table_profile(random_table(7), kParticipantA);
    const auto measured = profile.table[170];
    const auto estimate = best_doa(measured, profile, {1.0, 0.707});
    REQUIRE(estimate.best_angle == 170);
    REQUIRE(estimate.score_curve[170] == Catch::Approx(28.0).margin(1e-12));
    for (double s : estimate.score_curve) {
        REQUIRE(s > 0.0);
        REQUIRE(s <= 28.0 + 1e-12);
    }
}

TEST_CASE("best_doa equals an exhaustive scan after a small perturbation", "[localization]") {
    auto profile = table_profile(random_table(8), kParticipantA);
    auto measured = profile.table[170];
    measured[4] += 0.5;
    const KernelParams params{1.0, 0.707};
    const auto estimate = best_doa(measured, profile, params);

    int oracle = 0;
    double oracle_score = -1.0;
    for (int phi = 0; phi < 360; ++phi) {
        const double s = score(measured, profile.table[static_cast<size_t>(phi)], params);
        if (s > oracle_score) {
            oracle_score = s;
            oracle = phi;
        }
    }
    REQUIRE(estimate.best_angle == oracle);
    REQUIRE(estimate.score_curve[static_cast<size_t>(oracle)] ==
            Catch::Approx(oracle_score).margin(1e-12));
}

TEST_CASE("best_doa breaks exact ties toward the smallest angle", "[localization]") {
    auto table = random_table(9);
    table[200] = table[40];  // duplicate row
    auto profile = table_profile(std::move(table), kParticipantA);
    const auto estimate = best_doa(profile.table[40], profile, {1.0, 0.707});
    REQUIRE(estimate.best_angle == 40);
}

TEST_CASE("sigma rescaling scales the curve but never moves the argmax", "[localization]") {
    auto profile = table_profile(random_table(10), kParticipantA);
    for (uint64_t trial = 0; trial < 100; ++trial) {
        const auto measured = random_tdoa_vector(300 + trial);
        const auto base = best_doa(measured, profile, {1.0, 0.707});
        const auto scaled = best_doa(measured, profile, {2.5, 0.707});
        REQUIRE(scaled.best_angle == base.best_angle);
        for (size_t phi = 0; phi < 360; ++phi)
            REQUIRE(scaled.score_curve[phi] ==
                    Catch::Approx(6.25 * base.score_curve[phi]).epsilon(1e-12));
    }
}

TEST_CASE("a single far outlier cannot move the argmax off the matching row", "[localization]") {
    // Row 170 matches in 27 entries with one outlier at >= 10 l; every other
    // row differs from the measurement by >= l in at least two entries.
    const double l = 0.707;
    std::vector<TdoaVector> table(360, TdoaVector(28, 0.0));
    for (int phi = 0; phi < 360; ++phi)
        if (phi != 170)
            for (size_t p = 0; p < 28; ++p)
                table[static_cast<size_t>(phi)][p] = 10.0 + static_cast<double>(phi % 7);
    auto profile = table_profile(std::move(table), kParticipantA);

    TdoaVector measured(28, 0.0);
    measured[27] = 10.0 * l;  // the outlier
    const auto estimate = best_doa(measured, profile, {1.0, l});
    REQUIRE(estimate.best_angle == 170);
}

TEST_CASE("select_motor follows the published angles and circular distance", "[localization]") {
    const auto profile = table_profile(random_table(11), kParticipantA);
    // 80 degrees sits exactly on motor 3.
    REQUIRE(select_motor(80.0, profile).first == 3);
    REQUIRE(select_motor(80.0, profile).second == 80.0);
    // 359 degrees: circular distance 37 to theta_1=36 beats 43 to theta_15=316.
    REQUIRE(select_motor(359.0, profile).first == 1);
    // Exactly midway between motors 1 (36) and 2 (51): the lower index wins.
    REQUIRE(select_motor(43.5, profile).first == 1);
}

TEST_CASE("select_motor is total over the whole circle", "[localization]") {
    const auto profile = table_profile(random_table(12), kParticipantA);
    for (int phi = 0; phi < 360; ++phi) {
        const auto [index, angle] = select_motor(static_cast<double>(phi), profile);
        REQUIRE(index >= 1);
        REQUIRE(index <= 15);
        REQUIRE(angle == profile.motor_angles[static_cast<size_t>(index - 1)]);
        // Oracle: exhaustive distance scan with the same tie-break.
        int oracle = 1;
        double best = circular_distance(profile.motor_angles[0], static_cast<double>(phi));
        for (int i = 1; i < kMotorCount; ++i) {
            const double d =
                circular_distance(profile.motor_angles[static_cast<size_t>(i)], static_cast<double>(phi));
            if (d < best) {
                best = d;
                oracle = i + 1;
            }
        }
        REQUIRE(index == oracle);
    }
}

TEST_CASE("localize reports config mismatches distinctly", "[localization]") {
    const auto g = make_geometry({0.15, 0.15}, 280.0);
    BeltScenario sc;
    sc.geometry = g;
    sc.source_angle = 100.0;
    sc.duration = 0.5;
    sc.seed = 3;
    const auto sim = synthesize(sc);

    auto profile = table_profile(random_table(13), kParticipantA);
    profile.sample_rate = 48000.0;  // mismatch
    profile.frame_size = 1024;
    PipelineConfig cfg;
    REQUIRE_THROWS_AS(localize(sim.clip, profile, zero_noise_profile(1024), cfg), ConfigError);

    profile.sample_rate = 44100.0;
    profile.frame_size = 2048;  // mismatch
    REQUIRE_THROWS_AS(localize(sim.clip, profile, zero_noise_profile(1024), cfg), ConfigError);
}

TEST_CASE("localize on digital silence reports no reliable frames", "[localization]") {
    MultichannelClip clip;
    clip.sample_rate = 44100.0;
    clip.samples.assign(8, std::vector<double>(44100, 0.0));
    auto profile = table_profile(random_table(14), kParticipantA);
    profile.sample_rate = 44100.0;
    profile.frame_size = 1024;
    PipelineConfig cfg;
    REQUIRE_THROWS_WITH(localize(clip, profile, zero_noise_profile(1024), cfg),
                        Catch::Matchers::ContainsSubstring("no reliable frames"));
}

TEST_CASE("localize is deterministic and selects the geometric nearest motor", "[localization]") {
    const auto g = make_geometry({0.15, 0.15}, 280.0);
    PipelineConfig cfg;

    // Build a profile from oracle anchors so this test isolates inference.
    std::vector<CalibrationAnchor> anchors;
    for (double angle : kAnchorAngles)
        anchors.push_back({angle, true_tdoas(g, angle, 2.0, cfg.sample_rate)});
    CalibrationProfile profile;
    profile.anchors = anchors;
    profile.table = build_lookup_table(anchors);
    const auto even = find_even_motor_angles(profile.table);
    profile.motor_angles = assemble_motor_angles(even);
    profile.motor_angles_display = display_motor_angles(profile.motor_angles);
    profile.sample_rate = cfg.sample_rate;
    profile.frame_size = cfg.frame_size;
    profile.hop = cfg.hop;
    profile.tau_max = cfg.tau_max;
    profile.kernel = cfg.kernel;

    BeltScenario sc;
    sc.geometry = g;
    sc.source_angle = 117.0;
    sc.duration = 2.0;
    sc.snr_db = 20.0;
    sc.seed = 1234;
    const auto sim = synthesize(sc);
    const auto noise = zero_noise_profile(cfg.frame_size);
    const auto a = localize(sim.clip, profile, noise, cfg);
    const auto b = localize(sim.clip, profile, noise, cfg);
    REQUIRE(a.best_angle == b.best_angle);
    REQUIRE(a.motor_index == b.motor_index);
    REQUIRE(a.score_curve == b.score_curve);

    // 117 degrees lies nearest to motor 5 (geometric direction 120).
    REQUIRE(std::abs(a.best_angle - 117) <= 3);
    int nearest = 0;
    for (int i = 1; i < kMotorCount; ++i)
        if (circular_distance(g.motor_azimuths[static_cast<size_t>(i)], 117.0) <
            circular_distance(g.motor_azimuths[static_cast<size_t>(nearest)], 117.0))
            nearest = i;
    REQUIRE(a.motor_index == nearest + 1);
}
