// Command-line front end: simulate / calibrate / localize / evaluate.
// Exit codes: 0 success, 2 config errors, 3 I/O errors, 4 algorithm
// errors (e.g. "no reliable frames"), 1 anything unexpected.

#include <atomic>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "beltloc/beltloc.hpp"

namespace fs = std::filesystem;
using namespace beltloc;

namespace {

int exit_code_for(ErrorCategory category) {
    switch (category) {
        case ErrorCategory::config: return 2;
        case ErrorCategory::io: return 3;
        case ErrorCategory::algorithm: return 4;
    }
    return 1;
}

// Applies a JSON config file on top of the given defaults. Unknown keys
// are rejected so typos cannot silently fall back to defaults.
PipelineConfig load_config_overrides(const std::string& path, PipelineConfig cfg) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open config " + path);
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(std::string((std::istreambuf_iterator<char>(in)),
                                              std::istreambuf_iterator<char>()));
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("config parse error: ") + e.what());
    }
    if (!j.is_object()) throw ConfigError("config must be a JSON object");
    for (const auto& [key, value] : j.items()) {
        try {
            if (key == "sample_rate") {
                cfg.sample_rate = value.get<double>();
            } else if (key == "frame_size") {
                cfg.frame_size = value.get<int>();
            } else if (key == "hop") {
                cfg.hop = value.get<int>();
            } else if (key == "window") {
                const std::string name = value.get<std::string>();
                if (name == "hann")
                    cfg.window = Window::hann;
                else if (name == "rectangular")
                    cfg.window = Window::rectangular;
                else
                    throw ConfigError("unknown window \"" + name + "\"");
            } else if (key == "mask_threshold") {
                cfg.mask_threshold = value.get<double>();
            } else if (key == "tau_max") {
                cfg.tau_max = value.get<int>();
            } else if (key == "min_mask_density") {
                cfg.min_mask_density = value.get<double>();
            } else if (key == "allow_unreliable_fallback") {
                cfg.allow_unreliable_fallback = value.get<bool>();
            } else if (key == "kernel") {
                if (value.contains("sigma")) cfg.kernel.sigma = value.at("sigma").get<double>();
                if (value.contains("length_scale"))
                    cfg.kernel.length_scale = value.at("length_scale").get<double>();
            } else {
                throw ConfigError("unknown config key \"" + key + "\"");
            }
        } catch (const nlohmann::json::exception& e) {
            throw ConfigError("config key \"" + key + "\": " + e.what());
        }
    }
    validate(cfg);
    return cfg;
}

// Runs fn(0..n-1) on up to `threads` workers; rethrows the first failure.
void parallel_for(int n, int threads, const std::function<void(int)>& fn) {
    threads = std::max(1, std::min(threads, n));
    if (threads <= 1) {
        for (int i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<int> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::thread> pool;
    pool.reserve(static_cast<size_t>(threads));
    for (int t = 0; t < threads; ++t) {
        pool.emplace_back([&] {
            for (int i; (i = next.fetch_add(1)) < n;) {
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(failure_mutex);
                    if (!failure) failure = std::current_exception();
                    return;
                }
            }
        });
    }
    for (auto& th : pool) th.join();
    if (failure) std::rethrow_exception(failure);
}

std::string anchor_file_name(double angle) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "anchor_%03d.wav", static_cast<int>(std::lround(angle)));
    return buf;
}

std::string clip_file_name(size_t index) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "clip_%03zu.wav", index);
    return buf;
}

NoiseProfile noise_profile_from_wav(const std::string& path, const PipelineConfig& cfg) {
    const auto clip = read_wav(path);
    if (clip.sample_rate != cfg.sample_rate)
        throw ConfigError("noise recording rate " + std::to_string(clip.sample_rate) +
                          " does not match configured rate " + std::to_string(cfg.sample_rate));
    return estimate_noise(stft(clip, cfg.frame_size, cfg.hop, cfg.window));
}

// ---------------------------------------------------------------- simulate

int run_simulate(const std::string& manifest_path, std::string out_root,
                 std::optional<uint64_t> seed_override, int threads) {
    const auto manifest = read_manifest(manifest_path);
    const auto geometry = manifest.geometry();
    const uint64_t seed = seed_override.value_or(manifest.seed);
    if (out_root.empty()) out_root = fs::path(manifest_path).parent_path().string();
    if (out_root.empty()) out_root = ".";

    std::vector<std::string> log;

    BeltScenario proto;
    proto.geometry = geometry;
    proto.source_distance = manifest.source_distance;
    proto.sample_rate = manifest.sample_rate;

    if (manifest.calibration) {
        const auto& calib = *manifest.calibration;
        const fs::path dir = fs::path(out_root) / calib.out_dir;
        double noise_std = 0.0;
        std::vector<std::string> calib_log(calib.angles.size());
        std::mutex noise_mutex;
        parallel_for(static_cast<int>(calib.angles.size()), threads, [&](int i) {
            BeltScenario sc = proto;
            sc.source_angle = calib.angles[static_cast<size_t>(i)];
            sc.duration = calib.duration;
            sc.snr_db = calib.snr_db;
            sc.seed = mix_seed(seed, 0x2000u + static_cast<uint64_t>(i));
            const auto sim = synthesize_item(sc, manifest_path);
            const auto wav_path = (dir / anchor_file_name(sc.source_angle)).string();
            write_wav(sim.clip, wav_path, WavEncoding::float32);
            write_truth(sim.truth, wav_path + ".truth.json");
            calib_log[static_cast<size_t>(i)] = wav_path;
            if (i == 0) {
                std::lock_guard<std::mutex> lock(noise_mutex);
                noise_std = sim.truth.noise_std;
            }
        });
        for (const auto& line : calib_log) log.push_back(line);

        BeltScenario silence = proto;
        silence.signal.kind = SignalSpec::Kind::silence;
        silence.duration = calib.silence_duration;
        silence.noise_std = noise_std;
        silence.seed = mix_seed(seed, 0x2FFFu);
        const auto sim = synthesize(silence);
        const auto wav_path = (dir / "silence.wav").string();
        write_wav(sim.clip, wav_path, WavEncoding::float32);
        write_truth(sim.truth, wav_path + ".truth.json");
        log.push_back(wav_path);
    }

    for (size_t s = 0; s < manifest.sweeps.size(); ++s) {
        const auto& sweep = manifest.sweeps[s];
        if (sweep.angles.empty()) throw ConfigError("sweep \"" + sweep.name + "\" has no angles");
        const fs::path dir = fs::path(out_root) / sweep.out_dir;
        BeltScenario base = proto;
        base.signal = sweep.signal;
        base.duration = sweep.duration;
        base.snr_db = sweep.snr_db;
        base.seed = mix_seed(seed, 0x3000u + s);
        std::vector<std::string> sweep_log(sweep.angles.size());
        parallel_for(static_cast<int>(sweep.angles.size()), threads, [&](int k) {
            const auto scenario =
                sweep_item(base, sweep.angles[static_cast<size_t>(k)], static_cast<size_t>(k));
            const auto sim = synthesize_item(scenario, manifest_path);
            const auto wav_path = (dir / clip_file_name(static_cast<size_t>(k))).string();
            write_wav(sim.clip, wav_path, WavEncoding::float32);
            write_truth(sim.truth, wav_path + ".truth.json");
            sweep_log[static_cast<size_t>(k)] = wav_path;
        });
        for (const auto& line : sweep_log) log.push_back(line);
    }

    for (const auto& line : log) std::cout << "wrote " << line << "\n";
    std::cout << "simulated " << log.size() << " clips\n";
    return 0;
}

// --------------------------------------------------------------- calibrate

int run_calibrate(const std::vector<std::string>& angle_specs, const std::string& silence_path,
                  const std::string& out_path, const std::optional<std::string>& config_path,
                  const std::string& timestamp) {
    PipelineConfig cfg;
    if (config_path) cfg = load_config_overrides(*config_path, cfg);

    std::vector<CalibrationRecording> recordings;
    for (const auto& spec : angle_specs) {
        const auto eq = spec.find('=');
        if (eq == std::string::npos)
            throw ConfigError("--angle expects <degrees>=<wav>, got \"" + spec + "\"");
        double angle = 0.0;
        try {
            angle = std::stod(spec.substr(0, eq));
        } catch (const std::exception&) {
            throw ConfigError("--angle has a non-numeric angle in \"" + spec + "\"");
        }
        const std::string path = spec.substr(eq + 1);
        auto clip = read_wav(path);
        if (clip.sample_rate != cfg.sample_rate)
            throw ConfigError("recording " + path + " rate " + std::to_string(clip.sample_rate) +
                              " does not match configured rate " +
                              std::to_string(cfg.sample_rate));
        recordings.push_back({angle, std::move(clip)});
    }

    const auto silence = read_wav(silence_path);
    auto profile = calibrate(recordings, silence, cfg);
    profile.created = timestamp;
    profile.tool_version = kToolVersion;
    write_profile(profile, out_path);

    for (int i = 0; i < kMotorCount; ++i)
        std::printf("motor %2d: %10.4f deg (display %d)\n", i + 1,
                    profile.motor_angles[static_cast<size_t>(i)],
                    profile.motor_angles_display[static_cast<size_t>(i)]);
    std::printf("profile written to %s\n", out_path.c_str());
    return 0;
}

// ---------------------------------------------------------------- localize

int run_localize(const std::string& profile_path, const std::string& in_path,
                 const std::optional<std::string>& noise_path,
                 const std::optional<std::string>& curve_path,
                 const std::optional<std::string>& config_path) {
    const auto profile = read_profile(profile_path);
    PipelineConfig cfg;
    cfg.sample_rate = profile.sample_rate;
    cfg.frame_size = profile.frame_size;
    cfg.hop = profile.hop;
    cfg.tau_max = profile.tau_max;
    cfg.kernel = profile.kernel;
    if (config_path) cfg = load_config_overrides(*config_path, cfg);

    const auto clip = read_wav(in_path);
    const auto noise = noise_path ? noise_profile_from_wav(*noise_path, cfg)
                                  : zero_noise_profile(cfg.frame_size);
    const auto estimate = localize(clip, profile, noise, cfg);

    std::printf("angle %d\n", estimate.best_angle);
    std::printf("score %.6f\n", estimate.score_curve[static_cast<size_t>(estimate.best_angle)]);
    std::printf("motor %d\n", estimate.motor_index);
    std::printf("motor_angle %.6f\n", estimate.motor_angle);

    if (curve_path) {
        std::string text = "angle,score\n";
        char buf[64];
        for (size_t phi = 0; phi < estimate.score_curve.size(); ++phi) {
            std::snprintf(buf, sizeof(buf), "%zu,%.12g\n", phi, estimate.score_curve[phi]);
            text += buf;
        }
        write_file_atomic(*curve_path, text.data(), text.size());
    }
    return 0;
}

// ---------------------------------------------------------------- evaluate

int run_evaluate(const std::string& profile_path, const std::string& manifest_path,
                 const std::string& report_path, const std::optional<std::string>& data_root,
                 const std::optional<std::string>& noise_path,
                 const std::optional<std::string>& config_path, int threads) {
    const auto profile = read_profile(profile_path);
    const auto manifest = read_manifest(manifest_path);
    PipelineConfig cfg;
    cfg.sample_rate = profile.sample_rate;
    cfg.frame_size = profile.frame_size;
    cfg.hop = profile.hop;
    cfg.tau_max = profile.tau_max;
    cfg.kernel = profile.kernel;
    if (config_path) cfg = load_config_overrides(*config_path, cfg);

    const std::string root =
        data_root.value_or(fs::path(manifest_path).parent_path().string());
    auto in_root = [&](const std::string& rel) {
        return ((root.empty() ? fs::path(".") : fs::path(root)) / rel).string();
    };

    NoiseProfile noise = zero_noise_profile(cfg.frame_size);
    if (noise_path) {
        noise = noise_profile_from_wav(*noise_path, cfg);
    } else if (manifest.calibration) {
        const auto silence_path =
            in_root((fs::path(manifest.calibration->out_dir) / "silence.wav").string());
        if (fs::exists(silence_path)) noise = noise_profile_from_wav(silence_path, cfg);
    }

    std::vector<EvaluationReport> reports;
    for (const auto& sweep : manifest.sweeps) {
        std::vector<SimulatedClip> items(sweep.angles.size());
        parallel_for(static_cast<int>(sweep.angles.size()), threads, [&](int k) {
            const auto wav_path =
                in_root((fs::path(sweep.out_dir) / clip_file_name(static_cast<size_t>(k))).string());
            items[static_cast<size_t>(k)].clip = read_wav(wav_path);
            items[static_cast<size_t>(k)].truth = read_truth(wav_path + ".truth.json");
        });
        auto report = evaluate_sweep(items, profile, noise, cfg);
        report.scenario_id = sweep.name;
        report.profile_id = profile_path;
        reports.push_back(std::move(report));
    }
    if (reports.empty()) throw ConfigError("manifest has no sweeps to evaluate");

    write_reports(reports, profile_path, report_path);
    for (const auto& report : reports)
        std::printf("sweep %s: mae %.6f deg, match_rate %.6f\n", report.scenario_id.c_str(),
                    report.mae, report.match_rate);
    std::printf("report written to %s\n", report_path.c_str());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Belt-array sound source localization toolkit"};
    app.require_subcommand(1);
    app.fallthrough();

    std::optional<uint64_t> seed;
    int threads = 1;
    app.add_option("--seed", seed, "Override the manifest base seed");
    app.add_option("--threads", threads, "Worker threads for batch stages")
        ->check(CLI::PositiveNumber);

    auto* simulate_cmd =
        app.add_subcommand("simulate", "Synthesize belt recordings from a scenario manifest");
    std::string manifest_path;
    std::string out_root;
    simulate_cmd->add_option("manifest", manifest_path, "Scenario manifest (JSON)")->required();
    simulate_cmd->add_option("--out", out_root, "Output root (default: manifest directory)");

    auto* calibrate_cmd =
        app.add_subcommand("calibrate", "Build a calibration profile from anchor recordings");
    std::vector<std::string> angle_specs;
    std::string silence_path, profile_out, timestamp;
    std::optional<std::string> config_path;
    calibrate_cmd->add_option("--angle", angle_specs, "Anchor recording as <degrees>=<wav>")
        ->required()
        ->expected(-1);
    calibrate_cmd->add_option("--silence", silence_path, "Designated-silence recording")
        ->required();
    calibrate_cmd->add_option("--out", profile_out, "Profile output path")->required();
    calibrate_cmd->add_option("--timestamp", timestamp,
                              "Embed a creation timestamp (omitted by default so outputs "
                              "stay reproducible)");

    auto* localize_cmd = app.add_subcommand("localize", "Estimate the direction of one clip");
    std::string loc_profile, loc_in;
    std::optional<std::string> loc_noise, curve_path;
    localize_cmd->add_option("--profile", loc_profile, "Calibration profile")->required();
    localize_cmd->add_option("--in", loc_in, "Input multichannel WAV")->required();
    localize_cmd->add_option("--noise", loc_noise, "Silence WAV for the noise floor");
    localize_cmd->add_option("--curve", curve_path, "Write the 360-point score curve as CSV");

    auto* evaluate_cmd =
        app.add_subcommand("evaluate", "Localize simulated sweeps and report MAE / motor match");
    std::string eval_profile, eval_manifest, report_path;
    std::optional<std::string> data_root, eval_noise;
    evaluate_cmd->add_option("--profile", eval_profile, "Calibration profile")->required();
    evaluate_cmd->add_option("--manifest", eval_manifest, "Scenario manifest")->required();
    evaluate_cmd->add_option("--report", report_path, "Report output path")->required();
    evaluate_cmd->add_option("--data", data_root, "Data root (default: manifest directory)");
    evaluate_cmd->add_option("--noise", eval_noise, "Noise floor WAV override");

    for (auto* cmd : {calibrate_cmd, localize_cmd, evaluate_cmd})
        cmd->add_option("--config", config_path, "JSON overrides for pipeline parameters");

    try {
        app.parse(argc, argv);
        if (simulate_cmd->parsed())
            return run_simulate(manifest_path, out_root, seed, threads);
        if (calibrate_cmd->parsed())
            return run_calibrate(angle_specs, silence_path, profile_out, config_path, timestamp);
        if (localize_cmd->parsed())
            return run_localize(loc_profile, loc_in, loc_noise, curve_path, config_path);
        if (evaluate_cmd->parsed())
            return run_evaluate(eval_profile, eval_manifest, report_path, data_root, eval_noise,
                                config_path, threads);
        return 2;
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        if (code == 0) return 0;  // --help and friends
        std::cerr << "error: category=config: invalid command line\n";
        return 2;
    } catch (const Error& e) {
        std::cerr << "error: category=" << to_string(e.category()) << ": " << e.what() << "\n";
        return exit_code_for(e.category());
    } catch (const std::exception& e) {
        std::cerr << "error: category=internal: " << e.what() << "\n";
        return 1;
    }
}
