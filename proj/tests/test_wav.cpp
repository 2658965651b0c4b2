#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "beltloc/simulate.hpp"
#include "beltloc/wav.hpp"

using namespace beltloc;

namespace {

struct TempDir {
    std::filesystem::path path;
    TempDir() {
        path = std::filesystem::temp_directory_path() /
               ("beltloc_wav_test_" + std::to_string(::getpid()) + "_" +
                std::to_string(counter++));
        std::filesystem::create_directories(path);
    }
    ~TempDir() { std::filesystem::remove_all(path); }
    std::string file(const std::string& name) const { return (path / name).string(); }
    static inline int counter = 0;
};

MultichannelClip random_clip(int channels, size_t length, uint64_t seed) {
    MultichannelClip clip;
    clip.sample_rate = 44100.0;
    clip.samples.assign(static_cast<size_t>(channels), std::vector<double>(length));
    SplitMix64 rng(seed);
    for (auto& ch : clip.samples)
        for (auto& v : ch) v = 0.9 * (rng.uniform() * 2.0 - 1.0);
    return clip;
}

void write_raw(const std::string& path, const std::vector<uint8_t>& bytes) {
    std::ofstream out(path, std::ios::binary);
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
}

void push32(std::vector<uint8_t>& v, uint32_t x) {
    v.push_back(x & 0xFF);
    v.push_back((x >> 8) & 0xFF);
    v.push_back((x >> 16) & 0xFF);
    v.push_back((x >> 24) & 0xFF);
}
void push16(std::vector<uint8_t>& v, uint16_t x) {
    v.push_back(x & 0xFF);
    v.push_back((x >> 8) & 0xFF);
}

}  // namespace

TEST_CASE("8-channel float wav round trip is bit exact", "[wav]") {
    TempDir dir;
    auto clip = random_clip(8, 4000, 1);
    // Quantize to float precision so the doubles survive the float container.
    for (auto& ch : clip.samples)
        for (auto& v : ch) v = static_cast<double>(static_cast<float>(v));
    const auto path = dir.file("f32.wav");
    write_wav(clip, path, WavEncoding::float32);
    const auto back = read_wav(path);
    REQUIRE(back.sample_rate == 44100.0);
    REQUIRE(back.samples == clip.samples);

    // Byte-level determinism: writing the same clip twice gives the same file.
    const auto path2 = dir.file("f32_b.wav");
    write_wav(clip, path2, WavEncoding::float32);
    std::ifstream a(path, std::ios::binary), b(path2, std::ios::binary);
    const std::string bytes_a((std::istreambuf_iterator<char>(a)), std::istreambuf_iterator<char>());
    const std::string bytes_b((std::istreambuf_iterator<char>(b)), std::istreambuf_iterator<char>());
    REQUIRE(bytes_a == bytes_b);
}

TEST_CASE("16-bit full-scale convention: -32768 reads as -1.0 and writes back", "[wav]") {
    TempDir dir;
    MultichannelClip clip;
    clip.sample_rate = 8000.0;
    clip.samples = {{-1.0, 0.0, 32767.0 / 32768.0}, {0.5, -0.5, 0.25}};
    const auto path = dir.file("i16.wav");
    write_wav(clip, path, WavEncoding::pcm16);
    const auto back = read_wav(path);
    REQUIRE(back.samples[0][0] == -1.0);
    REQUIRE(back.samples[0][1] == 0.0);
    REQUIRE(back.samples[0][2] == 32767.0 / 32768.0);

    // Raw bytes: first sample of channel 0 must be exactly -32768.
    std::ifstream in(path, std::ios::binary);
    std::vector<uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                               std::istreambuf_iterator<char>());
    const size_t data = 44;  // canonical PCM header size
    const int16_t first = static_cast<int16_t>(bytes[data] | bytes[data + 1] << 8);
    REQUIRE(first == -32768);

    // Integer PCM round trips exactly through a second write.
    const auto path2 = dir.file("i16_b.wav");
    write_wav(back, path2, WavEncoding::pcm16);
    const auto again = read_wav(path2);
    REQUIRE(again.samples == back.samples);
}

TEST_CASE("24-bit PCM round trips representable values exactly", "[wav]") {
    TempDir dir;
    MultichannelClip clip;
    clip.sample_rate = 44100.0;
    clip.samples.assign(2, std::vector<double>(256));
    SplitMix64 rng(3);
    for (auto& ch : clip.samples)
        for (auto& v : ch) {
            const int32_t q = static_cast<int32_t>(rng.next() % 16777216) - 8388608;
            v = static_cast<double>(q) / 8388608.0;
        }
    const auto path = dir.file("i24.wav");
    write_wav(clip, path, WavEncoding::pcm24);
    REQUIRE(read_wav(path).samples == clip.samples);
}

TEST_CASE("a hand-assembled 1 kHz tone file parses to the reference integers", "[wav]") {
    // Independent reference: raw RIFF bytes assembled here, one channel of
    // a 1 kHz sine at 8 kHz, 16-bit.
    TempDir dir;
    const int n = 64;
    std::vector<int16_t> reference(n);
    for (int i = 0; i < n; ++i)
        reference[static_cast<size_t>(i)] =
            static_cast<int16_t>(std::lround(30000.0 * std::sin(2.0 * kPi * 1000.0 * i / 8000.0)));

    std::vector<uint8_t> bytes;
    bytes.insert(bytes.end(), {'R', 'I', 'F', 'F'});
    push32(bytes, 36 + n * 2);
    bytes.insert(bytes.end(), {'W', 'A', 'V', 'E'});
    bytes.insert(bytes.end(), {'f', 'm', 't', ' '});
    push32(bytes, 16);
    push16(bytes, 1);     // PCM
    push16(bytes, 1);     // mono
    push32(bytes, 8000);  // rate
    push32(bytes, 16000); // byte rate
    push16(bytes, 2);     // block align
    push16(bytes, 16);    // bits
    bytes.insert(bytes.end(), {'d', 'a', 't', 'a'});
    push32(bytes, static_cast<uint32_t>(n * 2));
    for (int16_t v : reference) push16(bytes, static_cast<uint16_t>(v));

    const auto path = dir.file("tone.wav");
    write_raw(path, bytes);
    const auto clip = read_wav(path);
    REQUIRE(clip.sample_rate == 8000.0);
    REQUIRE(clip.channel_count() == 1);
    REQUIRE(clip.samples[0].size() == static_cast<size_t>(n));
    for (int i = 0; i < n; ++i)
        REQUIRE(std::llround(clip.samples[0][static_cast<size_t>(i)] * 32768.0) ==
                reference[static_cast<size_t>(i)]);
}

TEST_CASE("extensible-format wav files resolve the real codec", "[wav]") {
    TempDir dir;
    const int n = 8;
    std::vector<uint8_t> bytes;
    bytes.insert(bytes.end(), {'R', 'I', 'F', 'F'});
    push32(bytes, 4 + 48 + 8 + n * 2);
    bytes.insert(bytes.end(), {'W', 'A', 'V', 'E'});
    bytes.insert(bytes.end(), {'f', 'm', 't', ' '});
    push32(bytes, 40);
    push16(bytes, 0xFFFE);  // extensible
    push16(bytes, 1);
    push32(bytes, 44100);
    push32(bytes, 88200);
    push16(bytes, 2);
    push16(bytes, 16);
    push16(bytes, 22);      // cbSize
    push16(bytes, 16);      // valid bits
    push32(bytes, 0x4);     // channel mask
    push16(bytes, 1);       // sub-format: PCM
    push16(bytes, 0x0000);
    push32(bytes, 0x00100000);
    push32(bytes, 0xAA000080);
    push32(bytes, 0x719B3800);
    bytes.insert(bytes.end(), {'d', 'a', 't', 'a'});
    push32(bytes, n * 2);
    for (int i = 0; i < n; ++i) push16(bytes, static_cast<uint16_t>(i * 1000));
    const auto path = dir.file("ext.wav");
    write_raw(path, bytes);
    const auto clip = read_wav(path);
    REQUIRE(clip.channel_count() == 1);
    REQUIRE(clip.samples[0][1] == 1000.0 / 32768.0);
}

TEST_CASE("wav reader rejects malformed and unsupported files distinctly", "[wav]") {
    TempDir dir;

    const auto not_riff = dir.file("bad1.wav");
    write_raw(not_riff, {'N', 'O', 'P', 'E', 0, 0, 0, 0});
    REQUIRE_THROWS_WITH(read_wav(not_riff), Catch::Matchers::ContainsSubstring("malformed header"));

    // Valid RIFF shell with an unsupported codec (mu-law).
    std::vector<uint8_t> mulaw;
    mulaw.insert(mulaw.end(), {'R', 'I', 'F', 'F'});
    push32(mulaw, 36);
    mulaw.insert(mulaw.end(), {'W', 'A', 'V', 'E'});
    mulaw.insert(mulaw.end(), {'f', 'm', 't', ' '});
    push32(mulaw, 16);
    push16(mulaw, 7);  // mu-law
    push16(mulaw, 1);
    push32(mulaw, 8000);
    push32(mulaw, 8000);
    push16(mulaw, 1);
    push16(mulaw, 8);
    mulaw.insert(mulaw.end(), {'d', 'a', 't', 'a'});
    push32(mulaw, 0);
    const auto mulaw_path = dir.file("bad2.wav");
    write_raw(mulaw_path, mulaw);
    REQUIRE_THROWS_WITH(read_wav(mulaw_path),
                        Catch::Matchers::ContainsSubstring("unsupported codec"));

    // 10 channels exceeds the supported count.
    std::vector<uint8_t> many;
    many.insert(many.end(), {'R', 'I', 'F', 'F'});
    push32(many, 36);
    many.insert(many.end(), {'W', 'A', 'V', 'E'});
    many.insert(many.end(), {'f', 'm', 't', ' '});
    push32(many, 16);
    push16(many, 1);
    push16(many, 10);
    push32(many, 44100);
    push32(many, 882000);
    push16(many, 20);
    push16(many, 16);
    many.insert(many.end(), {'d', 'a', 't', 'a'});
    push32(many, 0);
    const auto many_path = dir.file("bad3.wav");
    write_raw(many_path, many);
    REQUIRE_THROWS_WITH(read_wav(many_path), Catch::Matchers::ContainsSubstring("exceeds 8"));

    REQUIRE_THROWS_AS(read_wav(dir.file("missing.wav")), IoError);
}

TEST_CASE("simulated clips survive the float wav path used by the CLI", "[wav]") {
    TempDir dir;
    BeltScenario sc;
    sc.geometry = make_geometry({0.15, 0.15}, 280.0);
    sc.source_angle = 45.0;
    sc.duration = 0.2;
    sc.snr_db = 20.0;
    sc.seed = 5;
    const auto sim = synthesize(sc);
    const auto path = dir.file("sim.wav");
    write_wav(sim.clip, path, WavEncoding::float32);
    const auto back = read_wav(path);
    REQUIRE(back.channel_count() == 8);
    for (int c = 0; c < 8; ++c)
        for (size_t i = 0; i < back.samples[static_cast<size_t>(c)].size(); ++i)
            REQUIRE(back.samples[static_cast<size_t>(c)][i] ==
                    static_cast<double>(static_cast<float>(sim.clip.samples[static_cast<size_t>(c)][i])));
}
