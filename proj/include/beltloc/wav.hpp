#pragma once

#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "beltloc/clip.hpp"
#include "beltloc/common.hpp"

namespace beltloc {

enum class WavEncoding { pcm16, pcm24, pcm32, float32 };

namespace detail {

inline constexpr uint16_t kFormatPcm = 0x0001;
inline constexpr uint16_t kFormatFloat = 0x0003;
inline constexpr uint16_t kFormatExtensible = 0xFFFE;

inline uint32_t read_u32(const uint8_t* p) {
    return static_cast<uint32_t>(p[0]) | static_cast<uint32_t>(p[1]) << 8 |
           static_cast<uint32_t>(p[2]) << 16 | static_cast<uint32_t>(p[3]) << 24;
}

inline uint16_t read_u16(const uint8_t* p) {
    return static_cast<uint16_t>(static_cast<uint16_t>(p[0]) | static_cast<uint16_t>(p[1]) << 8);
}

inline void push_u32(std::vector<uint8_t>& out, uint32_t v) {
    out.push_back(static_cast<uint8_t>(v & 0xFF));
    out.push_back(static_cast<uint8_t>((v >> 8) & 0xFF));
    out.push_back(static_cast<uint8_t>((v >> 16) & 0xFF));
    out.push_back(static_cast<uint8_t>((v >> 24) & 0xFF));
}

inline void push_u16(std::vector<uint8_t>& out, uint16_t v) {
    out.push_back(static_cast<uint8_t>(v & 0xFF));
    out.push_back(static_cast<uint8_t>((v >> 8) & 0xFF));
}

inline double full_scale(int bits) {
    return static_cast<double>(1u << (bits - 1));  // 32768, 8388608, ...
}

}  // namespace detail

// Writes bytes atomically: temp file in the same directory, then rename.
inline void write_file_atomic(const std::string& path, const void* data, size_t size) {
    namespace fs = std::filesystem;
    const fs::path target(path);
    if (target.has_parent_path()) {
        std::error_code ec;
        fs::create_directories(target.parent_path(), ec);
    }
    const fs::path tmp = target.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot open " + tmp.string() + " for writing");
        out.write(static_cast<const char*>(data), static_cast<std::streamsize>(size));
        if (!out) throw IoError("short write to " + tmp.string());
    }
    std::error_code ec;
    fs::rename(tmp, target, ec);
    if (ec) throw IoError("cannot rename " + tmp.string() + " to " + path + ": " + ec.message());
}

// Reads a RIFF/WAVE file with interleaved linear PCM (16/24/32-bit
// integer, or 32-bit IEEE float), 1..8 channels. Integer samples are
// normalized to [-1, 1) by the type's full-scale divisor.
inline MultichannelClip read_wav(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path);
    std::vector<uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                               std::istreambuf_iterator<char>());

    using namespace detail;
    if (bytes.size() < 12 || std::memcmp(bytes.data(), "RIFF", 4) != 0 ||
        std::memcmp(bytes.data() + 8, "WAVE", 4) != 0)
        throw IoError("malformed header: " + path + " is not a RIFF/WAVE file");

    uint16_t format = 0;
    uint16_t channels = 0;
    uint32_t sample_rate = 0;
    uint16_t bits = 0;
    bool have_fmt = false;
    size_t data_offset = 0;
    size_t data_size = 0;

    size_t pos = 12;
    while (pos + 8 <= bytes.size()) {
        const char* id = reinterpret_cast<const char*>(bytes.data() + pos);
        const uint32_t chunk_size = read_u32(bytes.data() + pos + 4);
        const size_t body = pos + 8;
        if (std::memcmp(id, "fmt ", 4) == 0) {
            if (chunk_size < 16 || body + chunk_size > bytes.size())
                throw IoError("malformed header: truncated fmt chunk in " + path);
            format = read_u16(bytes.data() + body);
            channels = read_u16(bytes.data() + body + 2);
            sample_rate = read_u32(bytes.data() + body + 4);
            bits = read_u16(bytes.data() + body + 14);
            if (format == kFormatExtensible) {
                // Actual format lives in the first two bytes of the SubFormat GUID.
                if (chunk_size < 40)
                    throw IoError("malformed header: extensible fmt chunk too short in " + path);
                format = read_u16(bytes.data() + body + 24);
            }
            have_fmt = true;
        } else if (std::memcmp(id, "data", 4) == 0) {
            data_offset = body;
            data_size = chunk_size;
            if (body + data_size > bytes.size())
                throw IoError("malformed header: data chunk extends past end of " + path);
            break;  // fmt must precede data; everything needed is known
        }
        pos = body + chunk_size + (chunk_size & 1);  // chunks are word-aligned
    }

    if (!have_fmt || data_offset == 0)
        throw IoError("malformed header: missing fmt or data chunk in " + path);
    if (channels < 1) throw IoError("malformed header: zero channels in " + path);
    if (channels > 8)
        throw IoError("channel count " + std::to_string(channels) + " exceeds 8 in " + path);

    const bool is_float = format == kFormatFloat;
    if (is_float) {
        if (bits != 32) throw IoError("unsupported codec: " + std::to_string(bits) +
                                      "-bit float in " + path);
    } else if (format == kFormatPcm) {
        if (bits != 16 && bits != 24 && bits != 32)
            throw IoError("unsupported codec: " + std::to_string(bits) + "-bit PCM in " + path);
    } else {
        throw IoError("unsupported codec: format tag " + std::to_string(format) + " in " + path);
    }

    const size_t bytes_per_sample = bits / 8;
    const size_t stride = bytes_per_sample * channels;
    const size_t frames = data_size / stride;

    MultichannelClip clip;
    clip.sample_rate = static_cast<double>(sample_rate);
    clip.samples.assign(channels, std::vector<double>(frames));
    const uint8_t* p = bytes.data() + data_offset;
    for (size_t n = 0; n < frames; ++n) {
        for (uint16_t c = 0; c < channels; ++c) {
            const uint8_t* s = p + n * stride + c * bytes_per_sample;
            double value = 0.0;
            if (is_float) {
                float f;
                std::memcpy(&f, s, 4);
                value = static_cast<double>(f);
            } else if (bits == 16) {
                const int16_t i = static_cast<int16_t>(read_u16(s));
                value = static_cast<double>(i) / full_scale(16);
            } else if (bits == 24) {
                int32_t i = static_cast<int32_t>(s[0]) | static_cast<int32_t>(s[1]) << 8 |
                            static_cast<int32_t>(s[2]) << 16;
                if (i & 0x800000) i -= 0x1000000;  // sign extension
                value = static_cast<double>(i) / full_scale(24);
            } else {
                const int32_t i = static_cast<int32_t>(read_u32(s));
                value = static_cast<double>(i) / 2147483648.0;
            }
            clip.samples[c][n] = value;
        }
    }
    return clip;
}

// Writes interleaved PCM or float WAV atomically. Integer encodings
// scale by the full-scale divisor, round to nearest, and clamp.
inline void write_wav(const MultichannelClip& clip, const std::string& path,
                      WavEncoding encoding = WavEncoding::float32) {
    using namespace detail;
    if (clip.channel_count() < 1 || clip.channel_count() > 8)
        throw ConfigError("write_wav supports 1..8 channels, got " +
                          std::to_string(clip.channel_count()));
    for (const auto& ch : clip.samples)
        if (ch.size() != clip.samples[0].size())
            throw ConfigError("write_wav: channels have unequal lengths");
    if (clip.sample_rate <= 0.0) throw ConfigError("write_wav: sample rate must be positive");

    const uint16_t channels = static_cast<uint16_t>(clip.channel_count());
    const size_t frames = clip.frame_count();
    const bool is_float = encoding == WavEncoding::float32;
    const int bits = encoding == WavEncoding::pcm16   ? 16
                     : encoding == WavEncoding::pcm24 ? 24
                     : 32;
    const size_t bytes_per_sample = static_cast<size_t>(bits) / 8;
    const uint32_t data_size = static_cast<uint32_t>(frames * channels * bytes_per_sample);
    const uint32_t rate = static_cast<uint32_t>(std::llround(clip.sample_rate));

    std::vector<uint8_t> out;
    out.reserve(60 + data_size);
    out.insert(out.end(), {'R', 'I', 'F', 'F'});
    const uint32_t fact_bytes = is_float ? 12u : 0u;
    push_u32(out, 4 + 24 + fact_bytes + 8 + data_size);
    out.insert(out.end(), {'W', 'A', 'V', 'E'});
    out.insert(out.end(), {'f', 'm', 't', ' '});
    push_u32(out, 16);
    push_u16(out, is_float ? kFormatFloat : kFormatPcm);
    push_u16(out, channels);
    push_u32(out, rate);
    push_u32(out, rate * channels * static_cast<uint32_t>(bytes_per_sample));
    push_u16(out, static_cast<uint16_t>(channels * bytes_per_sample));
    push_u16(out, static_cast<uint16_t>(bits));
    if (is_float) {
        out.insert(out.end(), {'f', 'a', 'c', 't'});
        push_u32(out, 4);
        push_u32(out, static_cast<uint32_t>(frames));
    }
    out.insert(out.end(), {'d', 'a', 't', 'a'});
    push_u32(out, data_size);

    for (size_t n = 0; n < frames; ++n) {
        for (uint16_t c = 0; c < channels; ++c) {
            const double x = clip.samples[c][n];
            if (is_float) {
                const float f = static_cast<float>(x);
                uint32_t u;
                std::memcpy(&u, &f, 4);
                push_u32(out, u);
            } else {
                const double scale = full_scale(bits);
                long long i = std::llround(x * scale);
                const long long lo = -static_cast<long long>(scale);
                const long long hi = static_cast<long long>(scale) - 1;
                if (i < lo) i = lo;
                if (i > hi) i = hi;
                const uint32_t u = static_cast<uint32_t>(static_cast<int32_t>(i));
                out.push_back(static_cast<uint8_t>(u & 0xFF));
                out.push_back(static_cast<uint8_t>((u >> 8) & 0xFF));
                if (bits >= 24) out.push_back(static_cast<uint8_t>((u >> 16) & 0xFF));
                if (bits == 32) out.push_back(static_cast<uint8_t>((u >> 24) & 0xFF));
            }
        }
    }
    write_file_atomic(path, out.data(), out.size());
}

}  // namespace beltloc
