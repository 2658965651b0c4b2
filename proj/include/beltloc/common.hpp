#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace beltloc {

inline constexpr double kPi = 3.14159265358979323846;

// Error taxonomy shared by the library and the CLI. The CLI maps each
// category to a distinct exit code.
enum class ErrorCategory { config, io, algorithm };

inline const char* to_string(ErrorCategory c) {
    switch (c) {
        case ErrorCategory::config: return "config";
        case ErrorCategory::io: return "io";
        case ErrorCategory::algorithm: return "algorithm";
    }
    return "unknown";
}

class Error : public std::runtime_error {
public:
    Error(ErrorCategory category, const std::string& message)
        : std::runtime_error(message), category_(category) {}
    ErrorCategory category() const { return category_; }

private:
    ErrorCategory category_;
};

struct ConfigError : Error {
    explicit ConfigError(const std::string& m) : Error(ErrorCategory::config, m) {}
};

struct IoError : Error {
    explicit IoError(const std::string& m) : Error(ErrorCategory::io, m) {}
};

struct AlgorithmError : Error {
    explicit AlgorithmError(const std::string& m) : Error(ErrorCategory::algorithm, m) {}
};

// Microphone pair (u,v), zero-based, u < v. Pairs are enumerated in
// lexicographic order: (0,1), (0,2), ..., (6,7) gives 28 pairs for eight
// channels. All per-pair vectors in the library follow this order.
struct PairIndex {
    int u = 0;
    int v = 0;

    bool operator==(const PairIndex&) const = default;
};

inline int pair_count(int channels) { return channels * (channels - 1) / 2; }

inline std::vector<PairIndex> enumerate_pairs(int channels) {
    std::vector<PairIndex> pairs;
    pairs.reserve(static_cast<size_t>(pair_count(channels)));
    for (int u = 0; u < channels; ++u)
        for (int v = u + 1; v < channels; ++v)
            pairs.push_back({u, v});
    return pairs;
}

// Column of pair (u,v) in the lexicographic enumeration.
inline int pair_column(int u, int v, int channels) {
    if (u < 0 || v <= u || v >= channels)
        throw ConfigError("pair_column: invalid pair (" + std::to_string(u) + "," +
                          std::to_string(v) + ") for " + std::to_string(channels) + " channels");
    return u * (2 * channels - u - 1) / 2 + (v - u - 1);
}

// Wrap an angle into [0, 360).
inline double wrap_degrees(double a) {
    double w = std::fmod(a, 360.0);
    if (w < 0.0) w += 360.0;
    return w;
}

inline double deg_to_rad(double d) { return d * kPi / 180.0; }

}  // namespace beltloc
