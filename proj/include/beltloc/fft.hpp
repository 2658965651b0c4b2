#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include "beltloc/common.hpp"

namespace beltloc {

inline bool is_power_of_two(size_t n) { return n != 0 && (n & (n - 1)) == 0; }

// Iterative radix-2 transform with precomputed twiddles and bit-reversal
// table. Sizes are restricted to powers of two. The raw transform is
// unnormalized in both directions; inverse_real applies the 1/N factor.
class Fft {
public:
    explicit Fft(size_t n) : n_(n) {
        if (!is_power_of_two(n_))
            throw ConfigError("fft size must be a power of two, got " + std::to_string(n_));
        bitrev_.resize(n_);
        size_t bits = 0;
        while ((size_t{1} << bits) < n_) ++bits;
        for (size_t i = 0; i < n_; ++i) {
            size_t r = 0;
            for (size_t b = 0; b < bits; ++b)
                if (i & (size_t{1} << b)) r |= size_t{1} << (bits - 1 - b);
            bitrev_[i] = r;
        }
        twiddles_.resize(n_ / 2);
        for (size_t k = 0; k < n_ / 2; ++k) {
            double phase = -2.0 * kPi * static_cast<double>(k) / static_cast<double>(n_);
            twiddles_[k] = {std::cos(phase), std::sin(phase)};
        }
    }

    size_t size() const { return n_; }

    // In-place unnormalized DFT (forward) or unnormalized inverse DFT.
    void transform(std::complex<double>* data, bool inverse) const {
        for (size_t i = 0; i < n_; ++i) {
            size_t j = bitrev_[i];
            if (j > i) std::swap(data[i], data[j]);
        }
        for (size_t len = 2; len <= n_; len <<= 1) {
            const size_t half = len / 2;
            const size_t step = n_ / len;
            for (size_t block = 0; block < n_; block += len) {
                for (size_t k = 0; k < half; ++k) {
                    std::complex<double> w = twiddles_[k * step];
                    if (inverse) w = std::conj(w);
                    std::complex<double> t = data[block + k + half] * w;
                    data[block + k + half] = data[block + k] - t;
                    data[block + k] += t;
                }
            }
        }
    }

    // Forward DFT of a real frame; returns bins 0..N/2 (real-input symmetry).
    std::vector<std::complex<double>> forward_real(std::span<const double> frame) const {
        if (frame.size() != n_)
            throw ConfigError("forward_real: frame length " + std::to_string(frame.size()) +
                              " != fft size " + std::to_string(n_));
        std::vector<std::complex<double>> buf(n_);
        for (size_t i = 0; i < n_; ++i) buf[i] = {frame[i], 0.0};
        transform(buf.data(), false);
        buf.resize(n_ / 2 + 1);
        return buf;
    }

    // Inverse DFT of a full-length (conjugate-symmetric) spectrum, scaled by
    // 1/N; returns the real part.
    std::vector<double> inverse_real(std::span<const std::complex<double>> spectrum) const {
        if (spectrum.size() != n_)
            throw ConfigError("inverse_real: spectrum length " + std::to_string(spectrum.size()) +
                              " != fft size " + std::to_string(n_));
        std::vector<std::complex<double>> buf(spectrum.begin(), spectrum.end());
        transform(buf.data(), true);
        std::vector<double> out(n_);
        const double scale = 1.0 / static_cast<double>(n_);
        for (size_t i = 0; i < n_; ++i) out[i] = buf[i].real() * scale;
        return out;
    }

private:
    size_t n_;
    std::vector<size_t> bitrev_;
    std::vector<std::complex<double>> twiddles_;
};

// Expands a half spectrum (bins 0..N/2) into the full conjugate-symmetric
// N-point spectrum.
inline std::vector<std::complex<double>> expand_half_spectrum(
    std::span<const std::complex<double>> half) {
    if (half.size() < 2)
        throw ConfigError("half spectrum must have at least 2 bins");
    const size_t n = (half.size() - 1) * 2;
    if (!is_power_of_two(n))
        throw ConfigError("half spectrum does not correspond to a power-of-two frame");
    std::vector<std::complex<double>> full(n);
    for (size_t f = 0; f < half.size(); ++f) full[f] = half[f];
    for (size_t f = 1; f < n / 2; ++f) full[n - f] = std::conj(half[f]);
    return full;
}

}  // namespace beltloc
