// In-place radix-2 complex FFT. Sizes here are always powers of two (grid
// densities live on dyadic partitions), so a handwritten kernel keeps the
// whole transform path dependency-free and bit-reproducible.
#pragma once

#include <complex>
#include <stdexcept>
#include <vector>

#include "polypat/common.hpp"

namespace polypat {

inline bool is_pow2(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

namespace detail {

inline void fft_radix2(std::vector<complexd>& a, bool inverse) {
    const std::size_t n = a.size();
    if (!is_pow2(n)) throw std::invalid_argument("fft: size must be a power of two");
    // Bit-reversal permutation.
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const double ang = (inverse ? two_pi : -two_pi) / static_cast<double>(len);
        const complexd wlen(std::cos(ang), std::sin(ang));
        for (std::size_t i = 0; i < n; i += len) {
            complexd w(1.0, 0.0);
            for (std::size_t j = 0; j < len / 2; ++j) {
                const complexd u = a[i + j];
                const complexd v = a[i + j + len / 2] * w;
                a[i + j] = u + v;
                a[i + j + len / 2] = u - v;
                w *= wlen;
            }
        }
    }
}

}  // namespace detail

// Forward DFT: X_k = sum_j x_j e^{-2 pi i kj/n}. No normalization.
inline void fft(std::vector<complexd>& a) { detail::fft_radix2(a, false); }

// Unnormalized inverse DFT: x_j = sum_k X_k e^{+2 pi i kj/n}.
inline void ifft_unnormalized(std::vector<complexd>& a) { detail::fft_radix2(a, true); }

// Circular convolution of two real cell-value arrays of equal power-of-two
// length, scaled by the cell width h: out_i = h * sum_j f_j g_{i-j}.
inline std::vector<double> circular_convolution(const std::vector<double>& f, const std::vector<double>& g,
                                                double h) {
    if (f.size() != g.size()) throw std::invalid_argument("circular_convolution: size mismatch");
    const std::size_t n = f.size();
    std::vector<complexd> a(n), b(n);
    for (std::size_t i = 0; i < n; ++i) {
        a[i] = complexd(f[i], 0.0);
        b[i] = complexd(g[i], 0.0);
    }
    fft(a);
    fft(b);
    for (std::size_t i = 0; i < n; ++i) a[i] *= b[i];
    ifft_unnormalized(a);
    std::vector<double> out(n);
    const double scale = h / static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = a[i].real() * scale;
    return out;
}

}  // namespace polypat
