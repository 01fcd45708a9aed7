// Frequency-side machinery: exact coefficients of piecewise-constant
// densities, grid synthesis, decay and Sobolev diagnostics, Littlewood-
// Paley projections, and the Fejer-taper decomposition mu = mu1 + mu2.
#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "polypat/bump.hpp"
#include "polypat/common.hpp"
#include "polypat/fft.hpp"
#include "polypat/fourier_series.hpp"
#include "polypat/grid_density.hpp"
#include "polypat/measures.hpp"

namespace polypat {

// Exact analytic coefficients of the piecewise-constant density: the cell
// sums go through one FFT and each frequency picks up the closed-form
// integral of e^{-2 pi i k x} over a width-h cell.
inline FourierSeries fourier_coeffs(const GridDensity& mu, int cutoff) {
    if (cutoff < 0) throw std::invalid_argument("fourier coeffs: negative cutoff");
    const auto n = static_cast<int>(mu.cells());
    if (cutoff > n / 2)
        throw std::invalid_argument("fourier coeffs: cutoff beyond the Nyquist limit of the grid");
    const double h = mu.cell_width();
    std::vector<complexd> a(mu.cells());
    for (std::size_t i = 0; i < a.size(); ++i) a[i] = complexd(mu.values()[i], 0.0);
    fft(a);
    FourierSeries out(cutoff);
    for (int k = -cutoff; k <= cutoff; ++k) {
        const std::size_t idx = static_cast<std::size_t>(((k % n) + n) % n);
        const double phase = -pi * static_cast<double>(k) * h;
        const complexd cell_factor = std::polar(h * sinc(pi * k * h), phase);
        out.at(k) = cell_factor * a[idx];
    }
    return out;
}

// Exact coefficients of an interval-list density (used for constructions
// whose breakpoints do not live on the dyadic grid).
inline FourierSeries fourier_coeffs(const CantorIntervals& iv, int cutoff) {
    if (cutoff < 0) throw std::invalid_argument("fourier coeffs: negative cutoff");
    FourierSeries out(cutoff);
    const double mass = iv.interval_mass();
    const double invd = 1.0 / static_cast<double>(iv.denom);
    for (int k = -cutoff; k <= cutoff; ++k) {
        const double shape = sinc(pi * k * invd);
        std::vector<complexd> contrib(iv.count());
        for (std::size_t w = 0; w < iv.count(); ++w) {
            const double center = (static_cast<double>(iv.starts[w]) + 0.5) * invd;
            contrib[w] = std::polar(mass * shape, -two_pi * static_cast<double>(k) * center);
        }
        out.at(k) = pairwise_sum(contrib);
    }
    return out;
}

namespace detail {

inline std::vector<double> synthesize(const FourierSeries& s, int level, bool cell_averages) {
    const std::size_t n = std::size_t{1} << level;
    if (static_cast<std::size_t>(2 * s.cutoff()) >= n)
        throw std::invalid_argument("synthesize: grid level cannot hold the band limit");
    const double h = 1.0 / static_cast<double>(n);
    std::vector<complexd> a(n, complexd(0.0, 0.0));
    for (int k = -s.cutoff(); k <= s.cutoff(); ++k) {
        const double half_cell = pi * static_cast<double>(k) * h;
        complexd factor = std::polar(1.0, half_cell);  // evaluate at cell centers
        if (cell_averages) factor *= sinc(half_cell);
        const std::size_t idx = static_cast<std::size_t>(((k % static_cast<int>(n)) + static_cast<int>(n)) %
                                                         static_cast<int>(n));
        a[idx] += factor * s.at(k);
    }
    ifft_unnormalized(a);
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = a[i].real();
    return out;
}

}  // namespace detail

// Values of the band-limited function at cell centers (exact; aliasing-free
// for 2K < 2^level).
inline GridDensity synthesize_samples(const FourierSeries& s, int level) {
    return GridDensity(level, detail::synthesize(s, level, false));
}

// Cell averages of the band-limited function (the L2 projection onto the
// grid; preserves nonnegativity of the underlying function).
inline GridDensity synthesize_averages(const FourierSeries& s, int level) {
    return GridDensity(level, detail::synthesize(s, level, true));
}

// Smallest admissible aggregate C2 (1-alpha)^-B at this truncation:
// max over 1 <= |k| <= K of |c_k| |k|^{beta/2}.
inline double decay_constant(const FourierSeries& s, double beta) {
    if (!(beta > 0.0 && beta < 1.0)) throw std::invalid_argument("decay constant: beta must lie in (0,1)");
    double best = 0.0;
    for (int k = 1; k <= s.cutoff(); ++k) {
        const double weight = std::pow(static_cast<double>(k), 0.5 * beta);
        best = std::max({best, std::abs(s.at(k)) * weight, std::abs(s.at(-k)) * weight});
    }
    return best;
}

// Periodic Sobolev norm (sum |c_k|^2 (1+k^2)^s)^{1/2}.
inline double sobolev_norm(const FourierSeries& f, double s) {
    std::vector<double> terms(f.coeffs().size());
    for (int k = -f.cutoff(); k <= f.cutoff(); ++k) {
        const double w = std::pow(1.0 + static_cast<double>(k) * static_cast<double>(k), s);
        terms[static_cast<std::size_t>(k + f.cutoff())] = std::norm(f.at(k)) * w;
    }
    return std::sqrt(pairwise_sum(terms));
}

// Littlewood-Paley projection P_k: multiply by psi_k for k >= 1; the k = 0
// block carries all frequencies |xi| <= 2 via the telescoped cutoff chi.
inline FourierSeries lp_project(const FourierSeries& s, int band) {
    if (band < 0) throw std::invalid_argument("lp project: negative band index");
    FourierSeries out(s.cutoff());
    for (int k = -s.cutoff(); k <= s.cutoff(); ++k) {
        const double m = band == 0 ? lp_p0_multiplier(static_cast<double>(k)) : lp_psi(static_cast<double>(k), band);
        out.at(k) = m * s.at(k);
    }
    return out;
}

// Number of bands needed so that sum_{k<=bands} P_k reassembles a cutoff-K
// series exactly: psi_k vanishes on [0, 2^k], so 2^bands >= K suffices.
inline int lp_bands_for_cutoff(int cutoff) {
    int b = 0;
    while ((1 << b) < std::max(1, cutoff)) ++b;
    return b + 1;
}

struct DecompositionResult {
    FourierSeries mu1;
    FourierSeries mu2;
    double N = 0.0;          // Fejer length parameter, N = C2^-1 e^{1/(1-alpha)}
    double sup_bound = 0.0;  // measured sup of the reconstructed mu1 density
    double M = 0.0;          // reference bound A * 2^{6B} * C1
};

// Raised when alpha is so close to 1 that N overflows. Carries log N.
struct DecomposeRangeError : std::range_error {
    double log_N;
    explicit DecomposeRangeError(double log_n)
        : std::range_error("decompose: N = C2^-1 exp(1/(1-alpha)) overflows; log N = " + std::to_string(log_n)),
          log_N(log_n) {}
};

// Fejer-taper decomposition (frequency side): mu2^(n) = min(1,|n|/(2N+1))
// mu^(n) for n != 0, mu1 = mu - mu2. When the nonzero taper range is inside
// the truncation, mu1 is literally mu convolved with the length-(2N+1)
// Fejer kernel, hence nonnegative.
inline DecompositionResult decompose(const FourierSeries& mu, const MeasureConditions& cond, double A = 16.0) {
    cond.validate();
    const double log_N = -std::log(cond.C2) + 1.0 / (1.0 - cond.alpha);
    if (log_N > 700.0) throw DecomposeRangeError(log_N);
    const double N = cond.C2 == 1.0 ? std::exp(1.0 / (1.0 - cond.alpha)) : std::exp(log_N);

    DecompositionResult out;
    out.N = N;
    out.M = A * std::pow(2.0, 6.0 * cond.B) * cond.C1;
    out.mu1 = FourierSeries(mu.cutoff());
    out.mu2 = FourierSeries(mu.cutoff());
    const double window = 2.0 * N + 1.0;
    for (int n = -mu.cutoff(); n <= mu.cutoff(); ++n) {
        if (n == 0) {
            out.mu1.at(0) = mu.at(0);
            out.mu2.at(0) = complexd(0.0, 0.0);
            continue;
        }
        const double taper = std::min(1.0, std::abs(static_cast<double>(n)) / window);
        out.mu2.at(n) = taper * mu.at(n);
        out.mu1.at(n) = mu.at(n) - out.mu2.at(n);
    }

    // Reconstruct mu1 on a grid resolving 4N. mu1's coefficients vanish
    // beyond 2N, so restricting to that band keeps the synthesis exact.
    const int band = static_cast<int>(std::min(static_cast<double>(mu.cutoff()), std::ceil(2.0 * N)));
    int level = 3;
    while ((1 << level) < 4.0 * std::min(N, static_cast<double>(mu.cutoff())) + 1.0 && level < 22) ++level;
    while ((1 << level) <= 2 * band && level < 22) ++level;
    const GridDensity rec = synthesize_samples(out.mu1.truncated(band), level);
    out.sup_bound = rec.sup();
    return out;
}

}  // namespace polypat
