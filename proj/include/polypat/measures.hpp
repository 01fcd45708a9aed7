// Construction and certification of measures on the circle: deterministic
// and randomized Cantor-type measures, mollification, and the ball
// (dimension-regularity) constant.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "polypat/bump.hpp"
#include "polypat/common.hpp"
#include "polypat/fft.hpp"
#include "polypat/grid_density.hpp"
#include "polypat/quadrature.hpp"

namespace polypat {

struct CantorSpec {
    int branching = 3;
    int survivors = 2;
    int depth = 0;
    bool randomized = false;
    std::uint64_t seed = 0;

    void validate() const {
        if (branching < 2) throw std::invalid_argument("cantor spec: branching must be >= 2");
        if (survivors < 1 || survivors > branching)
            throw std::invalid_argument("cantor spec: survivors must satisfy 1 <= survivors <= branching");
        if (depth < 0) throw std::invalid_argument("cantor spec: negative depth");
        // survivors^-depth must stay representable, and the interval list bounded.
        if (depth * std::log2(static_cast<double>(branching)) > 52.0)
            throw std::invalid_argument("cantor spec: depth too large for exact endpoint arithmetic");
        if (depth * std::log2(static_cast<double>(survivors)) > 24.0)
            throw std::invalid_argument("cantor spec: survivor count per depth underflows / exceeds budget");
    }

    double dimension() const {
        return std::log(static_cast<double>(survivors)) / std::log(static_cast<double>(branching));
    }
};

// Parameter tuple of the two measure conditions: the ball condition
// mu([x,x+eps]) <= C1 eps^alpha and the Fourier decay condition
// |mu^(k)| <= C2 (1-alpha)^-B |k|^-beta/2.
struct MeasureConditions {
    double alpha = 0.5;
    double beta = 0.5;
    double C1 = 1.0;
    double C2 = 1.0;
    double B = 1.0;

    void validate() const {
        if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("conditions: alpha must lie in (0,1)");
        if (!(beta > 0.0 && beta < 1.0)) throw std::invalid_argument("conditions: beta must lie in (0,1)");
        if (!(C1 > 0.0 && C2 > 0.0 && B > 0.0)) throw std::invalid_argument("conditions: constants must be positive");
    }
};

// Depth-d construction as exact intervals: all surviving intervals have
// width 1/denom and equal mass 1/starts.size().
struct CantorIntervals {
    CantorSpec spec;
    std::int64_t denom = 1;             // branching^depth
    std::vector<std::int64_t> starts;   // sorted; interval i = [s_i/denom, (s_i+1)/denom]

    std::size_t count() const { return starts.size(); }
    double interval_mass() const { return 1.0 / static_cast<double>(starts.size()); }
    double interval_width() const { return 1.0 / static_cast<double>(denom); }
    double density_value() const { return static_cast<double>(denom) / static_cast<double>(starts.size()); }
};

namespace detail {

// Deterministic survivor pattern: spread as evenly as possible, always
// keeping the first and last subinterval when survivors >= 2. For (3,2)
// this is the middle-thirds pattern {first, last}.
inline std::vector<int> deterministic_survivors(int branching, int survivors) {
    std::vector<int> out;
    out.reserve(static_cast<std::size_t>(survivors));
    if (survivors == 1) {
        out.push_back(0);
        return out;
    }
    for (int j = 0; j < survivors; ++j) {
        const double pos = static_cast<double>(j) * static_cast<double>(branching - 1) / (survivors - 1);
        out.push_back(static_cast<int>(std::lround(pos)));
    }
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

// Uniform choice of `survivors` children without replacement, driven by a
// counter-based stream so the result is a pure function of (seed, level,
// parent index) and independent of traversal order.
inline std::vector<int> randomized_survivors(int branching, int survivors, std::uint64_t seed, int level,
                                             std::int64_t parent_start) {
    // Two-stage counter mix: (seed, level) -> stream, (stream, parent) -> state.
    SplitMix64 gen(counter_seed(counter_seed(seed, static_cast<std::uint64_t>(level)),
                                static_cast<std::uint64_t>(parent_start)));
    std::vector<int> idx(static_cast<std::size_t>(branching));
    for (int i = 0; i < branching; ++i) idx[static_cast<std::size_t>(i)] = i;
    for (int i = 0; i < survivors; ++i) {
        const auto j = static_cast<std::size_t>(i) + gen.next_below(static_cast<std::uint64_t>(branching - i));
        std::swap(idx[static_cast<std::size_t>(i)], idx[j]);
    }
    std::vector<int> out(idx.begin(), idx.begin() + survivors);
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace detail

inline CantorIntervals cantor_intervals(const CantorSpec& spec) {
    spec.validate();
    CantorIntervals out;
    out.spec = spec;
    out.starts = {0};
    out.denom = 1;
    for (int level = 0; level < spec.depth; ++level) {
        std::vector<std::int64_t> next;
        next.reserve(out.starts.size() * static_cast<std::size_t>(spec.survivors));
        for (std::int64_t s : out.starts) {
            const std::vector<int> kids =
                spec.randomized ? detail::randomized_survivors(spec.branching, spec.survivors, spec.seed, level, s)
                                : detail::deterministic_survivors(spec.branching, spec.survivors);
            for (int k : kids) next.push_back(s * spec.branching + k);
        }
        out.starts = std::move(next);
        out.denom *= spec.branching;
    }
    return out;
}

// Projects the depth-d interval density onto the dyadic grid by exact
// proportional overlap (integer arithmetic, so the projection is
// reproducible bit for bit).
inline GridDensity cantor_measure(const CantorSpec& spec, int grid_level) {
    spec.validate();
    if (grid_level < 0 || grid_level > 26) throw std::invalid_argument("cantor measure: grid level out of range");
    const bool pow2_branching = (spec.branching & (spec.branching - 1)) == 0;
    const CantorIntervals iv = cantor_intervals(spec);
    const std::int64_t cells = std::int64_t{1} << grid_level;
    if (pow2_branching && cells < iv.denom)
        throw std::invalid_argument("cantor measure: grid must resolve branching^depth for power-of-two branching");

    std::vector<double> cell_mass(static_cast<std::size_t>(cells), 0.0);
    const double mass = iv.interval_mass();
    // Work in units of 1/(denom*cells); both endpoints are exact integers.
    for (std::int64_t s : iv.starts) {
        const std::int64_t lo = s * cells;            // interval start
        const std::int64_t hi = (s + 1) * cells;      // interval end
        std::int64_t j = lo / iv.denom;               // first overlapping cell
        for (; j * iv.denom < hi; ++j) {
            const std::int64_t cell_lo = j * iv.denom;
            const std::int64_t cell_hi = cell_lo + iv.denom;
            const std::int64_t overlap = std::min(hi, cell_hi) - std::max(lo, cell_lo);
            if (overlap > 0)
                cell_mass[static_cast<std::size_t>(j)] += mass * static_cast<double>(overlap) / static_cast<double>(cells);
        }
    }
    std::vector<double> values(cell_mass.size());
    for (std::size_t i = 0; i < values.size(); ++i) values[i] = cell_mass[i] * static_cast<double>(cells);
    return GridDensity(grid_level, std::move(values));
}

inline GridDensity random_salem_measure(const CantorSpec& spec, int grid_level) {
    if (!spec.randomized) throw std::invalid_argument("random salem measure: spec must have randomized = true");
    return cantor_measure(spec, grid_level);
}

// Discretizes bump_eps(x) = eps^-1 bump(x/eps) to cell averages and
// renormalizes so the discrete kernel has exactly unit mass.
inline std::vector<double> discretize_kernel(const BumpFunction& bump, double eps, int level) {
    const std::size_t cells = std::size_t{1} << level;
    const double h = 1.0 / static_cast<double>(cells);
    const double lo = eps * bump.support_lo();
    const double hi = eps * bump.support_hi();
    // Supports wider than the circle are periodized by the wrapped
    // accumulation below (theta_2 already spans the whole circle).
    std::vector<double> w(cells, 0.0);
    const auto first = static_cast<std::int64_t>(std::floor(lo / h)) - 1;
    const auto last = static_cast<std::int64_t>(std::ceil(hi / h)) + 1;
    for (std::int64_t j = first; j <= last; ++j) {
        const double a = static_cast<double>(j) * h;
        const double b = a + h;
        const double avg = integrate_real([&](double x) { return bump(x / eps) / eps; }, a, b, 1e-14) / h;
        const std::size_t cell = static_cast<std::size_t>(((j % static_cast<std::int64_t>(cells)) +
                                                           static_cast<std::int64_t>(cells)) %
                                                          static_cast<std::int64_t>(cells));
        w[cell] += avg;
    }
    double total = pairwise_sum(w) * h;
    if (total <= 0.0) throw std::invalid_argument("kernel: empty discretization");
    for (double& x : w) x /= total;
    return w;
}

// mu_eps = mu * bump_eps (circular convolution). Mass is preserved exactly
// up to roundoff because the discrete kernel is normalized.
inline GridDensity mollify(const GridDensity& mu, double eps, const BumpFunction& bump = BumpFunction::make_theta()) {
    if (eps < mu.cell_width())
        throw std::invalid_argument("mollify: eps below the grid cell width is unresolvable");
    const std::vector<double> w = discretize_kernel(bump, eps, mu.level());
    std::vector<double> out = circular_convolution(mu.values(), w, mu.cell_width());
    // The exact convolution of nonnegative data is nonnegative; the FFT
    // route only violates that at roundoff level.
    const double floor = -1e-10 * (1.0 + mu.sup());
    for (double& v : out) {
        if (v < 0.0) {
            if (v < floor) throw std::logic_error("mollify: convolution produced a genuinely negative value");
            v = 0.0;
        }
    }
    return GridDensity(mu.level(), std::move(out));
}

// Smallest admissible C1 at this resolution: sup over all grid-aligned
// intervals (every width m*2^-J, every position) of mu(I) / |I|^alpha.
// True real-interval suprema exceed this by at most a factor of 2.
inline double ball_constant(const GridDensity& mu, double alpha) {
    if (!(alpha > 0.0 && alpha <= 1.0)) throw std::invalid_argument("ball constant: alpha must lie in (0,1]");
    const std::size_t n = mu.cells();
    const double h = mu.cell_width();
    std::vector<double> prefix(n + 1, 0.0);
    for (std::size_t i = 0; i < n; ++i) prefix[i + 1] = prefix[i] + mu.values()[i] * h;
    const double total = prefix[n];
    double best = 0.0;
    for (std::size_t m = 1; m <= n; ++m) {
        const double inv_width = 1.0 / std::pow(static_cast<double>(m) * h, alpha);
        for (std::size_t j = 0; j < n; ++j) {
            const std::size_t end = j + m;
            const double massj = end <= n ? prefix[end] - prefix[j] : total - prefix[j] + prefix[end - n];
            const double ratio = massj * inv_width;
            if (ratio > best) best = ratio;
        }
    }
    return best;
}

}  // namespace polypat
