// Independent oracles used by the tests: closed-form product recursions,
// brute-force scans and refined-grid summations. Everything here is kept
// deliberately separate from the implementation paths it checks.
#pragma once

#include <complex>
#include <vector>

#include "polypat/common.hpp"
#include "polypat/grid_density.hpp"
#include "polypat/measures.hpp"

namespace oracle {

using polypat::complexd;
using polypat::pi;
using polypat::two_pi;

// Coefficient of the depth-d deterministic Cantor density via the
// self-similarity identity iterated d times:
//   mu_d^(k) = prod_{j=1..d} [ (1/t) sum_c e^{-2 pi i k c / n^j} ]
//              * e^{-i pi k / n^d} sinc(pi k / n^d),
// the last factor being the uniform base density on one depth-d interval.
inline complexd cantor_product_coeff(int k, int depth, int branching, const std::vector<int>& pattern) {
    complexd acc(1.0, 0.0);
    double scale = 1.0;
    for (int j = 1; j <= depth; ++j) {
        scale /= branching;
        complexd factor(0.0, 0.0);
        for (int c : pattern) factor += std::polar(1.0, -two_pi * k * scale * c);
        acc *= factor / static_cast<double>(pattern.size());
    }
    const double x = pi * k * scale;
    acc *= std::polar(polypat::sinc(x), -x);
    return acc;
}

// Surviving interval starts of the deterministic construction by direct
// recursion (checks the iterative builder in the measures module).
inline void cantor_starts_recursive(int branching, const std::vector<int>& pattern, int depth,
                                    std::int64_t start, std::vector<std::int64_t>& out) {
    if (depth == 0) {
        out.push_back(start);
        return;
    }
    for (int c : pattern) cantor_starts_recursive(branching, pattern, depth - 1, start * branching + c, out);
}

// Exhaustive ball-constant scan without prefix sums (direct mass sums).
inline double ball_constant_bruteforce(const polypat::GridDensity& mu, double alpha) {
    const std::size_t n = mu.cells();
    const double h = mu.cell_width();
    double best = 0.0;
    for (std::size_t m = 1; m <= n; ++m) {
        const double denom = std::pow(static_cast<double>(m) * h, alpha);
        for (std::size_t j = 0; j < n; ++j) {
            double mass = 0.0;
            for (std::size_t i = 0; i < m; ++i) mass += mu.values()[(j + i) % n] * h;
            best = std::max(best, mass / denom);
        }
    }
    return best;
}

// Plain direct circular convolution (no FFT).
inline std::vector<double> convolution_direct(const std::vector<double>& f, const std::vector<double>& g,
                                              double h) {
    const std::size_t n = f.size();
    std::vector<double> out(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        double acc = 0.0;
        for (std::size_t j = 0; j < n; ++j) acc += f[j] * g[(i + n - j % n) % n];
        out[i] = acc * h;
    }
    return out;
}

}  // namespace oracle
