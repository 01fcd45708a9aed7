// Fixed reference corpora for calibrating and re-checking the measured
// constants (the Bourgain lower bound c0, the energy budget C0, and the
// Sobolev-improving comparison constant). Corpus 0 calibrates; corpus 1 is
// the disjoint set used to check that the constants are corpus-independent.
// Deterministic by construction; the hash stamps the corpus recipe.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "polypat/common.hpp"
#include "polypat/fourier.hpp"
#include "polypat/grid_density.hpp"
#include "polypat/measures.hpp"
#include "polypat/oscillatory.hpp"
#include "polypat/trilinear.hpp"

namespace polypat {

namespace detail {

inline GridDensity normalized(GridDensity g) {
    const double m = g.mass();
    for (double& v : g.values()) v /= m;
    return g;
}

inline GridDensity rotated(const GridDensity& g, std::size_t cells) {
    std::vector<double> v(g.values());
    std::rotate(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(cells % v.size()), v.end());
    return GridDensity(g.level(), std::move(v));
}

}  // namespace detail

inline constexpr int kBourgainCorpusLevel = 11;

// 200 nonnegative unit-mass densities: indicators across dyadic widths,
// deterministic Cantor iterates, randomized constructions and mollified
// random spikes. `which` = 0 or 1 selects disjoint position/seed sets; the
// translation-invariant families keep the two minima comparable while every
// density differs.
inline std::vector<GridDensity> bourgain_corpus(int which) {
    const int J = kBourgainCorpusLevel;
    const std::size_t cells = std::size_t{1} << J;
    std::vector<GridDensity> out;
    out.reserve(200);

    // 48 indicators: widths 2^-1..2^-6, eight positions each.
    for (int j = 1; j <= 6; ++j) {
        const std::size_t wcells = cells >> j;
        for (int p = 0; p < 8; ++p) {
            const double frac = 0.137 + 0.3173 * p + 0.251 * which;
            const auto start = static_cast<std::size_t>((frac - std::floor(frac)) * static_cast<double>(cells));
            std::vector<double> v(cells, 0.0);
            for (std::size_t i = 0; i < wcells; ++i) v[(start + i) % cells] = std::exp2(static_cast<double>(j));
            out.emplace_back(J, std::move(v));
        }
    }

    // 25 deterministic Cantor iterates (corpus 1 uses half-circle rotations:
    // the form is translation invariant, so these anchor the minimum).
    const std::vector<std::array<int, 3>> cantors = {
        {3, 2, 1}, {3, 2, 2}, {3, 2, 3}, {3, 2, 4}, {3, 2, 5}, {3, 2, 6}, {4, 2, 1}, {4, 2, 2}, {4, 2, 3},
        {4, 2, 4}, {4, 2, 5}, {5, 3, 1}, {5, 3, 2}, {5, 3, 3}, {5, 3, 4}, {4, 3, 1}, {4, 3, 2}, {4, 3, 3},
        {4, 3, 4}, {4, 3, 5}, {5, 2, 1}, {5, 2, 2}, {5, 2, 3}, {5, 2, 4}, {5, 4, 4}};
    for (const auto& c : cantors) {
        GridDensity g = cantor_measure({c[0], c[1], c[2], false, 0}, J);
        out.push_back(which == 0 ? g : detail::rotated(g, cells / 2));
    }

    // 30 randomized constructions, disjoint seed ranges per corpus.
    for (int i = 0; i < 15; ++i)
        out.push_back(random_salem_measure({4, 2, 5, true, 100ull + 1000ull * which + i}, J));
    for (int i = 0; i < 15; ++i)
        out.push_back(random_salem_measure({4, 3, 5, true, 500ull + 1000ull * which + i}, J));

    // 97 mollified random spike mixtures.
    const std::size_t want = 200;
    std::uint64_t counter = 0;
    while (out.size() < want) {
        SplitMix64 gen(counter_seed(0xb0c5ull + 7919ull * which, counter++));
        std::vector<double> v(cells, 0.0);
        const int spikes = 1 + static_cast<int>(gen.next_below(4));
        for (int s = 0; s < spikes; ++s) {
            const std::size_t at = gen.next_below(cells);
            v[at] += (0.25 + gen.next_double()) * static_cast<double>(cells);
        }
        const double eps = std::exp2(-4.0 - static_cast<double>(gen.next_below(4)));
        out.push_back(detail::normalized(mollify(GridDensity(J, std::move(v)), eps)));
    }
    for (auto& g : out) g = detail::normalized(std::move(g));
    return out;
}

inline std::uint64_t bourgain_corpus_hash(int which) {
    std::string desc = "bourgain-corpus-v1|level=11|indicators=6x8|cantor=25|salem=30|spikes=97|which=";
    desc += std::to_string(which);
    return fnv1a(desc);
}

// min over k, ell in {2..8} of lhs / (mass)^3 for one density.
inline double bourgain_corpus_min_ratio(const GridDensity& f) {
    std::vector<GridDensity> conv;
    conv.reserve(7);
    for (int k = 2; k <= 8; ++k) conv.push_back(convolve_with_theta(f, k));
    const double mass = f.mass();
    const double rhs = mass * mass * mass;
    double best = 1e300;
    std::vector<double> prods(f.cells());
    for (std::size_t a = 0; a < conv.size(); ++a)
        for (std::size_t b = a; b < conv.size(); ++b) {
            for (std::size_t i = 0; i < f.cells(); ++i)
                prods[i] = f.values()[i] * conv[a].values()[i] * conv[b].values()[i];
            best = std::min(best, pairwise_sum(prods) * f.cell_width() / rhs);
        }
    return best;
}

// Reference measurement for the Sobolev-improving comparison constant: the
// largest |Lambda| / (product of H^-s0 norms) over the mixed tuples of a
// Cantor decomposition and a set of random band-limited trios.
inline double measure_sobolev_constant() {
    const Polynomial P = Polynomial::parse("t + t^2");
    const int l0 = scale_setup(P).l0;
    const int K = 128;
    const MultiplierTable table = MultiplierTable::build(P, l0, K, 1e-11);
    const double s0 = 0.1;

    const FourierSeries mu = fourier_coeffs(cantor_intervals({3, 2, 6, false, 0}), K);
    MeasureConditions cond;
    cond.alpha = std::log(2.0) / std::log(3.0);
    cond.beta = 0.4;
    const DecompositionResult dec = decompose(mu, cond);

    double worst = 0.0;
    const MixedTermResult mixed = mixed_term_bounds(dec.mu1, dec.mu2, l0, s0, P, table);
    for (std::size_t i = 0; i < mixed.values.size(); ++i)
        if (mixed.bounds[i] > 0.0) worst = std::max(worst, mixed.values[i] * mixed.C_l0 / mixed.bounds[i]);

    // A handful of random Hermitian trios widens the reference set.
    for (std::uint64_t seed = 1; seed <= 8; ++seed) {
        SplitMix64 gen(seed);
        FourierSeries a(K), b(K), c(K);
        for (FourierSeries* s : {&a, &b, &c}) {
            s->at(0) = complexd(gen.next_double(), 0.0);
            for (int k = 1; k <= K; ++k) {
                const double scale = std::pow(1.0 + k, -0.6);
                const complexd z((2.0 * gen.next_double() - 1.0) * scale, (2.0 * gen.next_double() - 1.0) * scale);
                s->at(k) = z;
                s->at(-k) = std::conj(z);
            }
        }
        const double lam = std::abs(trilinear_fourier(a, b, c, table));
        const double denom = sobolev_norm(a, -s0) * sobolev_norm(b, -s0) * sobolev_norm(c, -s0);
        if (denom > 0.0) worst = std::max(worst, lam / denom);
    }
    return worst;
}

}  // namespace polypat
