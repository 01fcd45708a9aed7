#include <catch2/catch_amalgamated.hpp>
#include <random>

#include "polypat/corpus.hpp"
#include "polypat/trilinear.hpp"

using namespace polypat;
using Catch::Approx;

namespace {

FourierSeries random_real_series(int cutoff, std::uint64_t seed, double decay_power = 0.75) {
    std::mt19937_64 gen(seed);
    auto u = [&] { return static_cast<double>(gen() >> 11) * 0x1.0p-53 * 2.0 - 1.0; };
    FourierSeries s(cutoff);
    s.at(0) = complexd(1.0, 0.0);
    for (int k = 1; k <= cutoff; ++k) {
        const double scale = std::pow(1.0 + k, -decay_power);
        const complexd c(u() * scale, u() * scale);
        s.at(k) = c;
        s.at(-k) = std::conj(c);
    }
    return s;
}

GridDensity mollified_spike(int level, std::size_t cell, double eps) {
    std::vector<double> v(std::size_t{1} << level, 0.0);
    v[cell] = static_cast<double>(std::size_t{1} << level);
    return mollify(GridDensity(level, std::move(v)), eps);
}

}  // namespace

TEST_CASE("apply_T: unit inputs reproduce the tau mass everywhere") {
    const auto P = Polynomial::parse("t + t^2");
    const GridDensity one = GridDensity::uniform(10);
    const GridDensity T = apply_T(one, one, 7, P);
    for (double v : T.values()) CHECK(v == Approx(1.0).margin(1e-9));
    CHECK(trilinear_physical(one, one, one, 7, P) == Approx(1.0).margin(1e-9));

    CHECK_THROWS(apply_T(one, one, 9, P));  // grid too coarse (level < l+3)
    CHECK_THROWS(apply_T(one, one, 5, P));  // below l0 = 7
}

TEST_CASE("apply_T: constant second slot reduces to convolution with tau_l") {
    const auto P = Polynomial::parse("t + t^2");
    const int J = 12, l = 7;
    const FourierSeries s = random_real_series(8, 21);
    const GridDensity f = synthesize_samples(s, J);
    const GridDensity one = GridDensity::uniform(J);
    const GridDensity T = apply_T(f, one, l, P);

    // Frequency side: T(x) = sum_k f^(k) m_l(2 pi k, 0) e^{2 pi i k x}.
    for (std::size_t i = 0; i < T.cells(); i += 37) {
        const double x = T.cell_center(i);
        complexd expect(0.0, 0.0);
        for (int k = -8; k <= 8; ++k)
            expect += s.at(k) * multiplier_quadrature(two_pi * k, 0.0, l, P).value *
                      std::polar(1.0, two_pi * k * x);
        // piecewise-constant representation error is O((K h)^2)
        CHECK(T.values()[i] == Approx(expect.real()).margin(2e-4));
    }
}

TEST_CASE("apply_T: single-bump inputs against a refined brute-force double sum") {
    const auto P = Polynomial::parse("t^2");
    const int J = 12, l = 6;
    const GridDensity f = mollified_spike(J, 400, std::exp2(-3.0));
    const GridDensity g = mollified_spike(J, 1200, std::exp2(-3.0));
    const GridDensity T = apply_T(f, g, l, P, /*l0_hint=*/1);
    const double mass = T.mass();

    // Brute force at 4x spatial resolution (exact refinement of the same
    // piecewise-constant densities) with a dense Riemann sum in t.
    auto refine4 = [](const GridDensity& d) {
        std::vector<double> v(d.cells() * 4);
        for (std::size_t i = 0; i < d.cells(); ++i)
            for (int r = 0; r < 4; ++r) v[4 * i + r] = d.values()[i];
        return GridDensity(d.level() + 2, std::move(v));
    };
    const GridDensity f4 = refine4(f);  // same density, finer cells
    const GridDensity g4 = refine4(g);
    const double w_lo = std::exp2(static_cast<double>(-l));
    const std::size_t cells = f4.cells();
    const int tsteps = 4096;
    const double dt = w_lo / tsteps;
    double acc = 0.0;
    for (std::size_t i = 0; i < cells; ++i) {
        const double x = f4.cell_center(i);
        double inner = 0.0;
        for (int m = 0; m < tsteps; ++m) {
            const double t = w_lo + (m + 0.5) * dt;
            inner += f4.value_at(x + t) * g4.value_at(x + P.eval(t)) * tau_l(t, l);
        }
        acc += inner * dt;
    }
    acc /= static_cast<double>(cells);
    CHECK(mass == Approx(acc).epsilon(1e-4));
}

TEST_CASE("trilinear: physical and fourier sides agree on band-limited trios") {
    const auto P = Polynomial::parse("t + t^2");
    const int l = 6, K = 16;
    const MultiplierTable table = MultiplierTable::build(P, l, 2 * K, 1e-12);
    for (std::uint64_t seed : {1ull, 2ull, 3ull}) {
        const FourierSeries f = random_real_series(K, seed);
        const FourierSeries g = random_real_series(K, seed + 100);
        const FourierSeries h = random_real_series(K, seed + 200);
        const double phys = trilinear_physical(f, g, h, l, P, 9);
        const double four = trilinear_fourier(f, g, h, table);
        CHECK(std::abs(phys - four) <= 1e-6 * (1.0 + std::abs(phys)));
    }

    // All-ones trio collapses to the tau mass.
    FourierSeries one(0);
    one.at(0) = complexd(1.0, 0.0);
    CHECK(trilinear_fourier(one, one, one, table) == Approx(1.0).margin(1e-10));
    CHECK(trilinear_physical(one, one, one, l, P, 9) == Approx(1.0).margin(1e-9));
}

TEST_CASE("trilinear: frequency-disjoint witness annihilates the form") {
    const auto P = Polynomial::parse("t + t^2");
    const MultiplierTable table = MultiplierTable::build(P, 6, 24, 1e-12);
    const FourierSeries f = random_real_series(8, 7);
    const FourierSeries g = random_real_series(8, 8);
    FourierSeries h(24);
    h.at(20) = complexd(1.0, 0.0);  // beyond the support sum of f and g
    h.at(-20) = complexd(1.0, 0.0);
    CHECK(trilinear_fourier(f, g, h, table) == 0.0);
    CHECK(std::abs(trilinear_physical(f, g, h, 6, P, 9)) < 1e-10);
}

TEST_CASE("trilinear: multilinearity in each slot") {
    const auto P = Polynomial::parse("t + t^2");
    const MultiplierTable table = MultiplierTable::build(P, 6, 16, 1e-12);
    const FourierSeries a = random_real_series(16, 31);
    const FourierSeries b = random_real_series(16, 32);
    const FourierSeries g = random_real_series(16, 33);
    const FourierSeries h = random_real_series(16, 34);
    const double alpha = 0.375, beta = -1.25;
    FourierSeries combo(16);
    for (int k = -16; k <= 16; ++k) combo.at(k) = alpha * a.at(k) + beta * b.at(k);
    const double lhs = trilinear_fourier(combo, g, h, table);
    const double rhs = alpha * trilinear_fourier(a, g, h, table) + beta * trilinear_fourier(b, g, h, table);
    CHECK(lhs == Approx(rhs).margin(1e-9));
}

TEST_CASE("trilinear dispatcher enforces representation kinds") {
    const auto P = Polynomial::parse("t + t^2");
    const GridDensity one = GridDensity::uniform(10);
    CHECK_THROWS(trilinear_form(one, one, one, 7, P, TrilinearSide::fourier));
    const FourierSeries s = random_real_series(4, 1);
    CHECK_THROWS(trilinear_form(s, s, s, 6, P, TrilinearSide::fourier, nullptr));
}

TEST_CASE("bourgain bound: mass normalization and homogeneity") {
    const GridDensity one = GridDensity::uniform(10);
    const BourgainBound unit = bourgain_bound(one, 3, 5);
    CHECK(unit.lhs == Approx(1.0).margin(1e-10));
    CHECK(unit.rhs_mass_cubed == Approx(1.0).margin(1e-12));

    // Scaling f -> 2f scales both sides by 8.
    std::vector<double> big(one.values());
    for (double& v : big) v *= 2.0;
    const BourgainBound scaled = bourgain_bound(GridDensity(10, big), 3, 5);
    CHECK(scaled.lhs == Approx(8.0 * unit.lhs).epsilon(1e-12));
    CHECK(scaled.rhs_mass_cubed == Approx(8.0).epsilon(1e-12));

    std::vector<double> neg(one.values());
    neg[3] = -1.0;
    CHECK_THROWS(bourgain_bound(GridDensity(10, neg), 3, 5));
}

TEST_CASE("bourgain bound: half indicator against a refined-grid oracle") {
    auto half_indicator = [](int level) {
        std::vector<double> v(std::size_t{1} << level, 0.0);
        for (std::size_t i = 0; i < v.size() / 2; ++i) v[i] = 2.0;
        return GridDensity(level, std::move(v));
    };
    const BourgainBound coarse = bourgain_bound(half_indicator(10), 3, 7);
    const BourgainBound fine = bourgain_bound(half_indicator(12), 3, 7);
    CHECK(coarse.lhs == Approx(fine.lhs).epsilon(1e-4));
    CHECK(coarse.lhs >= calibrated::c0 * coarse.rhs_mass_cubed);
}

TEST_CASE("scale scan: uniform density certifies immediately") {
    const auto P = Polynomial::parse("t + t^2");
    const TrilinearReport rep = scale_scan(GridDensity::uniform(12), P, ScanParams{});
    REQUIRE(rep.certified_scale > 0);
    CHECK(rep.certified_scale == scale_setup(P).l0);
    REQUIRE(rep.rungs.size() == 1);
    CHECK(rep.rungs[0].lambda == Approx(1.0).margin(1e-9));
    CHECK(rep.rungs[0].certified);
}

TEST_CASE("scale scan: energy budget and the dichotomy bookkeeping") {
    const auto P = Polynomial::parse("t + t^2");
    // A narrow bump never certifies at coarse rungs: separations ~2^-7 miss
    // its support, so the energy alternative must fire at every rung.
    const GridDensity f = mollified_spike(12, 512, std::exp2(-9.0));
    ScanParams params;
    params.K_max = 4;
    const TrilinearReport rep = scale_scan(f, P, params);
    CHECK(rep.certified_scale < 0);
    CHECK(!rep.rungs.empty());
    for (const auto& rung : rep.rungs) {
        if (!rung.certified) {
            CHECK(rung.lambda <= rep.lambda_threshold);
            if (rung.increment_l2 > 0.0) CHECK(rung.increment_above_threshold);
        }
    }
    CHECK(rep.energy_total <= rep.energy_budget + 1e-9);

    // Determinism: the rerun reproduces the report bit for bit.
    const TrilinearReport rep2 = scale_scan(f, P, params);
    REQUIRE(rep2.rungs.size() == rep.rungs.size());
    for (std::size_t i = 0; i < rep.rungs.size(); ++i) {
        CHECK(rep2.rungs[i].lambda == rep.rungs[i].lambda);
        CHECK(rep2.rungs[i].increment_l2 == rep.rungs[i].increment_l2);
    }
}

TEST_CASE("scale scan rejects bad inputs") {
    const auto P = Polynomial::parse("t + t^2");
    std::vector<double> v(std::size_t{1} << 12, 1.0);
    v[0] = 3.0;  // mass > 1
    CHECK_THROWS(scale_scan(GridDensity(12, v), P, ScanParams{}));
}

TEST_CASE("mixed terms: vanishing mu2 kills all seven values") {
    const auto P = Polynomial::parse("t + t^2");
    const MultiplierTable table = MultiplierTable::build(P, 7, 32, 1e-11);
    const FourierSeries mu = fourier_coeffs(GridDensity::uniform(8), 32);
    MeasureConditions cond;
    cond.alpha = 0.9;
    const DecompositionResult dec = decompose(mu, cond);
    const MixedTermResult mixed = mixed_term_bounds(dec.mu1, dec.mu2, 7, 0.1, P, table);
    for (double v : mixed.values) CHECK(v == Approx(0.0).margin(1e-12));
}

TEST_CASE("mixed terms: decay driver formula") {
    MeasureConditions cond;
    cond.alpha = 0.99;
    cond.beta = 0.8;
    cond.C2 = 1.0;
    cond.B = 1.0;
    // N = e^100 and N^{(1-beta-2 s0)/2} = e^-5.
    CHECK(mixed_term_decay_driver(cond, 0.15) == Approx(std::exp(-5.0)).epsilon(1e-10));
}

TEST_CASE("mixed terms: cantor decomposition stays within the comparison bounds", "[heavy]") {
    const auto P = Polynomial::parse("t + t^2");
    const int l0 = scale_setup(P).l0;
    const int K = 1024;
    const FourierSeries mu = fourier_coeffs(cantor_intervals({3, 2, 8, false, 0}), K);
    MeasureConditions cond;
    cond.alpha = std::log(2.0) / std::log(3.0);
    cond.beta = 0.4;
    const DecompositionResult dec = decompose(mu, cond);
    const MultiplierTable table = MultiplierTable::build(P, l0, K, 1e-10);
    const MixedTermResult mixed = mixed_term_bounds(dec.mu1, dec.mu2, l0, 0.1, P, table);
    for (std::size_t i = 0; i < mixed.values.size(); ++i) {
        INFO("tuple " << mixed.tuples[i][0] << mixed.tuples[i][1] << mixed.tuples[i][2]);
        CHECK(mixed.values[i] <= mixed.bounds[i]);
    }
}

TEST_CASE("sobolev improving ratio: degenerate input and single-mode reduction") {
    const auto P = Polynomial::parse("t + t^2");
    const MultiplierTable table = MultiplierTable::build(P, 7, 40, 1e-12);
    const double s0 = 0.1;

    FourierSeries zero(8);
    const FourierSeries g = random_real_series(8, 77);
    const SobolevRatio degenerate = sobolev_improving_ratio(zero, g, 7, s0, P, table);
    CHECK(degenerate.degenerate);
    CHECK(degenerate.ratio == 0.0);

    // Single-frequency pair: one multiplier value determines the ratio.
    FourierSeries f1(20), g1(20);
    const int kf = 12, kg = 12;  // resonant pair for b1 = 0
    f1.at(kf) = complexd(1.0, 0.0);
    g1.at(kg) = complexd(1.0, 0.0);
    const SobolevRatio r = sobolev_improving_ratio(f1, g1, 7, s0, P, table);
    const double mval = std::abs(table.at(kf, kg));
    const double expect = mval * std::pow(1.0 + double(kf + kg) * (kf + kg), s0 / 2) /
                          (std::pow(1.0 + double(kf) * kf, -s0 / 2) * std::pow(1.0 + double(kg) * kg, -s0 / 2));
    CHECK(r.ratio == Approx(expect).epsilon(1e-12));
}

TEST_CASE("sobolev improving ratio: corpus growth is tame in l", "[heavy]") {
    const auto P = Polynomial::parse("t + t^2");
    const int l0 = scale_setup(P).l0;
    const int K = 256;
    const double s0 = 0.1;
    std::vector<int> scales = {l0, l0 + 2, l0 + 4};
    std::vector<double> max_ratio;
    for (int l : scales) {
        const MultiplierTable table = MultiplierTable::build(P, l, K, 1e-10);
        double worst = 0.0;
        for (int pair = 0; pair < 100; ++pair) {
            const FourierSeries f = random_real_series(K, 1000 + pair);
            const FourierSeries g = random_real_series(K, 5000 + pair);
            const SobolevRatio r = sobolev_improving_ratio(f, g, l, s0, P, table);
            REQUIRE_FALSE(r.degenerate);
            worst = std::max(worst, r.ratio);
        }
        max_ratio.push_back(worst);
    }
    // Least-squares fit of log2(max) against l; record the slope and check
    // the fitted envelope really dominates (growth no faster than 2^{g0 l}).
    const double n = static_cast<double>(scales.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < scales.size(); ++i) {
        const double x = scales[i], y = std::log2(max_ratio[i]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    const double intercept = (sy - slope * sx) / n;
    WARN("fitted gamma0-hat = " << slope << " (intercept " << intercept << ")");
    for (std::size_t i = 0; i < scales.size(); ++i)
        CHECK(max_ratio[i] <= std::exp2(slope * scales[i] + intercept) * 1.5);
}

TEST_CASE("bourgain corpus: uniform member has unit ratio") {
    CHECK(bourgain_corpus_min_ratio(GridDensity::uniform(kBourgainCorpusLevel)) == Approx(1.0).margin(1e-9));
}
