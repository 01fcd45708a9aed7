#include <catch2/catch_amalgamated.hpp>
#include <random>

#include "oracle_helpers.hpp"
#include "polypat/fourier.hpp"

using namespace polypat;
using Catch::Approx;

namespace {

// Deterministic random Hermitian series (mt19937_64 bits mapped to doubles
// directly; no std distributions, so the stream is portable).
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

}  // namespace

TEST_CASE("uniform density has a bare constant series") {
    const FourierSeries s = fourier_coeffs(GridDensity::uniform(8), 64);
    CHECK(std::abs(s.at(0) - complexd(1.0, 0.0)) < 1e-14);
    for (int k = 1; k <= 64; ++k) {
        CHECK(std::abs(s.at(k)) < 1e-13);
        CHECK(std::abs(s.at(-k)) < 1e-13);
    }
}

TEST_CASE("cantor coefficients match the self-similar product oracle") {
    // Interval-exact route (triadic breakpoints never meet the dyadic grid).
    const CantorIntervals iv = cantor_intervals({3, 2, 6, false, 0});
    const FourierSeries s = fourier_coeffs(iv, 200);
    for (int k = -200; k <= 200; ++k) {
        const complexd expect = oracle::cantor_product_coeff(k, 6, 3, {0, 2});
        CHECK(std::abs(s.at(k) - expect) < 1e-10);
    }

    // Grid route for power-of-two branching, where the projection is exact.
    const GridDensity mu = cantor_measure({4, 2, 5, false, 0}, 10);
    const FourierSeries g = fourier_coeffs(mu, 128);
    for (int k = -128; k <= 128; ++k) {
        const complexd expect = oracle::cantor_product_coeff(k, 5, 4, {0, 3});
        CHECK(std::abs(g.at(k) - expect) < 1e-11);
    }
}

TEST_CASE("half-period shift preserves coefficient magnitudes") {
    const GridDensity mu = cantor_measure({3, 2, 4, false, 0}, 9);
    std::vector<double> shifted(mu.cells());
    const std::size_t half = mu.cells() / 2;
    for (std::size_t i = 0; i < mu.cells(); ++i) shifted[(i + half) % mu.cells()] = mu.values()[i];
    const FourierSeries a = fourier_coeffs(mu, 100);
    const FourierSeries b = fourier_coeffs(GridDensity(mu.level(), shifted), 100);
    for (int k = -100; k <= 100; ++k) {
        CHECK(std::abs(b.at(k)) == Approx(std::abs(a.at(k))).margin(1e-12));
        // and the phase law is exactly e^{-i pi k}
        const complexd law = std::polar(1.0, -pi * static_cast<double>(k));
        CHECK(std::abs(b.at(k) - law * a.at(k)) < 1e-12);
    }
}

TEST_CASE("cutoff beyond the Nyquist limit is rejected") {
    CHECK_THROWS(fourier_coeffs(GridDensity::uniform(6), 64));
    CHECK_NOTHROW(fourier_coeffs(GridDensity::uniform(6), 32));
}

TEST_CASE("decay constant") {
    CHECK(decay_constant(fourier_coeffs(GridDensity::uniform(8), 64), 0.5) < 1e-12);

    FourierSeries one(8);
    one.at(5) = complexd(0.2, 0.0);
    one.at(-5) = complexd(0.2, 0.0);
    CHECK(decay_constant(one, 0.5) == Approx(0.2 * std::pow(5.0, 0.25)));

    // The Cantor measure is not Rajchman: |c_{3^j}| stays bounded away from
    // zero (product oracle), so the constant keeps growing with the cutoff.
    const CantorIntervals iv = cantor_intervals({3, 2, 8, false, 0});
    double prev = 0.0;
    for (int j = 2; j <= 5; ++j) {
        const int K = static_cast<int>(std::pow(3, j));
        const FourierSeries s = fourier_coeffs(iv, K);
        const double c = decay_constant(s, 0.5);
        const double at_power = std::abs(oracle::cantor_product_coeff(K, 8, 3, {0, 2})) * std::pow(K, 0.25);
        CHECK(at_power > 0.3 * std::pow(K, 0.25));  // no decay along powers of 3
        CHECK(c >= at_power - 1e-12);
        CHECK(c > prev);
        prev = c;
    }
}

TEST_CASE("sobolev norm") {
    FourierSeries c0(4);
    c0.at(0) = complexd(1.0, 0.0);
    for (double s : {-1.0, -0.5, 0.0, 0.5, 1.0}) CHECK(sobolev_norm(c0, s) == Approx(1.0));

    FourierSeries c1(4);
    c1.at(1) = complexd(1.0, 0.0);
    CHECK(sobolev_norm(c1, -0.5) == Approx(std::pow(2.0, -0.25)));

    // Extended-precision summation oracle.
    const CantorIntervals iv = cantor_intervals({3, 2, 6, false, 0});
    const FourierSeries s = fourier_coeffs(iv, 512);
    long double acc = 0.0L;
    for (int k = -512; k <= 512; ++k) {
        const long double w = std::pow(1.0L + static_cast<long double>(k) * k, static_cast<long double>(-0.4));
        acc += static_cast<long double>(std::norm(s.at(k))) * w;
    }
    const double expect = static_cast<double>(std::sqrt(acc));
    CHECK(sobolev_norm(s, -0.4) == Approx(expect).epsilon(1e-12));
}

TEST_CASE("plancherel: sampled band-limited density has matching grid L2 norm") {
    const FourierSeries s = random_real_series(20, 99);
    const GridDensity g = synthesize_samples(s, 8);
    CHECK(std::sqrt(g.l2_norm_sq()) == Approx(sobolev_norm(s, 0.0)).epsilon(1e-10));
}

TEST_CASE("littlewood-paley projections") {
    FourierSeries c0(64);
    c0.at(0) = complexd(1.0, 0.0);
    CHECK(std::abs(lp_project(c0, 0).at(0) - complexd(1.0, 0.0)) < 1e-15);
    for (int k = 1; k < 6; ++k) CHECK(std::abs(lp_project(c0, k).at(0)) < 1e-15);

    // A lone frequency at 40 appears only in bands with 2^k <= 40 <= 3*2^k.
    FourierSeries c40(64);
    c40.at(40) = complexd(1.0, 0.0);
    for (int band = 0; band <= 7; ++band) {
        const double weight = std::abs(lp_project(c40, band).at(40));
        if (band == 4 || band == 5)
            CHECK(weight > 0.0);
        else
            CHECK(weight == 0.0);
    }
    CHECK_THROWS(lp_project(c40, -1));

    // Partition of unity: the bands reassemble the series exactly.
    const FourierSeries s = random_real_series(512, 42);
    FourierSeries sum(512);
    for (int band = 0; band <= lp_bands_for_cutoff(512); ++band) sum += lp_project(s, band);
    double worst = 0.0;
    for (int k = -512; k <= 512; ++k) worst = std::max(worst, std::abs(sum.at(k) - s.at(k)));
    CHECK(worst <= 1e-12);
}

TEST_CASE("decompose: N formula and trivial cases") {
    MeasureConditions cond;
    cond.alpha = 0.9;
    cond.C2 = 1.0;
    const FourierSeries uni = fourier_coeffs(GridDensity::uniform(10), 256);
    const DecompositionResult d = decompose(uni, cond);
    CHECK(d.N == Approx(std::exp(10.0)).epsilon(1e-12));
    CHECK(d.sup_bound == Approx(1.0).margin(1e-9));
    for (int n = -256; n <= 256; ++n) CHECK(std::abs(d.mu2.at(n)) == 0.0);

    cond.alpha = 0.999999;
    CHECK_THROWS_AS(decompose(uni, cond), DecomposeRangeError);
    try {
        decompose(uni, cond);
    } catch (const DecomposeRangeError& e) {
        CHECK(e.log_N == Approx(1.0 / (1.0 - cond.alpha)));
    }
}

TEST_CASE("decompose: defining identities and the Fejer taper") {
    const CantorIntervals iv = cantor_intervals({3, 2, 6, false, 0});
    const FourierSeries mu = fourier_coeffs(iv, 512);
    MeasureConditions cond;
    cond.alpha = std::log(2.0) / std::log(3.0);
    cond.beta = 0.4;
    const DecompositionResult d = decompose(mu, cond);

    CHECK(d.mu2.at(0) == complexd(0.0, 0.0));
    const double window = 2.0 * d.N + 1.0;
    for (int n = -512; n <= 512; ++n) {
        CHECK(d.mu1.at(n) + d.mu2.at(n) == mu.at(n));  // exact split
        CHECK(std::abs(d.mu2.at(n)) <= std::abs(mu.at(n)) + 0.0);
        const double fejer = std::max(0.0, 1.0 - std::abs(static_cast<double>(n)) / window);
        if (n != 0) CHECK(std::abs(d.mu1.at(n) - fejer * mu.at(n)) <= 1e-15 * std::abs(mu.at(n)));
    }

    // mu1 is a Fejer convolution of a nonnegative measure, so its
    // reconstruction is nonnegative up to grid roundoff.
    const GridDensity rec = synthesize_samples(d.mu1.truncated(static_cast<int>(2 * d.N) + 1), 10);
    CHECK(rec.min_value() >= -1e-9);
    CHECK(d.sup_bound >= 1.0);
}

TEST_CASE("fourier series io round trip") {
    const FourierSeries s = random_real_series(33, 5);
    s.save("test_series.bin");
    const FourierSeries back = FourierSeries::load("test_series.bin");
    CHECK(back.cutoff() == 33);
    for (int k = -33; k <= 33; ++k) CHECK(back.at(k) == s.at(k));
    std::remove("test_series.bin");
}
