// Regenerates the measured constants frozen in include/polypat/constants.hpp.
// Run after any change to the quadrature, bump profiles or reference corpora
// and update the header if the printed values drift.
#include <cstdio>
#include <string>
#include <vector>

#include "polypat/fourier.hpp"
#include "polypat/measures.hpp"
#include "polypat/oscillatory.hpp"
#include "polypat/corpus.hpp"
#include "polypat/trilinear.hpp"

using namespace polypat;

namespace {

void stationary_phase_budget() {
    std::puts("== stationary phase: max |quad - leading| * |eta| per (P, l) ==");
    double worst_c = 0.0;
    for (const char* poly : {"t^2", "t + t^2", "t + t^3"}) {
        const Polynomial P = Polynomial::parse(poly);
        for (int l : {2, 4}) {
            const double s = std::exp2(static_cast<double>(-l));
            double worst = 0.0;
            for (int i = 0; i < 10; ++i) {
                const double tc = 1.3 + 0.4 * i / 9.0;
                for (int j = 0; j < 5; ++j) {
                    const double eta = 1e3 * std::pow(100.0, j / 4.0);
                    const double xi = -eta * P.eval(s * tc, 1);
                    const StationaryPhaseResult sp = stationary_phase(xi, eta, l, P);
                    const QuadResult q = multiplier_quadrature(xi, eta, l, P, 1e-12);
                    worst = std::max(worst, std::abs(q.value - sp.leading) * eta);
                }
            }
            const double normalized = worst / std::exp2(calibrated::sp_error_gamma0 * l);
            std::printf("  P = %-10s l = %d: %.6g  (c at gamma0=%.2g: %.6g)\n", poly, l, worst,
                        calibrated::sp_error_gamma0, normalized);
            worst_c = std::max(worst_c, normalized);
        }
    }
    std::printf("  => sp_error_c >= %.6g at gamma0 = %.2g (frozen: %.6g)\n\n", worst_c,
                calibrated::sp_error_gamma0, calibrated::sp_error_c);
}

void nondegeneracy_steps() {
    std::puts("== nondegeneracy finite differences: worst relative error vs step divisor ==");
    for (const char* poly : {"t + t^2", "t + t^3"}) {
        const Polynomial P = Polynomial::parse(poly);
        for (int l : {4, 5, 7}) {
            const double slo = std::exp2(static_cast<double>(-l - 1));
            const double shi = std::exp2(static_cast<double>(-l + 1));
            std::printf("  P = %-10s l = %d:", poly, l);
            for (double divisor : {16.0, 24.0, 32.0, 48.0, 64.0, 96.0, 128.0, 192.0}) {
                double worst = 0.0;
                bool ok = true;
                for (int i = 1; i <= 20 && ok; ++i) {
                    const double s = slo + (shi - slo) * (0.2 + 0.6 * i / 21.0);
                    const double rho = -P.linear_coeff() - P.eval_q(s, 1);
                    try {
                        const double sym = nondegeneracy(rho, P, l);
                        const double fd = nondegeneracy_fd(rho, P, l, divisor);
                        worst = std::max(worst, std::abs(fd - sym) / sym);
                    } catch (const std::exception&) {
                        ok = false;
                    }
                }
                if (ok)
                    std::printf("  %g:%.2g", divisor, worst);
                else
                    std::printf("  %g:out", divisor);
            }
            std::puts("");
        }
    }
    std::puts("");
}

void bourgain_constants() {
    std::puts("== bourgain lower bound over the reference corpora ==");
    const auto corpusA = bourgain_corpus(0);
    const auto corpusB = bourgain_corpus(1);
    double minA = 1e300, minB = 1e300;
    for (const auto& f : corpusA) minA = std::min(minA, bourgain_corpus_min_ratio(f));
    for (const auto& f : corpusB) minB = std::min(minB, bourgain_corpus_min_ratio(f));
    std::printf("  corpus A (%zu densities): min ratio %.6f  hash %016llx\n", corpusA.size(), minA,
                static_cast<unsigned long long>(bourgain_corpus_hash(0)));
    std::printf("  corpus B (%zu densities): min ratio %.6f\n", corpusB.size(), minB);
    std::printf("  => c0 = 0.9 * minA = %.6f ; disjoint-corpus shift %.2f%%\n\n", 0.9 * minA,
                100.0 * std::abs(minB - minA) / minA);
}

void energy_constant() {
    std::puts("== scale-scan energy ratio sum ||f*th_k - f*th_k+1||^2 / ||f||^2 ==");
    double worst = 0.0;
    for (const auto& f : bourgain_corpus(0)) {
        double total = 0.0;
        int prev = -1;
        for (int scale = 2; scale <= f.level() - 2; scale = std::max(scale + 1, (3 * scale + 1) / 2)) {
            if (prev >= 0) {
                const GridDensity a = convolve_with_theta(f, prev);
                const GridDensity b = convolve_with_theta(f, scale);
                double acc = 0.0;
                for (std::size_t i = 0; i < a.cells(); ++i) {
                    const double d = a.values()[i] - b.values()[i];
                    acc += d * d;
                }
                total += acc * a.cell_width();
            }
            prev = scale;
        }
        worst = std::max(worst, total / f.l2_norm_sq());
    }
    std::printf("  worst ratio %.6g  => freeze C0_energy with ~2x margin\n\n", worst);
}

void mixed_constant() {
    std::puts("== sobolev-improving constant C_l0 (mixed-term comparison) ==");
    const double value = measure_sobolev_constant();
    std::printf("  max |Lambda| / (H^-s0 norm product) over reference set: %.6g\n", value);
    std::printf("  => freeze C_l0 with ~2x margin\n");
}

}  // namespace

int main(int argc, char** argv) {
    const std::string which = argc > 1 ? argv[1] : "all";
    if (which == "all" || which == "sp") stationary_phase_budget();
    if (which == "all" || which == "fd") nondegeneracy_steps();
    if (which == "all" || which == "bourgain") bourgain_constants();
    if (which == "all" || which == "energy") energy_constant();
    if (which == "all" || which == "mixed") mixed_constant();
    return 0;
}
