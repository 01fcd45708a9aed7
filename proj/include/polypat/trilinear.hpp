// The operator T_l(f,g)(x) = integral f(x+t) g(x+P(t)) tau_l(t) dt and the
// trilinear form Lambda_l on both sides of the Fourier transform, plus the
// scale-ladder machinery: Bourgain's triple-convolution bound, the energy
// pigeonholing scan, and the mixed-term diagnostics of the mu1+mu2
// decomposition.
//
// Frequency convention: with series coefficients on integer frequencies and
// tau_l(t) = 2^l tau0(2^l t),
//   Lambda = sum_{xi,eta} f^(xi) g^(eta) h^(-xi-eta) m_l(2 pi xi, 2 pi eta),
// which matches the physical side exactly (no extra constant; the f=g=h=1
// case gives 1 on both sides).
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <vector>

#include "polypat/bump.hpp"
#include "polypat/common.hpp"
#include "polypat/constants.hpp"
#include "polypat/fft.hpp"
#include "polypat/fourier.hpp"
#include "polypat/grid_density.hpp"
#include "polypat/oscillatory.hpp"
#include "polypat/polynomial.hpp"

namespace polypat {

namespace detail {

// Monotone pieces of P over [a,b] as ordered knots.
inline std::vector<double> monotone_knots(const Polynomial& P, double a, double b) {
    std::vector<double> knots = P.derivative_roots(a, b);
    knots.insert(knots.begin(), a);
    knots.push_back(b);
    std::sort(knots.begin(), knots.end());
    knots.erase(std::unique(knots.begin(), knots.end(),
                            [&](double x, double y) { return std::abs(x - y) < 1e-15 * (b - a); }),
                knots.end());
    return knots;
}

// Solves P(t) = c on a monotone piece [a,b] (value bracketed) to near
// machine accuracy.
inline double invert_on_piece(const Polynomial& P, double a, double b, double c) {
    double lo = a, hi = b;
    double flo = P.eval(lo) - c;
    double t = 0.5 * (lo + hi);
    for (int it = 0; it < 100; ++it) {
        const double ft = P.eval(t) - c;
        if (ft == 0.0) return t;
        if ((flo < 0.0) == (ft < 0.0)) {
            lo = t;
            flo = ft;
        } else {
            hi = t;
        }
        const double dp = P.eval(t, 1);
        double next = (dp != 0.0) ? t - ft / dp : 0.5 * (lo + hi);
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        if (std::abs(next - t) < 1e-17 * (b - a) + 1e-300) return next;
        t = next;
    }
    return t;
}

}  // namespace detail

// T_l(f,g) evaluated at every output cell center by breakpoint-exact
// quadrature in t: between breakpoints both lookups are constant, so each
// segment contributes f g * integral of tau_l, and the only numerical error
// is the segment rule on the smooth bump.
inline GridDensity apply_T(const GridDensity& f, const GridDensity& g, int l, const Polynomial& P,
                           int l0_hint = -1) {
    if (f.level() != g.level()) throw std::invalid_argument("apply_T: grid level mismatch");
    const int J = f.level();
    if (J < l + 3) throw std::invalid_argument("apply_T: grid too coarse to resolve the scale (level < l + 3)");
    const int l0 = l0_hint >= 0 ? l0_hint : scale_setup(P).l0;
    if (l < l0) throw std::invalid_argument("apply_T: scale below the dominance threshold l0");

    const double w_lo = std::exp2(static_cast<double>(-l));
    const double w_hi = 2.0 * w_lo;
    const double dx = f.cell_width();
    const auto n = static_cast<std::int64_t>(f.cells());

    // t-breakpoints from the f argument are x-independent: x + t crosses a
    // cell boundary at t = (m + 1/2) dx for cell centers x.
    std::vector<double> base_breaks;
    for (std::int64_t m = (std::int64_t{1} << (J - l)); m <= (std::int64_t{2} << (J - l)); ++m)
        base_breaks.push_back((static_cast<double>(m) - 0.5) * dx);
    const std::vector<double> pieces = detail::monotone_knots(P, w_lo, w_hi);

    std::vector<double> values(f.cells());
    std::vector<double> breaks;
    for (std::int64_t i = 0; i < n; ++i) {
        const double x = (static_cast<double>(i) + 0.5) * dx;
        breaks.assign(base_breaks.begin(), base_breaks.end());
        breaks.push_back(w_lo);
        breaks.push_back(w_hi);
        // g-argument breakpoints: x + P(t) crosses a cell boundary j dx.
        for (std::size_t p = 0; p + 1 < pieces.size(); ++p) {
            const double pa = pieces[p], pb = pieces[p + 1];
            const double va = P.eval(pa), vb = P.eval(pb);
            const double vmin = std::min(va, vb), vmax = std::max(va, vb);
            const auto jlo = static_cast<std::int64_t>(std::ceil((x + vmin) / dx));
            const auto jhi = static_cast<std::int64_t>(std::floor((x + vmax) / dx));
            for (std::int64_t j = jlo; j <= jhi; ++j) {
                const double c = static_cast<double>(j) * dx - x;
                if (c <= vmin || c >= vmax) continue;
                breaks.push_back(detail::invert_on_piece(P, pa, pb, c));
            }
        }
        std::sort(breaks.begin(), breaks.end());
        double acc = 0.0;
        for (std::size_t s = 0; s + 1 < breaks.size(); ++s) {
            const double a = std::max(breaks[s], w_lo);
            const double b = std::min(breaks[s + 1], w_hi);
            if (b - a < 1e-18) continue;
            const double tm = 0.5 * (a + b);
            const double fv = f.value_at(x + tm);
            const double gv = g.value_at(x + P.eval(tm));
            if (fv == 0.0 || gv == 0.0) continue;
            acc += fv * gv * gl7_panel([&](double t) { return tau_l(t, l); }, a, b);
        }
        values[static_cast<std::size_t>(i)] = acc;
    }
    return GridDensity(J, std::move(values));
}

// Physical-side trilinear form on grid densities:
//   Lambda = integral h(x) T_l(f,g)(x) dx.
inline double trilinear_physical(const GridDensity& f, const GridDensity& g, const GridDensity& witness,
                                 int l, const Polynomial& P, int l0_hint = -1) {
    if (witness.level() != f.level()) throw std::invalid_argument("trilinear: grid level mismatch");
    const GridDensity T = apply_T(f, g, l, P, l0_hint);
    std::vector<double> prods(T.cells());
    for (std::size_t i = 0; i < T.cells(); ++i) prods[i] = witness.values()[i] * T.values()[i];
    return pairwise_sum(prods) * T.cell_width();
}

namespace detail {

// Values of a band-limited series on the lattice {j/M + shift}.
inline void lattice_values(const FourierSeries& s, std::size_t M, double shift, std::vector<complexd>& work,
                           std::vector<double>& out) {
    work.assign(M, complexd(0.0, 0.0));
    const auto m = static_cast<int>(M);
    for (int k = -s.cutoff(); k <= s.cutoff(); ++k) {
        const std::size_t idx = static_cast<std::size_t>(((k % m) + m) % m);
        work[idx] += s.at(k) * std::polar(1.0, two_pi * k * shift);
    }
    ifft_unnormalized(work);
    out.resize(M);
    for (std::size_t j = 0; j < M; ++j) out[j] = work[j].real();
}

}  // namespace detail

// Physical-side trilinear form on band-limited inputs. The x-integral uses
// the M-point lattice rule, exact for trigonometric polynomials of degree
// < M; the t-integral is adaptive on the smooth windowed integrand, so the
// result is limited only by the t tolerance.
inline double trilinear_physical(const FourierSeries& f, const FourierSeries& g, const FourierSeries& witness,
                                 int l, const Polynomial& P, int grid_level, double abs_tol = 1e-10) {
    if (grid_level < l + 3) throw std::invalid_argument("trilinear: grid level must be at least l + 3");
    const std::size_t M = std::size_t{1} << grid_level;
    if (static_cast<int>(M) <= f.cutoff() + g.cutoff() + witness.cutoff())
        throw std::invalid_argument("trilinear: lattice too small for the combined band limit");

    std::vector<double> hv;
    std::vector<complexd> work;
    detail::lattice_values(witness, M, 0.0, work, hv);

    const double w_lo = std::exp2(static_cast<double>(-l));
    const double w_hi = 2.0 * w_lo;
    std::vector<double> fv, gv, prods(M);
    auto S = [&](double t) {
        detail::lattice_values(f, M, t, work, fv);
        detail::lattice_values(g, M, P.eval(t), work, gv);
        for (std::size_t j = 0; j < M; ++j) prods[j] = hv[j] * fv[j] * gv[j];
        const double mean = pairwise_sum(prods) / static_cast<double>(M);
        return complexd(mean * tau_l(t, l), 0.0);
    };
    double pmax = 0.0;
    for (int i = 0; i <= 32; ++i) pmax = std::max(pmax, std::abs(P.eval(w_lo + (w_hi - w_lo) * i / 32.0, 1)));
    const double rate = two_pi * (f.cutoff() + g.cutoff() * 1.1 * pmax) + 1.0;
    const QuadResult r = integrate_adaptive(S, w_lo, w_hi, abs_tol, std::min((w_hi - w_lo) / 4.0, 3.0 / rate));
    return r.value.real();
}

// Fourier-side trilinear form. Skips vanishing coefficient pairs, so sparse
// series only touch the multiplier at their own frequencies. Asserts the
// imaginary residual stays below 1e-9 (real inputs make the sum real).
inline double trilinear_fourier(const FourierSeries& f, const FourierSeries& g, const FourierSeries& witness,
                                const MultiplierSource& m) {
    std::vector<complexd> terms;
    terms.reserve(static_cast<std::size_t>(2 * f.cutoff() + 1) * static_cast<std::size_t>(2 * g.cutoff() + 1) / 2);
    for (int xi = -f.cutoff(); xi <= f.cutoff(); ++xi) {
        const complexd fc = f.at(xi);
        if (fc == complexd(0.0, 0.0)) continue;
        for (int eta = -g.cutoff(); eta <= g.cutoff(); ++eta) {
            const complexd gc = g.at(eta);
            if (gc == complexd(0.0, 0.0)) continue;
            const complexd hc = witness.at_or_zero(-xi - eta);
            if (hc == complexd(0.0, 0.0)) continue;
            terms.push_back(fc * gc * hc * m.at(xi, eta));
        }
    }
    const complexd total = pairwise_sum(terms);
    if (std::abs(total.imag()) > 1e-9 * (1.0 + std::abs(total.real())))
        throw std::logic_error("trilinear fourier: imaginary residual exceeds tolerance");
    return total.real();
}

enum class TrilinearSide { physical, fourier };

// Spec-shaped dispatcher for grid inputs. The fourier side needs the series
// representation, so requesting it here is a representation mismatch.
inline double trilinear_form(const GridDensity& f, const GridDensity& g, const GridDensity& witness, int l,
                             const Polynomial& P, TrilinearSide side, int l0_hint = -1) {
    if (side == TrilinearSide::fourier)
        throw std::invalid_argument("trilinear form: fourier side requires series inputs (take fourier_coeffs first)");
    return trilinear_physical(f, g, witness, l, P, l0_hint);
}

inline double trilinear_form(const FourierSeries& f, const FourierSeries& g, const FourierSeries& witness,
                             int l, const Polynomial& P, TrilinearSide side, const MultiplierSource* table,
                             int grid_level = 14) {
    if (side == TrilinearSide::fourier) {
        if (table == nullptr) throw std::invalid_argument("trilinear form: fourier side requires a multiplier table");
        return trilinear_fourier(f, g, witness, *table);
    }
    return trilinear_physical(f, g, witness, l, P, grid_level);
}

// f * theta_k on the grid (theta_k has width parameter eps = 2^-k; wide
// kernels are periodized).
inline GridDensity convolve_with_theta(const GridDensity& f, int scale) {
    const double eps = std::exp2(static_cast<double>(-scale));
    if (eps < f.cell_width()) throw std::invalid_argument("theta convolution: scale below grid resolution");
    std::vector<double> out = circular_convolution(
        f.values(), discretize_kernel(BumpFunction::make_theta(), eps, f.level()), f.cell_width());
    const bool input_nonneg = f.min_value() >= 0.0;
    const double floor = -1e-10 * (1.0 + f.sup());
    for (double& v : out) {
        if (v < 0.0 && input_nonneg) {
            if (v < floor) throw std::logic_error("theta convolution: genuinely negative output");
            v = 0.0;
        }
    }
    return GridDensity(f.level(), std::move(out));
}

struct BourgainBound {
    double lhs = 0.0;             // integral f (f*theta_k)(f*theta_l)
    double rhs_mass_cubed = 0.0;  // (integral f)^3
};

// Both sides of the triple-convolution lower bound; the caller compares
// lhs >= c0 * rhs against the calibrated c0.
inline BourgainBound bourgain_bound(const GridDensity& f, int k, int ell) {
    f.check_nonnegative("bourgain bound");
    const GridDensity u = convolve_with_theta(f, k);
    const GridDensity v = convolve_with_theta(f, ell);
    std::vector<double> prods(f.cells());
    for (std::size_t i = 0; i < f.cells(); ++i) prods[i] = f.values()[i] * u.values()[i] * v.values()[i];
    BourgainBound out;
    out.lhs = pairwise_sum(prods) * f.cell_width();
    const double mass = f.mass();
    out.rhs_mass_cubed = mass * mass * mass;
    return out;
}

struct ScanParams {
    double c0 = calibrated::c0;      // triple-convolution lower bound
    double C0 = calibrated::C0_energy;  // energy budget constant
    double ratio = 1.5;              // ladder growth l_{k+1} = ceil(ratio l_k)
    int l_start = -1;                // -1: use scale_setup(P).l0
    int K_max = 8;                   // ladder length cap
    double C_M = -1.0;               // -1: the literal M^10 of the paper
    double dominance = 100.0;        // Gamma_0 for scale_setup
};

struct ScanRung {
    int scale = 0;
    double lambda = 0.0;
    double increment_l2 = 0.0;  // ||f*theta_{l_k} - f*theta_{l_{k+1}}||_2
    bool certified = false;
    bool increment_above_threshold = true;
};

struct TrilinearReport {
    std::vector<ScanRung> rungs;
    int certified_scale = -1;  // -1: scan ended without certification
    double c0 = 0.0;
    double lambda_threshold = 0.0;     // 2^-10 c0
    double increment_threshold = 0.0;  // 2^-10 c0 / C_M
    bool threshold_vacuous = false;    // literal M^10 makes the dichotomy undetectable
    double M = 0.0;                    // sup f
    double energy_total = 0.0;         // sum of squared increments
    double energy_budget = 0.0;        // C0 ||f||_2^2
    double l2_sq = 0.0;
    int K_max = 0;
    bool budget_contradiction = false;  // scan exhausted without certification
    bool resolution_exceeded = false;   // grid ran out before the ladder did
};

// Bourgain's pigeonholing walk: at each rung either Lambda certifies or an
// L2 energy increment is extracted; the total energy is capped by
// C0 ||f||_2^2, which is what makes the dichotomy terminate.
inline TrilinearReport scale_scan(const GridDensity& f, const Polynomial& P, const ScanParams& params) {
    f.check_nonnegative("scale scan");
    if (std::abs(f.mass() - 1.0) > 1e-9) throw std::invalid_argument("scale scan: density must have unit mass");
    TrilinearReport rep;
    rep.c0 = params.c0;
    rep.M = f.sup();
    rep.K_max = params.K_max;
    rep.l2_sq = f.l2_norm_sq();
    rep.energy_budget = params.C0 * rep.l2_sq;
    rep.lambda_threshold = std::exp2(-10.0) * params.c0;
    const double cm = params.C_M > 0.0 ? params.C_M : std::pow(std::max(rep.M, 1.0), 10.0);
    rep.increment_threshold = rep.lambda_threshold / cm;
    rep.threshold_vacuous = rep.increment_threshold < 0x1.0p-40;

    const int l0 = scale_setup(P, params.dominance).l0;
    int scale = params.l_start > 0 ? std::max(params.l_start, l0) : l0;
    for (int k = 0; k < params.K_max; ++k) {
        if (f.level() < scale + 3) {
            rep.resolution_exceeded = true;
            break;
        }
        ScanRung rung;
        rung.scale = scale;
        rung.lambda = trilinear_physical(f, f, f, scale, P, l0);
        if (rung.lambda > rep.lambda_threshold) {
            rung.certified = true;
            rep.rungs.push_back(rung);
            rep.certified_scale = scale;
            break;
        }
        const int next = std::max(scale + 1, static_cast<int>(std::ceil(params.ratio * scale)));
        if (std::exp2(static_cast<double>(-next)) < f.cell_width() || f.level() < next + 3) {
            rep.resolution_exceeded = true;
            rep.rungs.push_back(rung);
            break;
        }
        const GridDensity a = convolve_with_theta(f, scale);
        const GridDensity b = convolve_with_theta(f, next);
        std::vector<double> diff(f.cells());
        for (std::size_t i = 0; i < f.cells(); ++i) {
            const double d = a.values()[i] - b.values()[i];
            diff[i] = d * d;
        }
        const double inc_sq = pairwise_sum(diff) * f.cell_width();
        rung.increment_l2 = std::sqrt(inc_sq);
        rung.increment_above_threshold = rung.increment_l2 > rep.increment_threshold;
        rep.energy_total += inc_sq;
        rep.rungs.push_back(rung);
        scale = next;
    }
    rep.budget_contradiction = rep.certified_scale < 0 && !rep.resolution_exceeded;
    return rep;
}

// The seven mixed trilinear forms Lambda_{l0}(mu_i1, mu_i2, mu_i3) with
// (i1,i2,i3) != (1,1,1), evaluated on the Fourier side, next to the
// H^-s0 product comparison bounds.
struct MixedTermResult {
    std::array<double, 7> values{};   // |Lambda| per tuple, order below
    std::array<double, 7> bounds{};   // C_l0 * prod of H^-s0 norms
    std::array<std::array<int, 3>, 7> tuples{};
    double C_l0 = calibrated::C_l0;
};

inline MixedTermResult mixed_term_bounds(const FourierSeries& mu1, const FourierSeries& mu2, int /*l0*/,
                                         double s0, const Polynomial& /*P*/, const MultiplierSource& table) {
    static constexpr std::array<std::array<int, 3>, 7> tuples = {
        {{1, 1, 2}, {1, 2, 1}, {2, 1, 1}, {1, 2, 2}, {2, 1, 2}, {2, 2, 1}, {2, 2, 2}}};
    MixedTermResult out;
    out.tuples = tuples;
    const double n1 = sobolev_norm(mu1, -s0);
    const double n2 = sobolev_norm(mu2, -s0);
    for (std::size_t i = 0; i < tuples.size(); ++i) {
        // Lambda(mu_i1, mu_i2, mu_i3): slot 1 sits at x (the witness), slot
        // 2 at x+t (f), slot 3 at x+P(t) (g).
        const FourierSeries& w = tuples[i][0] == 1 ? mu1 : mu2;
        const FourierSeries& f = tuples[i][1] == 1 ? mu1 : mu2;
        const FourierSeries& g = tuples[i][2] == 1 ? mu1 : mu2;
        out.values[i] = std::abs(trilinear_fourier(f, g, w, table));
        double bound = out.C_l0;
        for (int slot : tuples[i]) bound *= (slot == 1 ? n1 : n2);
        out.bounds[i] = bound;
    }
    return out;
}

// The decay driver N^{(1-beta-2 s0)/2} of the mixed-term estimate, with
// N = C2^-1 e^{1/(1-alpha)}, evaluated in log form so extreme alpha stays
// finite.
inline double mixed_term_decay_driver(const MeasureConditions& cond, double s0) {
    const double log_N = -std::log(cond.C2) + 1.0 / (1.0 - cond.alpha);
    return std::exp(0.5 * (1.0 - cond.beta - 2.0 * s0) * log_N);
}

struct SobolevRatio {
    double ratio = 0.0;
    bool degenerate = false;  // zero denominator convention
};

// ||T_l(f,g)||_{H^s0} / (||f||_{H^-s0} ||g||_{H^-s0}); the output series is
// the frequency-side convolution sum_{xi+eta=kappa} f^ g^ m_l, exact for
// band-limited inputs.
inline SobolevRatio sobolev_improving_ratio(const FourierSeries& f, const FourierSeries& g, int /*l*/,
                                            double s0, const Polynomial& /*P*/, const MultiplierSource& table) {
    SobolevRatio out;
    const double nf = sobolev_norm(f, -s0);
    const double ng = sobolev_norm(g, -s0);
    if (nf == 0.0 || ng == 0.0) {
        out.degenerate = true;
        return out;
    }
    FourierSeries T(f.cutoff() + g.cutoff());
    for (int kappa = -T.cutoff(); kappa <= T.cutoff(); ++kappa) {
        std::vector<complexd> terms;
        for (int xi = -f.cutoff(); xi <= f.cutoff(); ++xi) {
            const int eta = kappa - xi;
            if (eta < -g.cutoff() || eta > g.cutoff()) continue;
            const complexd fc = f.at(xi);
            const complexd gc = g.at(eta);
            if (fc == complexd(0.0, 0.0) || gc == complexd(0.0, 0.0)) continue;
            terms.push_back(fc * gc * table.at(xi, eta));
        }
        T.at(kappa) = terms.empty() ? complexd(0.0, 0.0) : pairwise_sum(terms);
    }
    out.ratio = sobolev_norm(T, s0) / (nf * ng);
    return out;
}

}  // namespace polypat
