// The oscillatory multiplier
//   m_l(xi, eta) = integral over [1,2] of e^{i(2^-l t xi + P(2^-l t) eta)} tau0(t) dt
// by oscillation-aware adaptive quadrature, its stationary-phase leading
// term, the scale bookkeeping (dominance of the low-order monomials), and
// the third-derivative non-degeneracy quantity of the phase.
#pragma once

#include <cmath>
#include <complex>
#include <cstdio>
#include <fstream>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "polypat/bump.hpp"
#include "polypat/common.hpp"
#include "polypat/constants.hpp"
#include "polypat/polynomial.hpp"
#include "polypat/quadrature.hpp"

namespace polypat {

struct ScaleParams {
    int l0 = 1;                  // smallest scale with both dominance conditions
    double dominance = 100.0;    // the factor Gamma_0
    std::vector<int> b;          // dyadic sizes: 2^{b_i} <= |a_i| < 2^{b_i+1}
};

// Dyadic size of a coefficient, exact on the exponent field.
inline int dyadic_size(double a) {
    int e = 0;
    const double m = std::frexp(std::abs(a), &e);  // |a| = m 2^e, m in [0.5,1)
    (void)m;
    return e - 1;
}

// Smallest l >= 1 such that for all scales at least l the first monomial
// dominates the rest by Gamma_0 and the second dominates the tail by
// Gamma_0. Both ratio families are decreasing in l, so a linear scan from
// 1 gives the minimal scale.
inline ScaleParams scale_setup(const Polynomial& P, double dominance = 100.0) {
    if (!(dominance >= 2.0)) throw std::invalid_argument("scale setup: dominance factor must be >= 2");
    P.require_curvature("scale setup");
    ScaleParams out;
    out.dominance = dominance;
    for (const auto& t : P.terms()) out.b.push_back(dyadic_size(t.coeff));

    const auto& terms = P.terms();
    const auto holds_at = [&](int l) {
        const double le = static_cast<double>(l);
        for (std::size_t i = 1; i < terms.size(); ++i) {
            const double lhs = std::abs(terms[i].coeff) * std::exp2(-le * terms[i].exponent);
            const double rhs = std::abs(terms[0].coeff) * std::exp2(-le * terms[0].exponent) / dominance;
            if (lhs > rhs) return false;
        }
        for (std::size_t i = 2; i < terms.size(); ++i) {
            const double lhs = std::abs(terms[i].coeff) * std::exp2(-le * terms[i].exponent);
            const double rhs = std::abs(terms[1].coeff) * std::exp2(-le * terms[1].exponent) / dominance;
            if (lhs > rhs) return false;
        }
        return true;
    };
    int l = 1;
    while (!holds_at(l)) {
        ++l;
        if (l > 4096) throw std::runtime_error("scale setup: dominance scan did not terminate");
    }
    out.l0 = l;
    return out;
}

namespace detail {

// Largest |d/du P(2^-l u)| over u in [1,2]; panel-width heuristic only, so
// a sampled maximum with headroom is enough.
inline double rescaled_phase_rate(const Polynomial& P, int l, double xi, double eta) {
    const double s = std::exp2(static_cast<double>(-l));
    double pmax = 0.0;
    for (int i = 0; i <= 64; ++i) {
        const double u = 1.0 + static_cast<double>(i) / 64.0;
        pmax = std::max(pmax, std::abs(P.eval(s * u, 1)));
    }
    return std::abs(s * xi) + std::abs(eta) * 1.1 * s * pmax + 1.0;
}

}  // namespace detail

// Adaptive evaluation of m_l. Seed panels scale inversely with the phase
// rate (width <= 2.5/(|2^-l xi| + |eta| max|dP(2^-l u)/du| + 1), capped at
// 1/8): a GK15 panel spanning 2.5 radians of phase is exact to ~1e-15, and
// the embedded-estimate refinement below drives the total under abs_tol.
// A non-converged result is returned with its honest error and flag rather
// than thrown.
inline QuadResult multiplier_quadrature(double xi, double eta, int l, const Polynomial& P,
                                        double abs_tol = 1e-10) {
    const double s = std::exp2(static_cast<double>(-l));
    const double rate = detail::rescaled_phase_rate(P, l, xi, eta);
    const double width = std::min(0.125, 2.5 / rate);
    auto integrand = [&](double u) {
        const double t = s * u;
        const double phase = t * xi + P.eval(t) * eta;
        return std::polar(tau0(u), phase);
    };
    QuadResult r = integrate_adaptive(integrand, 1.0, 2.0, abs_tol, width);
    if (std::abs(r.value) > 1.0 + std::max(1e-8, 10.0 * r.error))
        throw std::logic_error("multiplier quadrature: |m_l| exceeded the triangle-inequality bound");
    return r;
}

struct StationaryPhaseResult {
    double t_c = 0.0;          // critical point, unrescaled (in (2^-l-1, 2^-l+1))
    complexd amplitude{0.0};   // a(xi,eta) with the sqrt(2 pi) and e^{+-i pi/4} factors
    double phase = 0.0;        // Psi(xi,eta) = t_c xi + P(t_c) eta
    complexd leading{0.0};     // amplitude |eta|^-1/2 e^{i Psi}
    double error_bound = 0.0;  // calibrated c 2^{gamma0 l} / |eta|
};

struct NoCriticalPointError : std::domain_error {
    using std::domain_error::domain_error;
};
struct DegeneratePhaseError : std::domain_error {
    using std::domain_error::domain_error;
};

namespace detail {

// Solves xi + P'(2^-l u) eta = 0 for u in (1/2, 2) by bracketing plus
// safeguarded Newton. Returns the rescaled critical point.
inline double critical_point_rescaled(double xi, double eta, int l, const Polynomial& P) {
    if (eta == 0.0) throw NoCriticalPointError("stationary phase: eta = 0 has no critical point");
    const double s = std::exp2(static_cast<double>(-l));
    auto g = [&](double u) { return xi + P.eval(s * u, 1) * eta; };

    const int samples = 256;
    const double ulo = 0.5, uhi = 2.0;
    double a = ulo, fa = g(ulo);
    double bra = 0.0, brb = 0.0;
    bool found = false;
    for (int i = 1; i <= samples; ++i) {
        const double b = ulo + (uhi - ulo) * static_cast<double>(i) / samples;
        const double fb = g(b);
        if (fa == 0.0 || (fa < 0.0) != (fb < 0.0)) {
            // Prefer a bracket that meets the support [1,2] of tau0.
            if (!found || b >= 1.0) {
                bra = a;
                brb = b;
                found = true;
                if (b >= 1.0 && a <= 2.0) break;
            }
        }
        a = b;
        fa = fb;
    }
    if (!found) throw NoCriticalPointError("stationary phase: no critical point in (2^-l-1, 2^-l+1)");

    double lo = bra, hi = brb;
    double flo = g(lo);
    double u = 0.5 * (lo + hi);
    for (int it = 0; it < 200; ++it) {
        const double fu = g(u);
        const double scale = std::abs(xi) + std::abs(eta * P.eval(s * u, 1)) + 1e-300;
        if (std::abs(fu) <= 1e-14 * scale) return u;
        if ((flo < 0.0) == (fu < 0.0)) {
            lo = u;
            flo = fu;
        } else {
            hi = u;
        }
        const double dg = eta * s * P.eval(s * u, 2);
        double next = (dg != 0.0) ? u - fu / dg : 0.5 * (lo + hi);
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        u = next;
    }
    return u;
}

}  // namespace detail

// Leading-order stationary phase approximation of m_l:
//   m_l ~ sqrt(2 pi / |2^-2l P''(t_c)|) tau0(2^l t_c)
//         e^{i sign(eta P''(t_c)) pi/4} |eta|^-1/2 e^{i Psi}.
// The universal quadratic-Gaussian constant and phase are explicit so the
// leading term is directly comparable with quadrature.
inline StationaryPhaseResult stationary_phase(double xi, double eta, int l, const Polynomial& P) {
    P.require_curvature("stationary phase");
    const double s = std::exp2(static_cast<double>(-l));
    const double u_c = detail::critical_point_rescaled(xi, eta, l, P);
    const double t_c = s * u_c;
    const double second = P.eval(t_c, 2);
    if (std::abs(second) * s * s < 1e-300)
        throw DegeneratePhaseError("stationary phase: P'' vanishes at the critical point");

    StationaryPhaseResult out;
    out.t_c = t_c;
    out.phase = t_c * xi + P.eval(t_c) * eta;
    const double curvature = s * s * std::abs(second);
    const double sign = (eta * second) >= 0.0 ? 1.0 : -1.0;
    out.amplitude = std::sqrt(two_pi / curvature) * tau0(u_c) * std::polar(1.0, sign * pi / 4.0);
    out.leading = out.amplitude * std::polar(1.0 / std::sqrt(std::abs(eta)), out.phase);
    out.error_bound = calibrated::sp_error_c * std::exp2(calibrated::sp_error_gamma0 * l) / std::abs(eta);
    return out;
}

// Psi(xi, eta) alone; evaluating at the critical point makes the value
// first-order insensitive to the solver tolerance.
inline double stationary_phase_value(double xi, double eta, int l, const Polynomial& P) {
    const double s = std::exp2(static_cast<double>(-l));
    const double t_c = s * detail::critical_point_rescaled(xi, eta, l, P);
    return t_c * xi + P.eval(t_c) * eta;
}

// Non-degeneracy bracket of Claim 2.4, evaluated at s = (Q')^{-1}(rho')
// with the variable change rho' = -rho - a1 folded in:
//   | -(2Q'+2a1-1) Q''^2 + (Q'+a1)(Q'+a1-1) Q''' |.
// The exact identity behind the finite-difference cross-check is
//   d_xi d_eta (d_xi - d_eta) Psi = bracket / (eta^2 P''(s)^3).
inline double nondegeneracy(double rho, const Polynomial& P, int l) {
    P.require_curvature("nondegeneracy");
    const double a1 = P.linear_coeff();
    const double target = -rho - a1;  // Q'(s) at the admissible point
    const double slo = std::exp2(static_cast<double>(-l - 1));
    const double shi = std::exp2(static_cast<double>(-l + 1));
    auto qp = [&](double t) { return P.eval_q(t, 1); };
    double lo = slo, hi = shi;
    double flo = qp(lo) - target, fhi = qp(hi) - target;
    if ((flo < 0.0) == (fhi < 0.0))
        throw std::domain_error("nondegeneracy: rho outside the admissible window of (Q')^-1");
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double fm = qp(mid) - target;
        if ((flo < 0.0) == (fm < 0.0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
            fhi = fm;
        }
        if (hi - lo < 1e-16 * slo) break;
    }
    const double s = 0.5 * (lo + hi);
    const double q1 = P.eval_q(s, 1), q2 = P.eval_q(s, 2), q3 = P.eval_q(s, 3);
    return std::abs(-(2.0 * q1 + 2.0 * a1 - 1.0) * q2 * q2 + (q1 + a1) * (q1 + a1 - 1.0) * q3);
}

// Finite-difference cross-check: fourth-order nested central differences of
// Psi at (xi, eta) = (rho, 1), rescaled to the bracket's units by
// eta^2 |P''(s)|^3. The step balances h^4 truncation against the 1/h^3
// roundoff of the triple nesting; `step_divisor` is the window fraction.
inline double nondegeneracy_fd(double rho, const Polynomial& P, int l, double step_divisor = 64.0) {
    const double eta0 = 1.0;
    // Step from the width of the admissible rho window at this scale.
    const double slo = std::exp2(static_cast<double>(-l - 1));
    const double shi = std::exp2(static_cast<double>(-l + 1));
    const double window = std::abs(P.eval_q(shi, 1) - P.eval_q(slo, 1));
    const double h = window / step_divisor / (1.0 + std::abs(rho));

    auto psi = [&](double xi, double eta) { return stationary_phase_value(xi, eta, l, P); };
    auto d_xi = [&](auto&& f, double xi, double eta) {
        return (-f(xi + 2 * h, eta) + 8 * f(xi + h, eta) - 8 * f(xi - h, eta) + f(xi - 2 * h, eta)) / (12 * h);
    };
    auto d_eta = [&](auto&& f, double xi, double eta) {
        return (-f(xi, eta + 2 * h) + 8 * f(xi, eta + h) - 8 * f(xi, eta - h) + f(xi, eta - 2 * h)) / (12 * h);
    };
    auto inner = [&](double xi, double eta) { return d_xi(psi, xi, eta) - d_eta(psi, xi, eta); };
    auto mid = [&](double xi, double eta) { return d_eta(inner, xi, eta); };
    const double third = d_xi(mid, rho, eta0);

    // Locate s to supply the |P''|^3 bridge factor.
    const double u_c = detail::critical_point_rescaled(rho, eta0, l, P);
    const double s = std::exp2(static_cast<double>(-l)) * u_c;
    const double p2 = P.eval(s, 2);
    return std::abs(third) * eta0 * eta0 * std::abs(p2 * p2 * p2);
}

// Dense multiplier grid over integer frequency pairs; entry (xi, eta) holds
// m_l(2 pi xi, 2 pi eta) with the series convention of the trilinear form.
class MultiplierSource {
public:
    virtual ~MultiplierSource() = default;
    virtual complexd at(int xi, int eta) const = 0;
};

class MultiplierTable : public MultiplierSource {
public:
    MultiplierTable() = default;

    static MultiplierTable build(const Polynomial& P, int l, int cutoff, double abs_tol = 1e-11,
                                 int threads = 1) {
        MultiplierTable t;
        t.P_ = P;
        t.l_ = l;
        t.cutoff_ = cutoff;
        const std::size_t n = 2 * static_cast<std::size_t>(cutoff) + 1;
        t.entries_.assign(n * n, complexd(0.0, 0.0));
        // Conjugate symmetry m(-xi,-eta) = conj m(xi,eta) halves the work;
        // the mirrored values are bit-exact because the quadrature of the
        // conjugate integrand conjugates every partial sum.
        parallel_for(n, threads, [&](std::size_t lo, std::size_t hi) {
            for (std::size_t row = lo; row < hi; ++row) {
                const int xi = static_cast<int>(row) - cutoff;
                for (int eta = -cutoff; eta <= cutoff; ++eta) {
                    if (xi < 0 || (xi == 0 && eta < 0)) continue;
                    const QuadResult r = multiplier_quadrature(two_pi * xi, two_pi * eta, l, P, abs_tol);
                    t.entry(xi, eta) = r.value;
                }
            }
        });
        for (int xi = -cutoff; xi <= cutoff; ++xi)
            for (int eta = -cutoff; eta <= cutoff; ++eta)
                if (xi < 0 || (xi == 0 && eta < 0)) t.entry(xi, eta) = std::conj(t.entry(-xi, -eta));
        return t;
    }

    complexd at(int xi, int eta) const override {
        if (std::abs(xi) > cutoff_ || std::abs(eta) > cutoff_)
            throw std::out_of_range("multiplier table: coverage gap at requested frequency pair");
        return entries_[index(xi, eta)];
    }

    int cutoff() const { return cutoff_; }
    int scale() const { return l_; }
    const Polynomial& polynomial() const { return P_; }

    void save(const std::string& path) const {
        std::ofstream out(path, std::ios::binary);
        if (!out) throw std::runtime_error("multiplier table: cannot open " + path);
        out.write("PPMTBL01", 8);
        const std::int64_t l = l_, k = cutoff_;
        const std::uint64_t nterms = P_.terms().size();
        out.write(reinterpret_cast<const char*>(&l), 8);
        out.write(reinterpret_cast<const char*>(&k), 8);
        out.write(reinterpret_cast<const char*>(&nterms), 8);
        for (const auto& term : P_.terms()) {
            const double c = term.coeff;
            const std::int64_t e = term.exponent;
            out.write(reinterpret_cast<const char*>(&c), 8);
            out.write(reinterpret_cast<const char*>(&e), 8);
        }
        for (const auto& z : entries_) {
            const double re = z.real(), im = z.imag();
            out.write(reinterpret_cast<const char*>(&re), 8);
            out.write(reinterpret_cast<const char*>(&im), 8);
        }
        if (!out) throw std::runtime_error("multiplier table: write failed for " + path);
    }

    static MultiplierTable load(const std::string& path) {
        std::ifstream in(path, std::ios::binary);
        if (!in) throw std::runtime_error("multiplier table: cannot open " + path);
        char magic[8];
        in.read(magic, 8);
        if (!in || std::string(magic, 8) != "PPMTBL01")
            throw std::runtime_error("multiplier table: bad magic in " + path);
        std::int64_t l = 0, k = 0;
        std::uint64_t nterms = 0;
        in.read(reinterpret_cast<char*>(&l), 8);
        in.read(reinterpret_cast<char*>(&k), 8);
        in.read(reinterpret_cast<char*>(&nterms), 8);
        if (!in || k < 0 || k > (1 << 20) || nterms == 0 || nterms > 64)
            throw std::runtime_error("multiplier table: bad header in " + path);
        std::vector<PolyTerm> terms(nterms);
        for (auto& term : terms) {
            std::int64_t e = 0;
            in.read(reinterpret_cast<char*>(&term.coeff), 8);
            in.read(reinterpret_cast<char*>(&e), 8);
            term.exponent = static_cast<int>(e);
        }
        MultiplierTable t;
        t.P_ = Polynomial(std::move(terms));
        t.l_ = static_cast<int>(l);
        t.cutoff_ = static_cast<int>(k);
        const std::size_t n = 2 * static_cast<std::size_t>(t.cutoff_) + 1;
        t.entries_.resize(n * n);
        for (auto& z : t.entries_) {
            double re = 0.0, im = 0.0;
            in.read(reinterpret_cast<char*>(&re), 8);
            in.read(reinterpret_cast<char*>(&im), 8);
            z = complexd(re, im);
        }
        if (!in) throw std::runtime_error("multiplier table: truncated file " + path);
        return t;
    }

private:
    std::size_t index(int xi, int eta) const {
        const std::size_t n = 2 * static_cast<std::size_t>(cutoff_) + 1;
        return static_cast<std::size_t>(xi + cutoff_) * n + static_cast<std::size_t>(eta + cutoff_);
    }
    complexd& entry(int xi, int eta) { return entries_[index(xi, eta)]; }

    Polynomial P_{{{1.0, 1}, {1.0, 2}}};
    int l_ = 1;
    int cutoff_ = 0;
    std::vector<complexd> entries_;
};

// Quadrature-backed source for sparse frequency sets where a dense table
// would be wasteful.
class MultiplierOnTheFly : public MultiplierSource {
public:
    MultiplierOnTheFly(const Polynomial& P, int l, double abs_tol = 1e-11) : P_(P), l_(l), tol_(abs_tol) {}

    complexd at(int xi, int eta) const override {
        return multiplier_quadrature(two_pi * xi, two_pi * eta, l_, P_, tol_).value;
    }

private:
    Polynomial P_;
    int l_;
    double tol_;
};

// CSV profile of |m_l| along the ray xi = rho * eta.
inline void export_multiplier_ray(const Polynomial& P, int l, double rho, double eta_lo, double eta_hi,
                                  int samples, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("multiplier ray: cannot open " + path);
    out << "eta,re,im,abs,err\n";
    char line[160];
    for (int i = 0; i < samples; ++i) {
        const double frac = samples == 1 ? 0.0 : static_cast<double>(i) / (samples - 1);
        const double eta = eta_lo * std::pow(eta_hi / eta_lo, frac);
        const QuadResult r = multiplier_quadrature(rho * eta, eta, l, P);
        std::snprintf(line, sizeof line, "%.17g,%.17g,%.17g,%.17g,%.3g\n", eta, r.value.real(), r.value.imag(),
                      std::abs(r.value), r.error);
        out << line;
    }
}

}  // namespace polypat
