// The two bump profiles everything else is built from, plus the smooth
// cutoff for Littlewood-Paley bands.
//
//   tau0 : smooth, >= 0, supported on [1,2], integral 1.
//   theta: smooth, >= 0, even, supported on [-2,2], flat on [-1,1],
//          monotone on [1,2], integral 1.
//
// Both are exp(-1/x)-type profiles; theta's shoulder uses the smoothstep
// s(u) = B(u)/(B(u)+B(1-u)) which satisfies s(u)+s(1-u)=1, so theta's mass
// is exactly 3 * (1/3) = 1 analytically.
#pragma once

#include <cmath>
#include <stdexcept>

#include "polypat/quadrature.hpp"

namespace polypat {

namespace detail {

inline double bump_b(double u) { return u > 0.0 ? std::exp(-1.0 / u) : 0.0; }

}  // namespace detail

// Smooth monotone step: 0 at u<=0, 1 at u>=1.
inline double smoothstep(double u) {
    if (u <= 0.0) return 0.0;
    if (u >= 1.0) return 1.0;
    const double a = detail::bump_b(u);
    const double b = detail::bump_b(1.0 - u);
    return a / (a + b);
}

inline double tau0_unnormalized(double t) {
    if (t <= 1.0 || t >= 2.0) return 0.0;
    return std::exp(-1.0 / ((t - 1.0) * (2.0 - t)));
}

// integral of the unnormalized profile over [1,2]; computed once.
inline double tau0_mass_raw() {
    static const double value =
        integrate_real([](double t) { return tau0_unnormalized(t); }, 1.0, 2.0, 1e-15);
    return value;
}

inline double tau0(double t) { return tau0_unnormalized(t) / tau0_mass_raw(); }

// tau_l(t) = 2^l tau0(2^l t), supported on [2^-l, 2^-l+1], integral 1.
inline double tau_l(double t, int l) {
    const double scale = std::ldexp(1.0, l);
    return scale * tau0(scale * t);
}

inline double theta(double x) {
    const double a = std::abs(x);
    if (a >= 2.0) return 0.0;
    if (a <= 1.0) return 1.0 / 3.0;
    return smoothstep(2.0 - a) / 3.0;
}

// theta_l(x) = 2^l theta(2^l x); theta_eps(x) = eps^-1 theta(x/eps).
inline double theta_scaled(double x, double eps) { return theta(x / eps) / eps; }

// Littlewood-Paley cutoff: chi = 1 on [0,2], 0 on [3,inf), smooth between.
// psi0(xi) = chi(|xi|) - chi(2|xi|) is supported on +-[1,3] and the dilates
// psi_k = psi0(./2^k) telescope to 1 away from 0.
inline double lp_chi(double u) {
    u = std::abs(u);
    if (u <= 2.0) return 1.0;
    if (u >= 3.0) return 0.0;
    return 1.0 - smoothstep(u - 2.0);
}

inline double lp_psi0(double xi) { return lp_chi(xi) - lp_chi(2.0 * xi); }

inline double lp_psi(double xi, int k) { return lp_psi0(xi / std::ldexp(1.0, k)); }

// The k = 0 projection multiplier: sum_{j<=0} psi_j + delta_0, which
// telescopes to chi(|xi|).
inline double lp_p0_multiplier(double xi) { return lp_chi(xi); }

enum class BumpKind { tau0, theta };

// Value-type handle for the two named profiles (mollify and friends take
// the bump as data rather than baking one in).
struct BumpFunction {
    BumpKind kind = BumpKind::theta;

    double operator()(double x) const { return kind == BumpKind::tau0 ? tau0(x) : theta(x); }
    double support_lo() const { return kind == BumpKind::tau0 ? 1.0 : -2.0; }
    double support_hi() const { return 2.0; }

    static BumpFunction make_tau0() { return BumpFunction{BumpKind::tau0}; }
    static BumpFunction make_theta() { return BumpFunction{BumpKind::theta}; }
};

}  // namespace polypat
