// One-dimensional quadrature: fixed Gauss-Legendre / Gauss-Kronrod panels
// and an adaptive Gauss-Kronrod 7-15 driver for real and complex integrands.
// The adaptive driver allocates tolerance proportionally to panel width, so
// the accumulated error estimate is a bound for the requested tolerance.
#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <vector>

#include "polypat/common.hpp"

namespace polypat {

namespace detail {

// Kronrod-15 abscissae on [0,1]-half of [-1,1]; even indices are the
// Kronrod-only points, odd indices the embedded Gauss-7 points.
inline constexpr double kGK15Nodes[8] = {
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
};

inline constexpr double kGK15Weights[8] = {
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
};

inline constexpr double kG7Weights[4] = {
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
};

}  // namespace detail

struct QuadResult {
    complexd value{0.0, 0.0};
    double error = 0.0;
    bool converged = true;
    long evaluations = 0;
};

// Single Gauss-Kronrod 7-15 panel. Returns the K15 value; *error gets the
// |K15 - G7| discrepancy (the usual embedded estimate).
template <typename F>
complexd gk15_panel(F&& f, double a, double b, double* error) {
    const double c = 0.5 * (a + b);
    const double hw = 0.5 * (b - a);
    complexd kronrod(0.0, 0.0), gauss(0.0, 0.0);
    for (int i = 0; i < 8; ++i) {
        const double dx = hw * detail::kGK15Nodes[i];
        const complexd fv = (i == 7) ? complexd(f(c)) : complexd(f(c - dx)) + complexd(f(c + dx));
        kronrod += detail::kGK15Weights[i] * fv;
        if (i % 2 == 1) gauss += detail::kG7Weights[i / 2] * fv;
    }
    kronrod *= hw;
    gauss *= hw;
    if (error) *error = std::abs(kronrod - gauss);
    return kronrod;
}

// Fixed 7-point Gauss-Legendre on [a,b]; used for narrow smooth segments.
template <typename F>
double gl7_panel(F&& f, double a, double b) {
    const double c = 0.5 * (a + b);
    const double hw = 0.5 * (b - a);
    double acc = detail::kG7Weights[3] * f(c);
    for (int i = 0; i < 3; ++i) {
        const double dx = hw * detail::kGK15Nodes[2 * i + 1];
        acc += detail::kG7Weights[i] * (f(c - dx) + f(c + dx));
    }
    return acc * hw;
}

// Adaptive GK15 over [a,b]. `initial_width` caps the width of the seed
// panels (pass b-a for non-oscillatory integrands); refinement then splits
// any panel whose local estimate exceeds its proportional share of abs_tol.
template <typename F>
QuadResult integrate_adaptive(F&& f, double a, double b, double abs_tol, double initial_width,
                              long max_panels = 2'000'000) {
    QuadResult out;
    if (!(b > a)) return out;
    const double span = b - a;
    initial_width = std::clamp(initial_width, span * 0x1.0p-40, span);
    const long n0 = std::min<long>(max_panels, static_cast<long>(std::ceil(span / initial_width)));

    struct Panel {
        double a, b;
        complexd value;
        double error;
    };
    std::vector<Panel> work;
    work.reserve(static_cast<std::size_t>(n0) + 64);
    for (long i = 0; i < n0; ++i) {
        const double pa = a + span * static_cast<double>(i) / static_cast<double>(n0);
        const double pb = (i + 1 == n0) ? b : a + span * static_cast<double>(i + 1) / static_cast<double>(n0);
        double err = 0.0;
        const complexd v = gk15_panel(f, pa, pb, &err);
        out.evaluations += 15;
        work.push_back({pa, pb, v, err});
    }

    complexd accepted(0.0, 0.0);
    double accepted_err = 0.0;
    long panels_used = n0;
    // LIFO refinement keeps the traversal order deterministic.
    std::vector<Panel> stack(work.rbegin(), work.rend());
    while (!stack.empty()) {
        const Panel p = stack.back();
        stack.pop_back();
        const double share = abs_tol * (p.b - p.a) / span;
        const bool tiny = (p.b - p.a) <= span * 0x1.0p-48;
        if (p.error <= share || tiny || panels_used >= max_panels) {
            accepted += p.value;
            accepted_err += p.error;
            if (p.error > share && !tiny) out.converged = false;
            continue;
        }
        const double mid = 0.5 * (p.a + p.b);
        double e1 = 0.0, e2 = 0.0;
        const complexd v1 = gk15_panel(f, p.a, mid, &e1);
        const complexd v2 = gk15_panel(f, mid, p.b, &e2);
        out.evaluations += 30;
        panels_used += 1;
        stack.push_back({mid, p.b, v2, e2});
        stack.push_back({p.a, mid, v1, e1});
    }
    out.value = accepted;
    out.error = accepted_err;
    return out;
}

// Real-valued convenience wrapper.
template <typename F>
double integrate_real(F&& f, double a, double b, double abs_tol) {
    auto wrap = [&f](double t) { return complexd(f(t), 0.0); };
    return integrate_adaptive(wrap, a, b, abs_tol, b - a).value.real();
}

}  // namespace polypat
