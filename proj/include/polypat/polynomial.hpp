// Pattern-defining polynomials P(t) = sum a_i t^{e_i} without constant term.
// Keeps the exact term list, derivative evaluation, the split
// P = a_1 t + Q = a_1 t + a_2 t^{e_2} + R, and tight interval images via
// monotone decomposition of P'.
#pragma once

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <string>
#include <vector>

namespace polypat {

struct PolyTerm {
    double coeff = 0.0;
    int exponent = 0;
};

class Polynomial {
public:
    Polynomial() = default;

    explicit Polynomial(std::vector<PolyTerm> terms) : terms_(std::move(terms)) {
        if (terms_.empty()) throw std::invalid_argument("polynomial: no terms");
        int prev = 0;
        for (const auto& t : terms_) {
            if (t.exponent < 1) throw std::invalid_argument("polynomial: exponents must be positive (no constant term)");
            if (t.exponent <= prev) throw std::invalid_argument("polynomial: exponents must be strictly increasing");
            if (t.coeff == 0.0) throw std::invalid_argument("polynomial: zero coefficient");
            prev = t.exponent;
        }
    }

    const std::vector<PolyTerm>& terms() const { return terms_; }
    int degree() const { return terms_.back().exponent; }
    std::size_t term_count() const { return terms_.size(); }

    // Coefficient of the linear monomial (0 when absent).
    double linear_coeff() const {
        return terms_.front().exponent == 1 ? terms_.front().coeff : 0.0;
    }

    // The oscillatory machinery needs genuine curvature at small t.
    bool has_curvature() const { return degree() >= 2; }
    void require_curvature(const char* who) const {
        if (!has_curvature())
            throw std::invalid_argument(std::string(who) + ": polynomial must have a term of exponent >= 2");
    }

    // d^order/dt^order P at t (order >= 0).
    double eval(double t, int order = 0) const {
        double acc = 0.0;
        for (const auto& term : terms_) {
            if (term.exponent < order) continue;
            double c = term.coeff;
            for (int k = 0; k < order; ++k) c *= static_cast<double>(term.exponent - k);
            acc += c * ipow(t, term.exponent - order);
        }
        return acc;
    }

    // Q = P - a_1 t (drops the linear monomial if present).
    double eval_q(double t, int order = 0) const {
        double acc = eval(t, order);
        if (terms_.front().exponent == 1) {
            if (order == 0) acc -= terms_.front().coeff * t;
            if (order == 1) acc -= terms_.front().coeff;
        }
        return acc;
    }

    // First nonlinear term a_2 t^{e_2} (leading term of Q).
    bool has_nonlinear_term() const { return degree() >= 2; }
    PolyTerm leading_nonlinear() const {
        for (const auto& t : terms_)
            if (t.exponent >= 2) return t;
        throw std::invalid_argument("polynomial: no nonlinear term");
    }

    // R = Q - a_2 t^{e_2}.
    double eval_r(double t, int order = 0) const {
        double acc = eval_q(t, order);
        const auto lead = leading_nonlinear();
        double c = lead.coeff;
        for (int k = 0; k < order; ++k) c *= static_cast<double>(lead.exponent - k);
        if (lead.exponent >= order) acc -= c * ipow(t, lead.exponent - order);
        return acc;
    }

    // Roots of P' inside (a,b), by sign-change bracketing on a fine sample.
    // Even-order touches of P' do not break monotonicity, so sign changes
    // are all that matters for interval images.
    std::vector<double> derivative_roots(double a, double b) const {
        std::vector<double> roots;
        const int samples = 64 + 8 * degree();
        double prev_t = a;
        double prev_v = eval(a, 1);
        for (int i = 1; i <= samples; ++i) {
            const double t = a + (b - a) * static_cast<double>(i) / samples;
            const double v = eval(t, 1);
            if ((prev_v < 0.0 && v > 0.0) || (prev_v > 0.0 && v < 0.0)) {
                double lo = prev_t, hi = t, flo = prev_v;
                for (int it = 0; it < 80; ++it) {
                    const double mid = 0.5 * (lo + hi);
                    const double fm = eval(mid, 1);
                    if ((flo < 0.0) == (fm < 0.0)) {
                        lo = mid;
                        flo = fm;
                    } else {
                        hi = mid;
                    }
                }
                roots.push_back(0.5 * (lo + hi));
            } else if (v == 0.0 && i < samples) {
                roots.push_back(t);
            }
            prev_t = t;
            prev_v = v;
        }
        return roots;
    }

    // Tight hull of {P(t) : t in [a,b]}.
    void interval_image(double a, double b, double* lo, double* hi) const {
        std::vector<double> knots = derivative_roots(a, b);
        knots.push_back(a);
        knots.push_back(b);
        std::sort(knots.begin(), knots.end());
        double vlo = eval(a), vhi = vlo;
        for (double t : knots) {
            const double v = eval(t);
            vlo = std::min(vlo, v);
            vhi = std::max(vhi, v);
        }
        *lo = vlo;
        *hi = vhi;
    }

    // Canonical text form, e.g. "1*t^1 + 1*t^2".
    std::string to_string() const {
        std::string out;
        char buf[64];
        for (std::size_t i = 0; i < terms_.size(); ++i) {
            if (i) out += " + ";
            std::snprintf(buf, sizeof buf, "%.17g*t^%d", terms_[i].coeff, terms_[i].exponent);
            out += buf;
        }
        return out;
    }

    static Polynomial parse(const std::string& text);

private:
    static double ipow(double t, int n) {
        double acc = 1.0;
        for (int i = 0; i < n; ++i) acc *= t;
        return acc;
    }

    std::vector<PolyTerm> terms_;
};

// Accepts forms like "t + t^2", "2t", "3*t^1 + 1*t^2 + 1*t^5", "-0.5*t^3".
inline Polynomial Polynomial::parse(const std::string& text) {
    std::vector<PolyTerm> terms;
    std::size_t i = 0;
    const auto skip_ws = [&] {
        while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    };
    skip_ws();
    bool first = true;
    while (i < text.size()) {
        double sign = 1.0;
        if (text[i] == '+' || text[i] == '-') {
            sign = (text[i] == '-') ? -1.0 : 1.0;
            ++i;
            skip_ws();
        } else if (!first) {
            throw std::invalid_argument("polynomial parse: expected '+' or '-' between terms");
        }
        first = false;
        double coeff = 1.0;
        bool have_coeff = false;
        if (i < text.size() && (std::isdigit(static_cast<unsigned char>(text[i])) || text[i] == '.')) {
            std::size_t consumed = 0;
            coeff = std::stod(text.substr(i), &consumed);
            i += consumed;
            have_coeff = true;
            skip_ws();
            if (i < text.size() && text[i] == '*') {
                ++i;
                skip_ws();
            }
        }
        if (i >= text.size() || text[i] != 't') {
            throw std::invalid_argument(have_coeff ? "polynomial parse: constant terms are not allowed"
                                                   : "polynomial parse: expected 't'");
        }
        ++i;
        int exponent = 1;
        skip_ws();
        if (i < text.size() && text[i] == '^') {
            ++i;
            skip_ws();
            std::size_t consumed = 0;
            exponent = std::stoi(text.substr(i), &consumed);
            i += consumed;
        }
        terms.push_back({sign * coeff, exponent});
        skip_ws();
    }
    std::sort(terms.begin(), terms.end(), [](const PolyTerm& a, const PolyTerm& b) { return a.exponent < b.exponent; });
    return Polynomial(std::move(terms));
}

}  // namespace polypat
