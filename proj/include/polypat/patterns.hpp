// Certification of configurations (x, x+t, x+P(t)) inside finite Cantor
// approximations by exact interval branch-and-bound, plus the mollified
// pattern-mass functional <nu, 1>.
//
// A certificate is a box (x_box, t_box) with t_box inside the dyadic
// window [2^-l0, 2^-l0+1] such that x_box, the sum x_box + t_box and the
// hull of {x + P(t)} each land inside a single interval of the depth-d
// approximation E_d. All certificate arithmetic is exact rational.
#pragma once

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "polypat/bump.hpp"
#include "polypat/grid_density.hpp"
#include "polypat/measures.hpp"
#include "polypat/polynomial.hpp"
#include "polypat/quadrature.hpp"
#include "polypat/rational.hpp"

namespace polypat {

struct IntervalSet {
    int depth = 0;
    std::vector<RatInterval> intervals;  // sorted, pairwise disjoint, equal width

    static IntervalSet from_cantor(const CantorSpec& spec) {
        const CantorIntervals iv = cantor_intervals(spec);
        IntervalSet out;
        out.depth = spec.depth;
        out.intervals.reserve(iv.count());
        for (std::int64_t s : iv.starts)
            out.intervals.push_back({Rational(s, iv.denom), Rational(s + 1, iv.denom)});
        return out;
    }

    bool contains_point(const Rational& x) const {
        auto it = std::upper_bound(intervals.begin(), intervals.end(), x,
                                   [](const Rational& v, const RatInterval& iv) { return v < iv.lo; });
        if (it == intervals.begin()) return false;
        --it;
        return it->contains(x);
    }
};

namespace detail {

// Rational Horner evaluation of P; coefficients converted exactly from the
// double representation.
struct RationalPolynomial {
    std::vector<std::pair<Rational, int>> terms;

    explicit RationalPolynomial(const Polynomial& P) {
        for (const auto& t : P.terms()) terms.emplace_back(Rational::from_double_exact(t.coeff), t.exponent);
    }

    Rational eval(const Rational& t) const {
        Rational acc(0);
        for (const auto& [c, e] : terms) {
            Rational p(1);
            for (int i = 0; i < e; ++i) p = p * t;
            acc = acc + c * p;
        }
        return acc;
    }

    // P'(box) as an interval (box assumed nonnegative, so monomial powers
    // are monotone and the per-term hulls are exact).
    RatInterval derivative_hull(const RatInterval& box) const {
        RatInterval acc{Rational(0), Rational(0)};
        for (const auto& [c, e] : terms) {
            Rational plo(1), phi(1);
            for (int i = 0; i < e - 1; ++i) {
                plo = plo * box.lo;
                phi = phi * box.hi;
            }
            const Rational a = c * Rational(e) * plo;
            const Rational b = c * Rational(e) * phi;
            acc = {acc.lo + rat_min(a, b), acc.hi + rat_max(a, b)};
        }
        return acc;
    }

    // Tight hull of P over a nonnegative box: monotone pieces give exact
    // endpoint images; where the derivative sign is ambiguous the box is
    // split a few times before falling back to the conservative hull.
    RatInterval image_hull(const RatInterval& box, int depth = 4) const {
        const RatInterval dp = derivative_hull(box);
        if (Rational(0) <= dp.lo || dp.hi <= Rational(0)) {
            const Rational a = eval(box.lo);
            const Rational b = eval(box.hi);
            return {rat_min(a, b), rat_max(a, b)};
        }
        if (depth > 0) {
            const Rational m = box.mid();
            const RatInterval left = image_hull({box.lo, m}, depth - 1);
            const RatInterval right = image_hull({m, box.hi}, depth - 1);
            return {rat_min(left.lo, right.lo), rat_max(left.hi, right.hi)};
        }
        // Conservative interval Horner.
        RatInterval acc{Rational(0), Rational(0)};
        for (const auto& [c, e] : terms) {
            Rational plo(1), phi(1);
            for (int i = 0; i < e; ++i) {
                plo = plo * box.lo;
                phi = phi * box.hi;
            }
            const Rational a = c * plo;
            const Rational b = c * phi;
            acc = {acc.lo + rat_min(a, b), acc.hi + rat_max(a, b)};
        }
        return acc;
    }
};

}  // namespace detail

struct ConfigurationTriple {
    RatInterval x_box, t_box;
    bool certified = false;
    Rational witness_x, witness_t, witness_pt;  // box centers, P exact
    std::size_t idx_i = 0, idx_j = 0, idx_k = 0;  // E-interval indices of the three coordinates
};

struct PatternSearchResult {
    std::vector<ConfigurationTriple> triples;
    bool budget_exhausted = false;  // inconclusive marker
    long nodes_expanded = 0;
};

namespace detail {

enum class SearchStatus { certified, failed, budget };

struct TripleSearch {
    const RationalPolynomial& P;
    const RatInterval& I;
    const RatInterval& J;
    const RatInterval& K;
    long& budget;
    int max_depth;
    RatInterval found_x{}, found_t{};

    SearchStatus run(const RatInterval& x_box, const RatInterval& t_box, int depth) {
        if (budget <= 0) return SearchStatus::budget;
        --budget;
        const RatInterval sum = x_box + t_box;
        const RatInterval image = x_box + P.image_hull(t_box);
        if (!sum.intersects(J) || !image.intersects(K)) return SearchStatus::failed;
        if (sum.subset_of(J) && image.subset_of(K)) {
            found_x = x_box;
            found_t = t_box;
            return SearchStatus::certified;
        }
        if (depth >= max_depth) return SearchStatus::failed;
        const bool split_x = depth % 2 == 0;
        const RatInterval& target = split_x ? x_box : t_box;
        const Rational m = target.mid();
        for (int half = 0; half < 2; ++half) {
            const RatInterval part = half == 0 ? RatInterval{target.lo, m} : RatInterval{m, target.hi};
            const SearchStatus st =
                split_x ? run(part, t_box, depth + 1) : run(x_box, part, depth + 1);
            if (st != SearchStatus::failed) return st;
        }
        return SearchStatus::failed;
    }
};

}  // namespace detail

// Branch-and-bound over triples of E-intervals. For every (I, J, K) passing
// the interval feasibility screen, the (x, t) domain I x [2^-l0, 2^-l0+1]
// is bisected (x and t alternating, relative dyadic grid) until the three
// containments certify or the depth/budget runs out. Certificates shrink
// monotonically, so a triple is certified iff one of its depth-max_depth
// sub-boxes certifies; the exhaustive-enumeration oracle in the tests
// relies on exactly this.
inline PatternSearchResult find_configurations(const IntervalSet& E, const Polynomial& P, int l0,
                                               long budget = 1'000'000, int max_depth = 12) {
    if (l0 < 1) throw std::invalid_argument("pattern search: l0 must be positive");
    if (E.intervals.empty()) return {};
    // Resolution precondition: interval lengths <= 2^-l0-2 so the t window
    // is resolvable. A single covering interval is the degenerate case
    // where certification is scale-free, so it is exempt.
    const Rational width = E.intervals.front().width();
    const Rational resolvable = Rational(1, std::int64_t{1} << std::min(l0 + 2, 60));
    if (E.intervals.size() > 1 && resolvable < width)
        throw std::invalid_argument("pattern search: E intervals wider than 2^-l0-2 cannot resolve t");

    const RatInterval t_window{Rational(1, std::int64_t{1} << l0), Rational(1, std::int64_t{1} << (l0 - 1))};
    const detail::RationalPolynomial rp(P);
    const RatInterval p_window = rp.image_hull(t_window);

    PatternSearchResult out;
    long remaining = budget;
    for (std::size_t i = 0; i < E.intervals.size() && remaining > 0; ++i) {
        const RatInterval& I = E.intervals[i];
        const RatInterval sum_range = I + t_window;
        const RatInterval image_range = I + p_window;
        for (std::size_t j = 0; j < E.intervals.size(); ++j) {
            const RatInterval& J = E.intervals[j];
            if (J.hi < sum_range.lo) continue;
            if (sum_range.hi < J.lo) break;  // intervals sorted
            for (std::size_t k = 0; k < E.intervals.size(); ++k) {
                const RatInterval& K = E.intervals[k];
                if (K.hi < image_range.lo) continue;
                if (image_range.hi < K.lo) break;
                detail::TripleSearch search{rp, I, J, K, remaining, max_depth, {}, {}};
                const detail::SearchStatus st = search.run(I, t_window, 0);
                if (st == detail::SearchStatus::budget) {
                    out.budget_exhausted = true;
                    out.nodes_expanded = budget - remaining;
                    return out;
                }
                if (st == detail::SearchStatus::certified) {
                    ConfigurationTriple trip;
                    trip.x_box = search.found_x;
                    trip.t_box = search.found_t;
                    trip.certified = true;
                    trip.witness_x = trip.x_box.mid();
                    trip.witness_t = trip.t_box.mid();
                    trip.witness_pt = trip.witness_x + rp.eval(trip.witness_t);
                    trip.idx_i = i;
                    trip.idx_j = j;
                    trip.idx_k = k;
                    out.triples.push_back(trip);
                }
            }
        }
    }
    out.nodes_expanded = budget - remaining;
    std::sort(out.triples.begin(), out.triples.end(), [](const ConfigurationTriple& a, const ConfigurationTriple& b) {
        if (a.x_box.lo != b.x_box.lo) return a.x_box.lo < b.x_box.lo;
        if (a.t_box.lo != b.t_box.lo) return a.t_box.lo < b.t_box.lo;
        return a.idx_k < b.idx_k;
    });
    return out;
}

// Structured text export: exact rationals where representable.
inline void export_triples(const PatternSearchResult& result, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("pattern export: cannot open " + path);
    out << "# x_box t_box certified witness_x witness_t witness_pt\n";
    for (const auto& t : result.triples) {
        out << t.x_box.to_string() << " " << t.t_box.to_string() << " " << (t.certified ? 1 : 0) << " "
            << t.witness_x.to_string() << " " << t.witness_t.to_string() << " " << t.witness_pt.to_string()
            << "\n";
    }
    if (result.budget_exhausted) out << "# inconclusive: node budget exhausted\n";
}

struct NuMassResult {
    std::vector<double> values;           // one per epsilon
    std::vector<double> cauchy;           // |v_{i+1} - v_i|
    double limit_estimate = 0.0;          // first-order Richardson on the last two
};

// <nu, 1> at finite mollification:
//   v(eps) = integral mu_eps(x) mu_eps(x+t) mu_eps(x+P(t)) tau_l0(t) dt dx.
// The t-integration is breakpoint-exact on the piecewise-constant data
// (bisection root-finding, Gauss segments), assembled independently of the
// trilinear module so the two routes cross-validate.
inline NuMassResult nu_mass(const GridDensity& mu, const Polynomial& P, int l0,
                            const std::vector<double>& eps_sequence) {
    if (eps_sequence.empty()) throw std::invalid_argument("nu mass: empty epsilon sequence");
    for (std::size_t i = 0; i + 1 < eps_sequence.size(); ++i)
        if (eps_sequence[i + 1] >= eps_sequence[i])
            throw std::invalid_argument("nu mass: epsilon sequence must be strictly decreasing");
    for (double e : eps_sequence)
        if (e < mu.cell_width()) throw std::invalid_argument("nu mass: epsilon below the grid cell width");

    const double w_lo = std::exp2(static_cast<double>(-l0));
    const double w_hi = 2.0 * w_lo;

    NuMassResult out;
    for (double eps : eps_sequence) {
        const GridDensity f = mollify(mu, eps);
        const double dx = f.cell_width();
        const auto n = static_cast<std::int64_t>(f.cells());

        std::vector<double> knots = P.derivative_roots(w_lo, w_hi);
        knots.insert(knots.begin(), w_lo);
        knots.push_back(w_hi);
        std::sort(knots.begin(), knots.end());

        std::vector<double> contrib(static_cast<std::size_t>(n), 0.0);
        std::vector<double> breaks;
        for (std::int64_t i = 0; i < n; ++i) {
            const double x = (static_cast<double>(i) + 0.5) * dx;
            const double fx = f.values()[static_cast<std::size_t>(i)];
            if (fx == 0.0) continue;
            breaks.clear();
            breaks.push_back(w_lo);
            breaks.push_back(w_hi);
            for (std::int64_t m = (std::int64_t{1} << (f.level() - l0)); m <= (std::int64_t{2} << (f.level() - l0)); ++m)
                breaks.push_back((static_cast<double>(m) - 0.5) * dx);
            for (std::size_t p = 0; p + 1 < knots.size(); ++p) {
                const double va = P.eval(knots[p]), vb = P.eval(knots[p + 1]);
                const double vmin = std::min(va, vb), vmax = std::max(va, vb);
                const auto jlo = static_cast<std::int64_t>(std::ceil((x + vmin) / dx));
                const auto jhi = static_cast<std::int64_t>(std::floor((x + vmax) / dx));
                for (std::int64_t j = jlo; j <= jhi; ++j) {
                    const double c = static_cast<double>(j) * dx - x;
                    if (c <= vmin || c >= vmax) continue;
                    // Pure bisection (the trilinear route uses safeguarded
                    // Newton; the disagreement bounds the root error).
                    double lo = knots[p], hi = knots[p + 1];
                    double flo = P.eval(lo) - c;
                    for (int it = 0; it < 80; ++it) {
                        const double mid2 = 0.5 * (lo + hi);
                        const double fm = P.eval(mid2) - c;
                        if ((flo < 0.0) == (fm < 0.0)) {
                            lo = mid2;
                            flo = fm;
                        } else {
                            hi = mid2;
                        }
                    }
                    breaks.push_back(0.5 * (lo + hi));
                }
            }
            std::sort(breaks.begin(), breaks.end());
            double acc = 0.0;
            for (std::size_t sgm = 0; sgm + 1 < breaks.size(); ++sgm) {
                const double a = breaks[sgm], b = breaks[sgm + 1];
                if (b - a < 1e-18) continue;
                const double tm = 0.5 * (a + b);
                const double ft = f.value_at(x + tm);
                if (ft == 0.0) continue;
                const double gt = f.value_at(x + P.eval(tm));
                if (gt == 0.0) continue;
                acc += ft * gt * gl7_panel([&](double t) { return tau_l(t, l0); }, a, b);
            }
            contrib[static_cast<std::size_t>(i)] = fx * acc;
        }
        out.values.push_back(pairwise_sum(contrib) * dx);
    }
    for (std::size_t i = 0; i + 1 < out.values.size(); ++i)
        out.cauchy.push_back(std::abs(out.values[i + 1] - out.values[i]));
    const std::size_t n = out.values.size();
    out.limit_estimate = n >= 2 ? 2.0 * out.values[n - 1] - out.values[n - 2] : out.values.back();
    return out;
}

}  // namespace polypat
