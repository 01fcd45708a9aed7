// Exact rational arithmetic for the pattern-certification module. Triadic
// construction endpoints (1/3^d) are not representable in binary floating
// point, so membership certificates are checked over int64 rationals with
// __int128 intermediates and explicit overflow guards.
#pragma once

#include <cmath>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>

namespace polypat {

struct RationalOverflow : std::overflow_error {
    RationalOverflow() : std::overflow_error("rational arithmetic: value exceeds 64-bit range") {}
};

class Rational {
public:
    Rational() = default;
    Rational(std::int64_t n) : num_(n), den_(1) {}  // NOLINT: implicit by design
    Rational(std::int64_t n, std::int64_t d) : num_(n), den_(d) { normalize(); }

    static Rational from_int128(__int128 n, __int128 d) {
        if (d == 0) throw std::invalid_argument("rational: zero denominator");
        if (d < 0) {
            n = -n;
            d = -d;
        }
        const __int128 g = gcd128(n < 0 ? -n : n, d);
        n /= g;
        d /= g;
        if (n > INT64_MAX || n < INT64_MIN || d > INT64_MAX) throw RationalOverflow();
        Rational r;
        r.num_ = static_cast<std::int64_t>(n);
        r.den_ = static_cast<std::int64_t>(d);
        return r;
    }

    // Exact conversion: every finite double is a dyadic rational. Throws
    // when the reduced dyadic denominator exceeds 2^40 (coefficients that
    // are not short dyadics would overflow downstream products anyway).
    static Rational from_double_exact(double x) {
        if (x == 0.0) return Rational(0);
        int e = 0;
        const double m = std::frexp(x, &e);  // x = m 2^e, |m| in [0.5,1)
        auto mant = static_cast<std::int64_t>(m * 9007199254740992.0);  // m 2^53
        int shift = e - 53;
        while (mant % 2 == 0) {
            mant /= 2;
            ++shift;
        }
        if (shift >= 0) {
            if (shift > 20) throw RationalOverflow();
            return Rational(mant << shift);
        }
        if (shift < -40) throw RationalOverflow();
        return Rational(mant, std::int64_t{1} << (-shift));
    }

    std::int64_t num() const { return num_; }
    std::int64_t den() const { return den_; }
    double to_double() const { return static_cast<double>(num_) / static_cast<double>(den_); }

    // Decimal form for integers, num/den otherwise.
    std::string to_string() const {
        if (den_ == 1) return std::to_string(num_);
        return std::to_string(num_) + "/" + std::to_string(den_);
    }

    friend Rational operator+(const Rational& a, const Rational& b) {
        return from_int128(static_cast<__int128>(a.num_) * b.den_ + static_cast<__int128>(b.num_) * a.den_,
                           static_cast<__int128>(a.den_) * b.den_);
    }
    friend Rational operator-(const Rational& a, const Rational& b) {
        return from_int128(static_cast<__int128>(a.num_) * b.den_ - static_cast<__int128>(b.num_) * a.den_,
                           static_cast<__int128>(a.den_) * b.den_);
    }
    friend Rational operator*(const Rational& a, const Rational& b) {
        return from_int128(static_cast<__int128>(a.num_) * b.num_, static_cast<__int128>(a.den_) * b.den_);
    }
    Rational operator-() const {
        Rational r = *this;
        r.num_ = -r.num_;
        return r;
    }

    friend bool operator==(const Rational& a, const Rational& b) { return a.num_ == b.num_ && a.den_ == b.den_; }
    friend bool operator!=(const Rational& a, const Rational& b) { return !(a == b); }
    friend bool operator<(const Rational& a, const Rational& b) {
        return static_cast<__int128>(a.num_) * b.den_ < static_cast<__int128>(b.num_) * a.den_;
    }
    friend bool operator<=(const Rational& a, const Rational& b) { return !(b < a); }
    friend bool operator>(const Rational& a, const Rational& b) { return b < a; }
    friend bool operator>=(const Rational& a, const Rational& b) { return !(a < b); }

private:
    static __int128 gcd128(__int128 a, __int128 b) {
        while (b != 0) {
            const __int128 t = a % b;
            a = b;
            b = t;
        }
        return a == 0 ? 1 : a;
    }

    void normalize() {
        if (den_ == 0) throw std::invalid_argument("rational: zero denominator");
        if (den_ < 0) {
            num_ = -num_;
            den_ = -den_;
        }
        const std::int64_t g = std::gcd(num_ < 0 ? -num_ : num_, den_);
        if (g > 1) {
            num_ /= g;
            den_ /= g;
        }
    }

    std::int64_t num_ = 0;
    std::int64_t den_ = 1;
};

inline Rational rat_min(const Rational& a, const Rational& b) { return a < b ? a : b; }
inline Rational rat_max(const Rational& a, const Rational& b) { return a < b ? b : a; }

// Closed interval with rational endpoints.
struct RatInterval {
    Rational lo, hi;

    bool empty() const { return hi < lo; }
    Rational width() const { return hi - lo; }
    Rational mid() const { return (lo + hi) * Rational(1, 2); }
    bool contains(const Rational& x) const { return lo <= x && x <= hi; }
    bool subset_of(const RatInterval& o) const { return o.lo <= lo && hi <= o.hi; }
    bool intersects(const RatInterval& o) const { return !(hi < o.lo || o.hi < lo); }

    friend RatInterval operator+(const RatInterval& a, const RatInterval& b) {
        return {a.lo + b.lo, a.hi + b.hi};
    }
    // Hull of {a - b}: the set difference of two intervals.
    friend RatInterval operator-(const RatInterval& a, const RatInterval& b) {
        return {a.lo - b.hi, a.hi - b.lo};
    }

    RatInterval intersect(const RatInterval& o) const { return {rat_max(lo, o.lo), rat_min(hi, o.hi)}; }

    std::string to_string() const { return "[" + lo.to_string() + ", " + hi.to_string() + "]"; }
};

}  // namespace polypat
