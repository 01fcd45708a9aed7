// Truncated Fourier series c_k, -K <= k <= K, with the analysis convention
// c_k = integral of rho(x) e^{-2 pi i k x} dx over the circle.
#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "polypat/common.hpp"

namespace polypat {

class FourierSeries {
public:
    FourierSeries() : cutoff_(0), coeffs_(1, complexd(0.0, 0.0)) {}

    explicit FourierSeries(int cutoff)
        : cutoff_(cutoff), coeffs_(2 * static_cast<std::size_t>(cutoff) + 1, complexd(0.0, 0.0)) {
        if (cutoff < 0) throw std::invalid_argument("fourier series: negative cutoff");
    }

    int cutoff() const { return cutoff_; }

    const complexd& at(int k) const {
        check(k);
        return coeffs_[static_cast<std::size_t>(k + cutoff_)];
    }
    complexd& at(int k) {
        check(k);
        return coeffs_[static_cast<std::size_t>(k + cutoff_)];
    }

    // Coefficient lookup that treats out-of-range frequencies as zero.
    complexd at_or_zero(int k) const {
        if (k < -cutoff_ || k > cutoff_) return complexd(0.0, 0.0);
        return coeffs_[static_cast<std::size_t>(k + cutoff_)];
    }

    const std::vector<complexd>& coeffs() const { return coeffs_; }

    double hermitian_defect() const {
        double worst = 0.0;
        for (int k = 1; k <= cutoff_; ++k) worst = std::max(worst, std::abs(at(-k) - std::conj(at(k))));
        worst = std::max(worst, std::abs(at(0).imag()));
        return worst;
    }

    FourierSeries& operator+=(const FourierSeries& o) {
        if (o.cutoff_ != cutoff_) throw std::invalid_argument("fourier series: cutoff mismatch");
        for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] += o.coeffs_[i];
        return *this;
    }

    FourierSeries& operator*=(double s) {
        for (auto& c : coeffs_) c *= s;
        return *this;
    }

    // Copy restricted to |k| <= new_cutoff.
    FourierSeries truncated(int new_cutoff) const {
        FourierSeries out(std::min(new_cutoff, cutoff_));
        for (int k = -out.cutoff(); k <= out.cutoff(); ++k) out.at(k) = at(k);
        return out;
    }

    // Binary layout: little-endian int64 cutoff, then 2K+1 (re,im) double
    // pairs in index order -K..K.
    void save(const std::string& path) const {
        std::ofstream out(path, std::ios::binary);
        if (!out) throw std::runtime_error("fourier series: cannot open " + path);
        const std::int64_t k = cutoff_;
        out.write(reinterpret_cast<const char*>(&k), 8);
        for (const auto& c : coeffs_) {
            const double re = c.real(), im = c.imag();
            out.write(reinterpret_cast<const char*>(&re), 8);
            out.write(reinterpret_cast<const char*>(&im), 8);
        }
        if (!out) throw std::runtime_error("fourier series: write failed for " + path);
    }

    static FourierSeries load(const std::string& path) {
        std::ifstream in(path, std::ios::binary);
        if (!in) throw std::runtime_error("fourier series: cannot open " + path);
        std::int64_t k = 0;
        in.read(reinterpret_cast<char*>(&k), 8);
        if (!in || k < 0 || k > (1 << 24)) throw std::runtime_error("fourier series: bad header in " + path);
        FourierSeries s(static_cast<int>(k));
        for (auto& c : s.coeffs_) {
            double re = 0.0, im = 0.0;
            in.read(reinterpret_cast<char*>(&re), 8);
            in.read(reinterpret_cast<char*>(&im), 8);
            c = complexd(re, im);
        }
        if (!in) throw std::runtime_error("fourier series: truncated file " + path);
        return s;
    }

private:
    void check(int k) const {
        if (k < -cutoff_ || k > cutoff_) throw std::out_of_range("fourier series: frequency outside cutoff");
    }

    int cutoff_;
    std::vector<complexd> coeffs_;
};

}  // namespace polypat
