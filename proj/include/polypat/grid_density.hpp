// Piecewise-constant densities on the dyadic partition of the unit circle.
// Cell j of a level-J density covers [j 2^-J, (j+1) 2^-J); values are cell
// averages, so the total mass is the plain mean.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "polypat/common.hpp"

namespace polypat {

class GridDensity {
public:
    GridDensity() = default;

    GridDensity(int level, std::vector<double> values) : level_(level), values_(std::move(values)) {
        if (level < 0 || level > 30) throw std::invalid_argument("grid density: level out of range");
        if (values_.size() != (std::size_t{1} << level))
            throw std::invalid_argument("grid density: value count must be 2^level");
    }

    static GridDensity uniform(int level) {
        return GridDensity(level, std::vector<double>(std::size_t{1} << level, 1.0));
    }

    int level() const { return level_; }
    std::size_t cells() const { return values_.size(); }
    double cell_width() const { return 1.0 / static_cast<double>(cells()); }
    const std::vector<double>& values() const { return values_; }
    std::vector<double>& values() { return values_; }

    double mass() const {
        double acc = pairwise_sum(values_);
        return acc / static_cast<double>(cells());
    }

    double l2_norm_sq() const {
        std::vector<double> sq(values_.size());
        for (std::size_t i = 0; i < values_.size(); ++i) sq[i] = values_[i] * values_[i];
        return pairwise_sum(sq) / static_cast<double>(cells());
    }

    double sup() const { return *std::max_element(values_.begin(), values_.end()); }
    double min_value() const { return *std::min_element(values_.begin(), values_.end()); }

    double cell_center(std::size_t j) const { return (static_cast<double>(j) + 0.5) * cell_width(); }

    // Periodic piecewise-constant lookup.
    double value_at(double x) const {
        double frac = x - std::floor(x);
        if (frac >= 1.0) frac = 0.0;
        auto j = static_cast<std::size_t>(frac * static_cast<double>(cells()));
        if (j >= cells()) j = cells() - 1;
        return values_[j];
    }

    void check_nonnegative(const char* who, double tol = 0.0) const {
        for (double v : values_)
            if (v < -tol) throw std::invalid_argument(std::string(who) + ": density has negative values");
    }

    // Binary layout per the external interface: 8-byte little-endian level,
    // then 2^level IEEE doubles.
    void save(const std::string& path) const {
        std::ofstream out(path, std::ios::binary);
        if (!out) throw std::runtime_error("grid density: cannot open " + path);
        const std::uint64_t lvl = static_cast<std::uint64_t>(level_);
        out.write(reinterpret_cast<const char*>(&lvl), 8);
        out.write(reinterpret_cast<const char*>(values_.data()),
                  static_cast<std::streamsize>(values_.size() * sizeof(double)));
        if (!out) throw std::runtime_error("grid density: write failed for " + path);
    }

    static GridDensity load(const std::string& path) {
        std::ifstream in(path, std::ios::binary);
        if (!in) throw std::runtime_error("grid density: cannot open " + path);
        std::uint64_t lvl = 0;
        in.read(reinterpret_cast<char*>(&lvl), 8);
        if (!in || lvl > 30) throw std::runtime_error("grid density: bad header in " + path);
        std::vector<double> vals(std::size_t{1} << lvl);
        in.read(reinterpret_cast<char*>(vals.data()), static_cast<std::streamsize>(vals.size() * sizeof(double)));
        if (!in) throw std::runtime_error("grid density: truncated file " + path);
        return GridDensity(static_cast<int>(lvl), std::move(vals));
    }

private:
    int level_ = 0;
    std::vector<double> values_{1.0};
};

}  // namespace polypat
