// Flat key-value experiment configuration: parser with line-anchored
// errors, full precondition validation at parse time, and a canonical
// serializer (serialize(parse(text)) is idempotent).
#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "polypat/measures.hpp"
#include "polypat/polynomial.hpp"
#include "polypat/trilinear.hpp"

namespace polypat {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ExperimentConfig {
    CantorSpec measure;
    Polynomial polynomial = Polynomial::parse("t + t^2");
    MeasureConditions conditions;
    int grid_level = 12;
    int cutoff = 512;  // series truncation K
    ScanParams scan;
    double s0 = 0.1;
    double fejer_A = 16.0;      // the "large absolute constant" A
    double dominance = 100.0;   // Gamma_0
    std::vector<double> epsilon_sequence = {std::exp2(-8.0), std::exp2(-9.0), std::exp2(-10.0)};
    int patterns_depth = -1;    // -1: measure.depth
    long patterns_budget = 1'000'000;
    int patterns_max_depth = 12;
    std::uint64_t seed = 0;

    void validate() const {
        measure.validate();
        conditions.validate();
        if (grid_level < 3 || grid_level > 24) throw ConfigError("grid_level out of range [3, 24]");
        if (cutoff < 1 || cutoff > (1 << (grid_level - 1)))
            throw ConfigError("cutoff must satisfy 1 <= cutoff <= 2^(grid_level-1)");
        if (!(scan.ratio > 1.0)) throw ConfigError("scan.ratio must exceed 1");
        if (scan.K_max < 1) throw ConfigError("scan.K_max must be positive");
        if (!(scan.c0 > 0.0) || !(scan.C0 > 0.0)) throw ConfigError("scan.c0 and scan.C0 must be positive");
        if (!(s0 > 0.0 && s0 < 1.0)) throw ConfigError("s0 must lie in (0,1)");
        if (!(fejer_A > 0.0)) throw ConfigError("A must be positive");
        if (!(dominance >= 2.0)) throw ConfigError("dominance must be >= 2");
        if (epsilon_sequence.empty()) throw ConfigError("epsilon sequence must be nonempty");
        for (std::size_t i = 0; i + 1 < epsilon_sequence.size(); ++i)
            if (epsilon_sequence[i + 1] >= epsilon_sequence[i])
                throw ConfigError("epsilon sequence must be strictly decreasing");
        if (epsilon_sequence.back() < std::exp2(static_cast<double>(-grid_level)))
            throw ConfigError("epsilon sequence goes below the grid cell width");
        if (patterns_budget < 1) throw ConfigError("patterns.budget must be positive");
        if (patterns_max_depth < 1 || patterns_max_depth > 40)
            throw ConfigError("patterns.max_depth out of range [1, 40]");
    }
};

namespace detail {

inline std::string fmt_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

// Accepts "2^-8" style tokens next to plain decimals.
inline double parse_eps_token(const std::string& tok) {
    if (tok.rfind("2^", 0) == 0) return std::exp2(std::stod(tok.substr(2)));
    return std::stod(tok);
}

}  // namespace detail

inline ExperimentConfig parse_config(const std::string& text) {
    ExperimentConfig cfg;
    std::set<std::string> seen;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    const auto fail = [&](const std::string& msg) {
        throw ConfigError("line " + std::to_string(lineno) + ": " + msg);
    };
    while (std::getline(in, line)) {
        ++lineno;
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) fail("expected 'key = value'");
        auto trim = [](std::string s) {
            const auto a = s.find_first_not_of(" \t\r");
            const auto b = s.find_last_not_of(" \t\r");
            return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
        };
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) fail("empty key");
        if (value.empty()) fail("empty value for key '" + key + "'");
        if (!seen.insert(key).second) fail("duplicate key '" + key + "'");

        try {
            if (key == "measure.branching")
                cfg.measure.branching = std::stoi(value);
            else if (key == "measure.survivors")
                cfg.measure.survivors = std::stoi(value);
            else if (key == "measure.depth")
                cfg.measure.depth = std::stoi(value);
            else if (key == "measure.randomized")
                cfg.measure.randomized = (value == "1" || value == "true");
            else if (key == "measure.seed")
                cfg.measure.seed = std::stoull(value);
            else if (key == "polynomial")
                cfg.polynomial = Polynomial::parse(value);
            else if (key == "conditions.alpha")
                cfg.conditions.alpha = std::stod(value);
            else if (key == "conditions.beta")
                cfg.conditions.beta = std::stod(value);
            else if (key == "conditions.C1")
                cfg.conditions.C1 = std::stod(value);
            else if (key == "conditions.C2")
                cfg.conditions.C2 = std::stod(value);
            else if (key == "conditions.B")
                cfg.conditions.B = std::stod(value);
            else if (key == "grid_level")
                cfg.grid_level = std::stoi(value);
            else if (key == "cutoff")
                cfg.cutoff = std::stoi(value);
            else if (key == "scan.c0")
                cfg.scan.c0 = std::stod(value);
            else if (key == "scan.C0")
                cfg.scan.C0 = std::stod(value);
            else if (key == "scan.ratio")
                cfg.scan.ratio = std::stod(value);
            else if (key == "scan.K_max")
                cfg.scan.K_max = std::stoi(value);
            else if (key == "scan.l_start")
                cfg.scan.l_start = std::stoi(value);
            else if (key == "scan.C_M")
                cfg.scan.C_M = std::stod(value);
            else if (key == "s0")
                cfg.s0 = std::stod(value);
            else if (key == "A")
                cfg.fejer_A = std::stod(value);
            else if (key == "dominance")
                cfg.dominance = std::stod(value);
            else if (key == "epsilon") {
                cfg.epsilon_sequence.clear();
                std::istringstream toks(value);
                std::string tok;
                while (toks >> tok) cfg.epsilon_sequence.push_back(detail::parse_eps_token(tok));
            } else if (key == "patterns.depth")
                cfg.patterns_depth = std::stoi(value);
            else if (key == "patterns.budget")
                cfg.patterns_budget = std::stol(value);
            else if (key == "patterns.max_depth")
                cfg.patterns_max_depth = std::stoi(value);
            else if (key == "seed")
                cfg.seed = std::stoull(value);
            else
                fail("unknown key '" + key + "'");
        } catch (const ConfigError&) {
            throw;
        } catch (const std::exception& e) {
            fail("bad value for '" + key + "': " + e.what());
        }
    }
    cfg.scan.dominance = cfg.dominance;
    try {
        cfg.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("validation: ") + e.what());
    }
    return cfg;
}

inline std::string serialize_config(const ExperimentConfig& cfg) {
    std::ostringstream out;
    out << "measure.branching = " << cfg.measure.branching << "\n";
    out << "measure.survivors = " << cfg.measure.survivors << "\n";
    out << "measure.depth = " << cfg.measure.depth << "\n";
    out << "measure.randomized = " << (cfg.measure.randomized ? 1 : 0) << "\n";
    out << "measure.seed = " << cfg.measure.seed << "\n";
    out << "polynomial = " << cfg.polynomial.to_string() << "\n";
    out << "conditions.alpha = " << detail::fmt_double(cfg.conditions.alpha) << "\n";
    out << "conditions.beta = " << detail::fmt_double(cfg.conditions.beta) << "\n";
    out << "conditions.C1 = " << detail::fmt_double(cfg.conditions.C1) << "\n";
    out << "conditions.C2 = " << detail::fmt_double(cfg.conditions.C2) << "\n";
    out << "conditions.B = " << detail::fmt_double(cfg.conditions.B) << "\n";
    out << "grid_level = " << cfg.grid_level << "\n";
    out << "cutoff = " << cfg.cutoff << "\n";
    out << "scan.c0 = " << detail::fmt_double(cfg.scan.c0) << "\n";
    out << "scan.C0 = " << detail::fmt_double(cfg.scan.C0) << "\n";
    out << "scan.ratio = " << detail::fmt_double(cfg.scan.ratio) << "\n";
    out << "scan.K_max = " << cfg.scan.K_max << "\n";
    out << "scan.l_start = " << cfg.scan.l_start << "\n";
    out << "scan.C_M = " << detail::fmt_double(cfg.scan.C_M) << "\n";
    out << "s0 = " << detail::fmt_double(cfg.s0) << "\n";
    out << "A = " << detail::fmt_double(cfg.fejer_A) << "\n";
    out << "dominance = " << detail::fmt_double(cfg.dominance) << "\n";
    out << "epsilon =";
    for (double e : cfg.epsilon_sequence) out << " " << detail::fmt_double(e);
    out << "\n";
    out << "patterns.depth = " << cfg.patterns_depth << "\n";
    out << "patterns.budget = " << cfg.patterns_budget << "\n";
    out << "patterns.max_depth = " << cfg.patterns_max_depth << "\n";
    out << "seed = " << cfg.seed << "\n";
    return out.str();
}

}  // namespace polypat
