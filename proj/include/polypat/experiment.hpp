// Experiment orchestration: construct -> certify conditions -> decompose ->
// scan scales -> bound mixed terms -> search patterns -> <nu,1>, with
// report.txt / summary.txt / CSV side files. Everything is deterministic
// under a fixed config; the only run-to-run difference is the timestamp
// header line of report.txt.
#pragma once

#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "polypat/config.hpp"
#include "polypat/constants.hpp"
#include "polypat/corpus.hpp"
#include "polypat/fourier.hpp"
#include "polypat/measures.hpp"
#include "polypat/oscillatory.hpp"
#include "polypat/patterns.hpp"
#include "polypat/trilinear.hpp"

namespace polypat {

enum class Stage { construct = 0, conditions, decompose, scan, mixed, patterns, numass };

inline bool operator>=(Stage a, Stage b) { return static_cast<int>(a) >= static_cast<int>(b); }

inline Stage parse_stage(const std::string& name) {
    if (name == "construct") return Stage::construct;
    if (name == "conditions") return Stage::conditions;
    if (name == "decompose") return Stage::decompose;
    if (name == "scan") return Stage::scan;
    if (name == "mixed") return Stage::mixed;
    if (name == "patterns") return Stage::patterns;
    if (name == "numass" || name == "all") return Stage::numass;
    throw std::invalid_argument("unknown stage '" + name +
                                "' (construct|conditions|decompose|scan|mixed|patterns|numass|all)");
}

struct ExperimentReport {
    // construct
    GridDensity measure;
    double mass = 0.0;
    // conditions
    double ball_C1 = 0.0;
    FourierSeries series;
    double decay_at_beta = 0.0;
    std::vector<std::pair<double, double>> decay_profile;  // (beta, constant)
    double sobolev_minus_s0 = 0.0;
    // decompose
    std::optional<DecompositionResult> decomposition;
    double mu1_min = 0.0;
    // scan
    std::optional<TrilinearReport> scan;
    int l0_used = 0;
    // mixed
    std::optional<MixedTermResult> mixed;
    double c0_over_8 = 0.0;
    // patterns
    std::optional<PatternSearchResult> patterns;
    bool pattern_found = false;
    // numass
    std::optional<NuMassResult> numass;
};

namespace detail {

struct StageError : std::runtime_error {
    StageError(const std::string& stage, const std::string& what)
        : std::runtime_error("stage " + stage + ": " + what) {}
};

inline std::string d2s(double x) { return fmt_double(x); }

}  // namespace detail

// Materialize the multiplier grid for reuse; byte-identical on reruns of
// the same inputs.
inline void tabulate_multiplier(const Polynomial& P, int l, int cutoff, const std::string& path,
                                double abs_tol = 1e-11, int threads = 1) {
    MultiplierTable::build(P, l, cutoff, abs_tol, threads).save(path);
}

inline ExperimentReport run_experiment(const ExperimentConfig& cfg, const std::string& out_dir,
                                       Stage last_stage = Stage::numass, int threads = 1) {
    namespace fs = std::filesystem;
    cfg.validate();
    fs::create_directories(out_dir);
    const auto path = [&](const char* name) { return (fs::path(out_dir) / name).string(); };

    ExperimentReport rep;
    std::ostringstream body;  // report sections, written at the end

    // -- construct ---------------------------------------------------------
    try {
        rep.measure = cfg.measure.randomized ? random_salem_measure(cfg.measure, cfg.grid_level)
                                             : cantor_measure(cfg.measure, cfg.grid_level);
        rep.mass = rep.measure.mass();
        rep.measure.save(path("measure.bin"));
    } catch (const std::exception& e) {
        throw detail::StageError("construct", e.what());
    }
    body << "[construct]\n";
    body << "cells = " << rep.measure.cells() << "\n";
    body << "mass = " << detail::d2s(rep.mass) << "\n";
    body << "target_dimension = " << detail::d2s(cfg.measure.dimension()) << "\n\n";

    if (last_stage >= Stage::conditions) {
        try {
            rep.ball_C1 = ball_constant(rep.measure, cfg.conditions.alpha);
            rep.series = fourier_coeffs(rep.measure, cfg.cutoff);
            rep.series.save(path("series.bin"));
            rep.decay_at_beta = decay_constant(rep.series, cfg.conditions.beta);
            for (double beta = 0.2; beta < 0.95; beta += 0.1)
                rep.decay_profile.emplace_back(beta, decay_constant(rep.series, beta));
            rep.sobolev_minus_s0 = sobolev_norm(rep.series, -cfg.s0);

            std::ofstream csv(path("decay.csv"));
            csv << "k,abs_coeff\n";
            for (int k = 1; k <= rep.series.cutoff(); ++k)
                csv << k << "," << detail::d2s(std::abs(rep.series.at(k))) << "\n";
        } catch (const std::exception& e) {
            throw detail::StageError("conditions", e.what());
        }
        body << "[conditions]\n";
        body << "ball_C1 = " << detail::d2s(rep.ball_C1) << " (alpha = " << detail::d2s(cfg.conditions.alpha)
             << ", target C1 = " << detail::d2s(cfg.conditions.C1) << ")\n";
        body << "decay_constant = " << detail::d2s(rep.decay_at_beta)
             << " (beta = " << detail::d2s(cfg.conditions.beta) << ")\n";
        for (const auto& [beta, c] : rep.decay_profile)
            body << "decay_profile " << detail::d2s(beta) << " = " << detail::d2s(c) << "\n";
        body << "sobolev_H_minus_s0 = " << detail::d2s(rep.sobolev_minus_s0) << "\n\n";
    }

    if (last_stage >= Stage::decompose) {
        try {
            rep.decomposition = decompose(rep.series, cfg.conditions, cfg.fejer_A);
            const int band = static_cast<int>(
                std::min(static_cast<double>(cfg.cutoff), std::ceil(2.0 * rep.decomposition->N)));
            rep.mu1_min = synthesize_samples(rep.decomposition->mu1.truncated(band),
                                             std::min(cfg.grid_level, 16))
                              .min_value();
        } catch (const std::exception& e) {
            throw detail::StageError("decompose", e.what());
        }
        body << "[decompose]\n";
        body << "N = " << detail::d2s(rep.decomposition->N) << "\n";
        body << "sup_mu1 = " << detail::d2s(rep.decomposition->sup_bound) << "\n";
        body << "M = " << detail::d2s(rep.decomposition->M) << " (A = " << detail::d2s(cfg.fejer_A) << ")\n";
        body << "sup_within_M = " << (rep.decomposition->sup_bound <= rep.decomposition->M ? 1 : 0) << "\n";
        body << "mu1_min = " << detail::d2s(rep.mu1_min) << "\n\n";
    }

    if (last_stage >= Stage::scan) {
        try {
            const DecompositionResult& dec = *rep.decomposition;
            const int band = static_cast<int>(std::min(static_cast<double>(cfg.cutoff), std::ceil(2.0 * dec.N)));
            GridDensity f1 = synthesize_averages(dec.mu1.truncated(band), cfg.grid_level);
            for (double& v : f1.values()) {
                if (v < 0.0) {
                    if (v < -1e-9) throw std::runtime_error("mu1 reconstruction genuinely negative");
                    v = 0.0;
                }
            }
            ScanParams sp = cfg.scan;
            sp.dominance = cfg.dominance;
            rep.scan = scale_scan(f1, cfg.polynomial, sp);
            std::ofstream csv(path("lambda_scale.csv"));
            csv << "scale,lambda,increment_l2\n";
            for (const auto& r : rep.scan->rungs)
                csv << r.scale << "," << detail::d2s(r.lambda) << "," << detail::d2s(r.increment_l2) << "\n";
        } catch (const std::exception& e) {
            throw detail::StageError("scan", e.what());
        }
        const TrilinearReport& sc = *rep.scan;
        rep.l0_used = sc.certified_scale > 0 ? sc.certified_scale : scale_setup(cfg.polynomial, cfg.dominance).l0;
        body << "[scan]\n";
        for (const auto& r : sc.rungs)
            body << "rung scale=" << r.scale << " lambda=" << detail::d2s(r.lambda)
                 << " increment=" << detail::d2s(r.increment_l2) << (r.certified ? " certified" : "") << "\n";
        body << "certified_scale = " << sc.certified_scale << "\n";
        body << "c0 = " << detail::d2s(sc.c0) << "\n";
        body << "lambda_threshold = " << detail::d2s(sc.lambda_threshold) << "\n";
        body << "increment_threshold = " << detail::d2s(sc.increment_threshold)
             << (sc.threshold_vacuous ? " (vacuous at desk scale: C_M = M^10)" : "") << "\n";
        body << "energy_total = " << detail::d2s(sc.energy_total) << "\n";
        body << "energy_budget = " << detail::d2s(sc.energy_budget) << "\n";
        body << "budget_contradiction = " << (sc.budget_contradiction ? 1 : 0) << "\n";
        body << "resolution_exceeded = " << (sc.resolution_exceeded ? 1 : 0) << "\n\n";
    }

    if (last_stage >= Stage::mixed) {
        try {
            const MultiplierTable table =
                MultiplierTable::build(cfg.polynomial, rep.l0_used, cfg.cutoff, 1e-11, threads);
            table.save(path("multiplier.bin"));
            rep.mixed = mixed_term_bounds(rep.decomposition->mu1, rep.decomposition->mu2, rep.l0_used, cfg.s0,
                                          cfg.polynomial, table);
            rep.c0_over_8 = cfg.scan.c0 / 8.0;
        } catch (const std::exception& e) {
            throw detail::StageError("mixed", e.what());
        }
        body << "[mixed]\n";
        body << "l0 = " << rep.l0_used << "\n";
        body << "c0_over_8 = " << detail::d2s(rep.c0_over_8) << "\n";
        for (std::size_t i = 0; i < rep.mixed->values.size(); ++i) {
            const auto& t = rep.mixed->tuples[i];
            body << "mixed_" << t[0] << t[1] << t[2] << " = " << detail::d2s(rep.mixed->values[i])
                 << " (comparison bound " << detail::d2s(rep.mixed->bounds[i])
                 << ", below_c0_over_8 = " << (rep.mixed->values[i] <= rep.c0_over_8 ? 1 : 0) << ")\n";
        }
        body << "decay_driver = " << detail::d2s(mixed_term_decay_driver(cfg.conditions, cfg.s0)) << "\n\n";
    }

    if (last_stage >= Stage::patterns) {
        try {
            CantorSpec pat_spec = cfg.measure;
            if (cfg.patterns_depth >= 0) pat_spec.depth = cfg.patterns_depth;
            const IntervalSet E = IntervalSet::from_cantor(pat_spec);
            rep.patterns =
                find_configurations(E, cfg.polynomial, rep.l0_used, cfg.patterns_budget, cfg.patterns_max_depth);
            rep.pattern_found = !rep.patterns->triples.empty();
            export_triples(*rep.patterns, path("patterns.txt"));
        } catch (const std::exception& e) {
            throw detail::StageError("patterns", e.what());
        }
        body << "[patterns]\n";
        body << "certified_triples = " << rep.patterns->triples.size() << "\n";
        body << "pattern_found = " << (rep.pattern_found ? 1 : 0) << "\n";
        body << "budget_exhausted = " << (rep.patterns->budget_exhausted ? 1 : 0) << "\n";
        body << "nodes_expanded = " << rep.patterns->nodes_expanded << "\n\n";
    }

    if (last_stage >= Stage::numass) {
        try {
            rep.numass = nu_mass(rep.measure, cfg.polynomial, rep.l0_used, cfg.epsilon_sequence);
            std::ofstream csv(path("numass.csv"));
            csv << "epsilon,value\n";
            for (std::size_t i = 0; i < cfg.epsilon_sequence.size(); ++i)
                csv << detail::d2s(cfg.epsilon_sequence[i]) << "," << detail::d2s(rep.numass->values[i]) << "\n";
        } catch (const std::exception& e) {
            throw detail::StageError("numass", e.what());
        }
        body << "[numass]\n";
        for (std::size_t i = 0; i < cfg.epsilon_sequence.size(); ++i)
            body << "value eps=" << detail::d2s(cfg.epsilon_sequence[i]) << " = "
                 << detail::d2s(rep.numass->values[i]) << "\n";
        for (double c : rep.numass->cauchy) body << "cauchy_difference = " << detail::d2s(c) << "\n";
        body << "limit_estimate = " << detail::d2s(rep.numass->limit_estimate) << "\n\n";
    }

    // report.txt: human-readable, timestamp on its own line.
    {
        std::ofstream out(path("report.txt"));
        out << "polypat experiment report\n";
        std::time_t now = std::time(nullptr);
        char stamp[64];
        std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
        out << "generated: " << stamp << "\n";
        out << "calibration: c0_corpus_hash=" << std::hex << calibrated::c0_corpus_hash << std::dec << "\n\n";
        out << "[config]\n" << serialize_config(cfg) << "\n";
        out << body.str();
    }

    // summary.txt: machine-readable flat block, no timestamp.
    {
        std::ofstream out(path("summary.txt"));
        out << "mass = " << detail::d2s(rep.mass) << "\n";
        if (last_stage >= Stage::conditions) {
            out << "ball_C1 = " << detail::d2s(rep.ball_C1) << "\n";
            out << "decay_constant = " << detail::d2s(rep.decay_at_beta) << "\n";
            out << "sobolev_H_minus_s0 = " << detail::d2s(rep.sobolev_minus_s0) << "\n";
        }
        if (rep.decomposition) {
            out << "N = " << detail::d2s(rep.decomposition->N) << "\n";
            out << "sup_mu1 = " << detail::d2s(rep.decomposition->sup_bound) << "\n";
            out << "M = " << detail::d2s(rep.decomposition->M) << "\n";
            out << "mu1_min = " << detail::d2s(rep.mu1_min) << "\n";
        }
        if (rep.scan) {
            out << "certified_scale = " << rep.scan->certified_scale << "\n";
            out << "energy_total = " << detail::d2s(rep.scan->energy_total) << "\n";
        }
        if (rep.mixed)
            for (std::size_t i = 0; i < rep.mixed->values.size(); ++i) {
                const auto& t = rep.mixed->tuples[i];
                out << "mixed_" << t[0] << t[1] << t[2] << " = " << detail::d2s(rep.mixed->values[i]) << "\n";
            }
        if (rep.patterns) out << "pattern_found = " << (rep.pattern_found ? 1 : 0) << "\n";
        if (rep.numass) out << "numass_limit = " << detail::d2s(rep.numass->limit_estimate) << "\n";
    }
    return rep;
}

}  // namespace polypat
