// Experiment runner. `polypat --config exp.cfg --out results/` walks the
// pipeline (or a --stage prefix) and writes report.txt, summary.txt, CSV
// side files and the binary multiplier table. Subcommands `tabulate` and
// `ray` materialize multiplier grids and |m_l| ray profiles on their own.
//
// Exit status reflects pipeline health (0 = completed), not the
// mathematical outcome; the pattern-found flag lives in the report.
#include <CLI11.hpp>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "polypat/experiment.hpp"

int main(int argc, char** argv) {
    CLI::App app{"polypat: numerical laboratory for polynomial patterns in Cantor-type sets"};
    app.require_subcommand(0, 1);

    std::string config_path, stage_name = "all", out_dir = ".";
    int threads = 1;
    std::uint64_t seed_override = 0;
    bool have_seed_override = false;
    app.add_option("--config", config_path, "experiment config file (flat key = value)");
    app.add_option("--stage", stage_name, "run the pipeline prefix up to this stage")
        ->check(CLI::IsMember(
            {"construct", "conditions", "decompose", "scan", "mixed", "patterns", "numass", "all"}));
    app.add_option("--out", out_dir, "output directory");
    app.add_option("--threads", threads, "worker threads for the multiplier table")->check(CLI::PositiveNumber);
    app.add_option("--seed-override", seed_override, "replace the config seed")
        ->each([&](const std::string&) { have_seed_override = true; });

    auto* tab = app.add_subcommand("tabulate", "write a binary multiplier grid");
    std::string tab_poly = "t + t^2", tab_out = "multiplier.bin";
    int tab_l = 4, tab_k = 64;
    double tab_tol = 1e-11;
    tab->add_option("--polynomial", tab_poly, "pattern polynomial, e.g. \"t + t^2\"");
    tab->add_option("--l", tab_l, "scale index")->required();
    tab->add_option("--K", tab_k, "frequency cutoff")->required();
    tab->add_option("--out-file", tab_out, "output path");
    tab->add_option("--tol", tab_tol, "absolute quadrature tolerance");

    auto* ray = app.add_subcommand("ray", "CSV profile of |m_l| along the ray xi = rho*eta");
    std::string ray_poly = "t + t^2", ray_out = "ray.csv";
    int ray_l = 4, ray_samples = 200;
    double ray_rho = -1.0, ray_lo = 1e2, ray_hi = 1e5;
    ray->add_option("--polynomial", ray_poly, "pattern polynomial");
    ray->add_option("--l", ray_l, "scale index")->required();
    ray->add_option("--rho", ray_rho, "ray slope xi/eta")->required();
    ray->add_option("--eta-min", ray_lo, "smallest eta");
    ray->add_option("--eta-max", ray_hi, "largest eta");
    ray->add_option("--samples", ray_samples, "number of log-spaced samples");
    ray->add_option("--out-file", ray_out, "output path");

    CLI11_PARSE(app, argc, argv);

    try {
        if (tab->parsed()) {
            polypat::tabulate_multiplier(polypat::Polynomial::parse(tab_poly), tab_l, tab_k, tab_out, tab_tol,
                                         threads);
            std::printf("wrote %s\n", tab_out.c_str());
            return 0;
        }
        if (ray->parsed()) {
            polypat::export_multiplier_ray(polypat::Polynomial::parse(ray_poly), ray_l, ray_rho, ray_lo, ray_hi,
                                           ray_samples, ray_out);
            std::printf("wrote %s\n", ray_out.c_str());
            return 0;
        }
        if (config_path.empty()) {
            std::fprintf(stderr, "error: --config is required (or use a subcommand; see --help)\n");
            return 2;
        }
        std::ifstream in(config_path);
        if (!in) {
            std::fprintf(stderr, "error: cannot open config file %s\n", config_path.c_str());
            return 2;
        }
        std::stringstream buf;
        buf << in.rdbuf();

        polypat::ExperimentConfig cfg;
        try {
            cfg = polypat::parse_config(buf.str());
        } catch (const polypat::ConfigError& e) {
            std::fprintf(stderr, "config error: %s\n", e.what());
            return 2;
        }
        if (have_seed_override) {
            cfg.seed = seed_override;
            cfg.measure.seed = seed_override;
        }
        const polypat::Stage stage = polypat::parse_stage(stage_name);
        polypat::run_experiment(cfg, out_dir, stage, threads);
        std::printf("pipeline completed; report in %s\n", out_dir.c_str());
        return 0;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    }
}
