#include <catch2/catch_amalgamated.hpp>
#include <filesystem>
#include <fstream>

#include "polypat/experiment.hpp"

using namespace polypat;
using Catch::Approx;
namespace fs = std::filesystem;

namespace {

std::string read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

// report.txt without its timestamp line.
std::string strip_timestamp(const std::string& text) {
    std::istringstream in(text);
    std::ostringstream out;
    std::string line;
    while (std::getline(in, line))
        if (line.rfind("generated:", 0) != 0) out << line << "\n";
    return out.str();
}

ExperimentConfig uniform_config() {
    ExperimentConfig cfg;
    cfg.measure = {3, 2, 0, false, 0};  // depth 0: the uniform density
    cfg.polynomial = Polynomial::parse("t + t^2");
    cfg.conditions.alpha = 0.9;
    cfg.conditions.beta = 0.5;
    cfg.grid_level = 11;
    cfg.cutoff = 64;
    cfg.epsilon_sequence = {std::exp2(-7.0), std::exp2(-8.0)};
    return cfg;
}

}  // namespace

TEST_CASE("uniform pipeline: degenerate but fully wired") {
    const fs::path dir = fs::temp_directory_path() / "polypat_uniform";
    fs::remove_all(dir);
    const ExperimentReport rep = run_experiment(uniform_config(), dir.string());

    // Lambda = 1 at the first rung, mu2 = 0, a pattern triple certifies.
    REQUIRE(rep.scan.has_value());
    CHECK(rep.scan->certified_scale == 7);
    CHECK(rep.scan->rungs.front().lambda == Approx(1.0).margin(1e-9));
    REQUIRE(rep.decomposition.has_value());
    for (int n = -64; n <= 64; ++n) CHECK(std::abs(rep.decomposition->mu2.at(n)) == 0.0);
    CHECK(rep.pattern_found);
    REQUIRE(rep.numass.has_value());
    for (double v : rep.numass->values) CHECK(v == Approx(1.0).margin(1e-8));

    for (const char* name : {"report.txt", "summary.txt", "measure.bin", "series.bin", "multiplier.bin",
                             "decay.csv", "lambda_scale.csv", "numass.csv", "patterns.txt"})
        CHECK(fs::exists(dir / name));
    fs::remove_all(dir);
}

TEST_CASE("stage prefixes stop early") {
    const fs::path dir = fs::temp_directory_path() / "polypat_prefix";
    fs::remove_all(dir);
    run_experiment(uniform_config(), dir.string(), Stage::construct);
    CHECK(fs::exists(dir / "measure.bin"));
    CHECK(fs::exists(dir / "report.txt"));
    CHECK_FALSE(fs::exists(dir / "multiplier.bin"));
    CHECK_FALSE(fs::exists(dir / "patterns.txt"));
    fs::remove_all(dir);
}

TEST_CASE("grid too coarse for the ladder is reported, not thrown") {
    ExperimentConfig cfg = uniform_config();
    cfg.grid_level = 8;  // cannot resolve the scan's l0 = 7 (needs level >= 10)
    cfg.cutoff = 64;
    cfg.epsilon_sequence = {std::exp2(-6.0)};
    const fs::path dir = fs::temp_directory_path() / "polypat_coarse";
    const ExperimentReport rep = run_experiment(cfg, dir.string(), Stage::scan);
    REQUIRE(rep.scan.has_value());
    CHECK(rep.scan->resolution_exceeded);
    CHECK(rep.scan->certified_scale < 0);
    fs::remove_all(dir);
}

TEST_CASE("stage errors carry the stage tag") {
    ExperimentConfig cfg = uniform_config();
    cfg.patterns_depth = 1;  // width-1/3 intervals cannot resolve t at l0 = 7
    const fs::path dir = fs::temp_directory_path() / "polypat_err";
    try {
        run_experiment(cfg, dir.string(), Stage::patterns);
        FAIL("expected a stage error");
    } catch (const std::runtime_error& e) {
        CHECK(std::string(e.what()).rfind("stage patterns:", 0) == 0);
    }
    fs::remove_all(dir);
}

TEST_CASE("tabulate_multiplier is idempotent and spot-checks against fresh quadrature") {
    const fs::path dir = fs::temp_directory_path() / "polypat_tab";
    fs::create_directories(dir);
    const auto P = Polynomial::parse("t^2");
    const std::string path1 = (dir / "m1.bin").string();
    const std::string path2 = (dir / "m2.bin").string();
    tabulate_multiplier(P, 4, 16, path1);
    tabulate_multiplier(P, 4, 16, path2);
    CHECK(read_file(path1) == read_file(path2));  // byte identical

    const MultiplierTable t = MultiplierTable::load(path1);
    CHECK(std::abs(t.at(0, 0) - complexd(1.0, 0.0)) < 1e-12);
    for (const auto& [xi, eta] : std::vector<std::pair<int, int>>{{3, -9}, {-16, 5}, {11, 11}}) {
        const QuadResult fresh = multiplier_quadrature(two_pi * xi, two_pi * eta, 4, P, 1e-11);
        CHECK(std::abs(t.at(xi, eta) - fresh.value) < 1e-12);
    }
    fs::remove_all(dir);
}

TEST_CASE("randomized construction: decay constant is finite and recorded") {
    const GridDensity mu = random_salem_measure({4, 2, 5, true, 2024}, 10);
    const FourierSeries s = fourier_coeffs(mu, 256);
    const double c = decay_constant(s, 0.5);
    CHECK(std::isfinite(c));
    CHECK(c > 0.0);
    WARN("random salem (4,2,5,seed 2024) decay constant at beta=0.5: " << c);
}

TEST_CASE("reference config pipeline is byte-deterministic", "[heavy]") {
    std::ifstream in("configs/reference.cfg");
    if (!in) in.open("../configs/reference.cfg");
    REQUIRE(in);
    std::stringstream buf;
    buf << in.rdbuf();
    ExperimentConfig cfg = parse_config(buf.str());
    // Trim to keep the double run affordable in the unit suite; the full
    // reference settings are exercised by the CLI smoke test.
    cfg.measure.depth = 6;
    cfg.grid_level = 12;
    cfg.cutoff = 256;
    cfg.patterns_budget = 5'000'000;

    const fs::path dir1 = fs::temp_directory_path() / "polypat_det1";
    const fs::path dir2 = fs::temp_directory_path() / "polypat_det2";
    fs::remove_all(dir1);
    fs::remove_all(dir2);
    run_experiment(cfg, dir1.string());
    run_experiment(cfg, dir2.string());
    for (const char* name : {"summary.txt", "measure.bin", "series.bin", "multiplier.bin", "decay.csv",
                             "lambda_scale.csv", "numass.csv", "patterns.txt"})
        CHECK(read_file(dir1 / name) == read_file(dir2 / name));
    CHECK(strip_timestamp(read_file(dir1 / "report.txt")) == strip_timestamp(read_file(dir2 / "report.txt")));
    fs::remove_all(dir1);
    fs::remove_all(dir2);
}
