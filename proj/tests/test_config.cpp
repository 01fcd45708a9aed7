#include <catch2/catch_amalgamated.hpp>

#include "polypat/config.hpp"
#include "polypat/experiment.hpp"

using namespace polypat;
using Catch::Approx;

namespace {

const char* kSample = R"(# reference experiment
measure.branching = 3
measure.survivors = 2
measure.depth = 5
measure.randomized = 0
measure.seed = 42
polynomial = t + t^2
conditions.alpha = 0.6309297535714574
conditions.beta = 0.4
conditions.C1 = 4
conditions.C2 = 1
conditions.B = 1
grid_level = 11
cutoff = 128
epsilon = 2^-7 2^-8
seed = 42
)";

}  // namespace

TEST_CASE("config parsing and defaults") {
    const ExperimentConfig cfg = parse_config(kSample);
    CHECK(cfg.measure.branching == 3);
    CHECK(cfg.measure.depth == 5);
    CHECK(cfg.polynomial.to_string() == "1*t^1 + 1*t^2");
    CHECK(cfg.conditions.beta == 0.4);
    CHECK(cfg.cutoff == 128);
    CHECK(cfg.epsilon_sequence.size() == 2);
    CHECK(cfg.epsilon_sequence[0] == Approx(std::exp2(-7.0)));
    CHECK(cfg.s0 == 0.1);                      // default
    CHECK(cfg.scan.c0 == calibrated::c0);      // default from calibration
    CHECK(cfg.seed == 42);
}

TEST_CASE("config errors are line anchored") {
    const auto expect_error = [](const std::string& text, const std::string& needle) {
        try {
            parse_config(text);
            FAIL("expected a config error");
        } catch (const ConfigError& e) {
            INFO(e.what());
            CHECK(std::string(e.what()).find(needle) != std::string::npos);
        }
    };
    expect_error("grid_level = 11\nbogus_key = 3\n", "line 2");
    expect_error("grid_level = 11\nbogus_key = 3\n", "unknown key 'bogus_key'");
    expect_error("measure.branching\n", "expected 'key = value'");
    expect_error("grid_level = 11\ngrid_level = 12\n", "duplicate key");
    expect_error("measure.branching = three\n", "bad value");
    // Validation failures surface the offending field.
    expect_error("measure.branching = 3\nmeasure.survivors = 5\n", "survivors");
    expect_error("cutoff = 4096\ngrid_level = 8\n", "cutoff");
    expect_error("epsilon = 0.01 0.02\n", "decreasing");
}

TEST_CASE("config round trip is idempotent on the canonical form") {
    const ExperimentConfig cfg = parse_config(kSample);
    const std::string canonical = serialize_config(cfg);
    const ExperimentConfig back = parse_config(canonical);
    CHECK(serialize_config(back) == canonical);
}

TEST_CASE("stage names parse") {
    CHECK(parse_stage("construct") == Stage::construct);
    CHECK(parse_stage("all") == Stage::numass);
    CHECK_THROWS(parse_stage("bogus"));
}
