#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "nfl/experiments.hpp"

using namespace nfl;
using namespace nfl::experiments;
using nlohmann::json;

namespace {

json minimal_config() {
    return json{{"d", 2},
                {"r_values", {1, 2}},
                {"t_values", {1, 2}},
                {"n_unitaries", 10},
                {"n_sets", 10},
                {"learner", "perfect"},
                {"set_style", "generic"},
                {"master_seed", 12345},
                {"output_path", "out/test_sweep"}};
}

}  // namespace

TEST_CASE("config parsing applies defaults and rejects unknown keys") {
    const auto cfg = ExperimentConfig::from_json(minimal_config());
    CHECK(cfg.d == 2);
    CHECK(cfg.optimizer.max_iters == 5000);
    CHECK(cfg.bounds_requested.size() == 1);

    json bad = minimal_config();
    bad["surprise"] = 1;
    CHECK_THROWS_WITH_AS(ExperimentConfig::from_json(bad),
                         "config field 'surprise': unknown key", ConfigInvalid);

    json bad_opt = minimal_config();
    bad_opt["optimizer"] = json{{"max_iter", 10}};
    CHECK_THROWS_AS(ExperimentConfig::from_json(bad_opt), ConfigInvalid);
}

TEST_CASE("config validation names the offending field") {
    json missing = minimal_config();
    missing.erase("d");
    try {
        ExperimentConfig::from_json(missing);
        FAIL("expected ConfigInvalid");
    } catch (const ConfigInvalid& e) {
        CHECK(e.field == "d");
    }

    json bad_n = minimal_config();
    bad_n["n_unitaries"] = 0;
    try {
        ExperimentConfig::from_json(bad_n);
        FAIL("expected ConfigInvalid");
    } catch (const ConfigInvalid& e) {
        CHECK(e.field == "n_unitaries");
    }

    json bad_learner = minimal_config();
    bad_learner["learner"] = "psychic";
    CHECK_THROWS_AS(ExperimentConfig::from_json(bad_learner), ConfigInvalid);
}

TEST_CASE("NFL_LAB_SEED supplies the master seed when the config omits it") {
    json doc = minimal_config();
    doc.erase("master_seed");
    setenv("NFL_LAB_SEED", "777", 1);
    CHECK(ExperimentConfig::from_json(doc).master_seed == 777);
    unsetenv("NFL_LAB_SEED");
    CHECK(ExperimentConfig::from_json(doc).master_seed == kDefaultMasterSeed);
}

TEST_CASE("tiny perfect sweep matches the bound on every kept grid point") {
    const auto cfg = ExperimentConfig::from_json(minimal_config());
    const auto result = run_sweep(cfg, 2);
    // (2,2) is skipped: r*t exceeds d
    REQUIRE(result.grid.size() == 3);
    for (const auto& s : result.grid) {
        const double bound = bounds::quantum_nfl_bound(s.d, s.r, s.t);
        if (s.r * s.t == s.d) {
            CHECK(s.mean_risk <= 1e-10);
            CHECK(s.sample_std <= 1e-10);
            CHECK(s.max_risk <= 1e-10);
        } else {
            CHECK(std::abs(s.mean_risk - bound) <= 3.0 * s.stderr);
        }
        CHECK(s.non_converged == 0);
    }
    CHECK(result.curves.size() == 2);  // one quantum curve per r
}

TEST_CASE("sweeps are deterministic across runs and thread counts") {
    const auto cfg = ExperimentConfig::from_json(minimal_config());
    const auto a = result_to_json(run_sweep(cfg, 1)).dump(2);
    const auto b = result_to_json(run_sweep(cfg, 3)).dump(2);
    CHECK(a == b);
}

TEST_CASE("classical mc curve anchors and stays monotone") {
    const auto curve = run_classical_mc(BoundKind::classical_bistochastic_mc, 8,
                                        {0, 1, 2, 3, 4, 5, 6, 7, 8}, 400, {55, 0}, 2);
    REQUIRE(curve.points.size() == 9);
    CHECK(std::abs(curve.points[0].value - bounds::classical_stochastic_bound(8, 0)) <=
          3.0 * *curve.points[0].stderr);
    CHECK(curve.points[8].value == 0.0);  // t = d contributes an exact zero
    for (std::size_t i = 1; i < curve.points.size(); ++i)
        CHECK(curve.points[i].value <=
              curve.points[i - 1].value + 3.0 * (*curve.points[i].stderr +
                                                 *curve.points[i - 1].stderr) + 1e-12);
    CHECK_THROWS_AS(
        run_classical_mc(BoundKind::classical_stochastic, 8, {0, 1}, 100, {55, 1}),
        InvalidArgs);
}

TEST_CASE("classical mc curve hits zero at t = 1 for d = 2") {
    const auto curve =
        run_classical_mc(BoundKind::classical_bistochastic_mc, 2, {0, 1}, 300, {56, 0});
    CHECK(curve.points[1].value <= 1e-12);
}

TEST_CASE("result json round trips byte-identically") {
    json doc = minimal_config();
    doc["t_values"] = {1};
    const auto cfg = ExperimentConfig::from_json(doc);
    const auto result = run_sweep(cfg, 2);
    const std::string first = result_to_json(result).dump(2);
    const std::string second = result_to_json(result_from_json(json::parse(first))).dump(2);
    CHECK(first == second);
}

TEST_CASE("write_result emits artifacts with pinned headers") {
    namespace fs = std::filesystem;
    json doc = minimal_config();
    doc["t_values"] = {1};
    doc["output_path"] = (fs::temp_directory_path() / "nfl_lab_test_out").string();
    const auto cfg = ExperimentConfig::from_json(doc);
    auto result = run_sweep(cfg, 2);
    write_result(result, OutputFormat::json);
    write_result(result, OutputFormat::csv);

    std::ifstream grid(fs::path(cfg.output_path) / "grid.csv");
    REQUIRE(grid.good());
    std::string header;
    std::getline(grid, header);
    CHECK(header == "d,r,t,n_unitaries,n_sets,mean_risk,sample_std,stderr,learner");
    int rows = 0;
    for (std::string line; std::getline(grid, line);) ++rows;
    CHECK(rows == static_cast<int>(result.grid.size()));

    std::ifstream curves(fs::path(cfg.output_path) / "bounds.csv");
    REQUIRE(curves.good());
    std::getline(curves, header);
    CHECK(header == "kind,d,r,t,value,stderr");

    std::ifstream rj(fs::path(cfg.output_path) / "result.json");
    REQUIRE(rj.good());
    json parsed;
    rj >> parsed;
    CHECK(!parsed.contains("wall_time_seconds"));  // byte-stable artifacts
    CHECK(parsed.at("code_version").get<std::string>() == kCodeVersion);
    fs::remove_all(cfg.output_path);
}

TEST_CASE("empty effective grids still produce valid artifacts") {
    namespace fs = std::filesystem;
    json doc = minimal_config();
    doc["r_values"] = {2};
    doc["t_values"] = {2};  // the only point has r*t > d and is skipped
    doc["output_path"] = (fs::temp_directory_path() / "nfl_lab_test_empty").string();
    const auto cfg = ExperimentConfig::from_json(doc);
    auto result = run_sweep(cfg, 1);
    CHECK(result.grid.empty());
    write_result(result, OutputFormat::csv);
    std::ifstream grid(fs::path(cfg.output_path) / "grid.csv");
    std::string header;
    std::getline(grid, header);
    CHECK(header == "d,r,t,n_unitaries,n_sets,mean_risk,sample_std,stderr,learner");
    std::string rest;
    CHECK(!std::getline(grid, rest));
    fs::remove_all(cfg.output_path);
}

TEST_CASE("csv floats carry full precision") {
    namespace fs = std::filesystem;
    json doc = minimal_config();
    doc["t_values"] = {1};
    doc["r_values"] = {1};
    doc["output_path"] = (fs::temp_directory_path() / "nfl_lab_test_prec").string();
    const auto cfg = ExperimentConfig::from_json(doc);
    auto result = run_sweep(cfg, 1);
    write_result(result, OutputFormat::csv);
    std::ifstream grid(fs::path(cfg.output_path) / "grid.csv");
    std::string header, line;
    std::getline(grid, header);
    REQUIRE(std::getline(grid, line));
    // column 6 is mean_risk
    std::stringstream ss(line);
    std::string cell;
    for (int i = 0; i < 6; ++i) std::getline(ss, cell, ',');
    CHECK(std::stod(cell) == result.grid[0].mean_risk);
    fs::remove_all(cfg.output_path);
}

TEST_CASE("single full-rank trial reports exact zeros") {
    json doc = minimal_config();
    doc["r_values"] = {2};
    doc["t_values"] = {1};
    doc["n_unitaries"] = 1;
    doc["n_sets"] = 1;
    const auto cfg = ExperimentConfig::from_json(doc);
    const auto result = run_sweep(cfg, 1);
    REQUIRE(result.grid.size() == 1);
    CHECK(result.grid[0].mean_risk <= 1e-10);
    CHECK(result.grid[0].sample_std == 0.0);
    CHECK(result.grid[0].stderr == 0.0);
}
