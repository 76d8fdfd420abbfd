#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "nfl/bounds.hpp"
#include "nfl/learning.hpp"

namespace nfl::experiments {

using bounds::BoundCurve;
using bounds::BoundKind;
using bounds::RiskStats;
using learning::LearnerMethod;
using learning::OptimizerConfig;
using sampling::SeedSpec;
using sampling::SetStyle;

inline constexpr const char* kCodeVersion = "nfl-lab 1.0.0";

/// Default master seed when neither the config nor NFL_LAB_SEED provides one.
inline constexpr std::uint64_t kDefaultMasterSeed = 20220201;

struct ExperimentConfig {
    int d = 2;
    std::vector<int> r_values;
    std::vector<int> t_values;
    int n_unitaries = 10;
    int n_sets = 100;
    LearnerMethod learner = LearnerMethod::perfect;
    SetStyle set_style = SetStyle::generic;
    OptimizerConfig optimizer;
    std::uint64_t master_seed = kDefaultMasterSeed;
    std::vector<BoundKind> bounds_requested{BoundKind::quantum_nfl};
    std::string output_path = "out";

    /// Throws ConfigInvalid naming the offending field.
    void validate() const;

    /// Strict parse: unknown keys are an error; missing optional keys take
    /// the defaults above (master_seed falls back to NFL_LAB_SEED if set).
    static ExperimentConfig from_json(const nlohmann::json& doc);
    nlohmann::json to_json() const;
};

struct ExperimentResult {
    ExperimentConfig config_echo;
    std::vector<RiskStats> grid;
    std::vector<BoundCurve> curves;
    double wall_time_seconds = 0.0;  // not serialized: artifacts must be byte-stable
    std::string code_version = kCodeVersion;
};

/// Full Monte Carlo sweep over the (r, t) grid. Grid points with r·t > d are
/// skipped with a notice on stderr (risk is deterministically zero there).
/// Deterministic given master_seed, for any thread count.
ExperimentResult run_sweep(const ExperimentConfig& cfg, int threads = 0);

/// Monte Carlo bound curve (classical_bistochastic_mc only); one value and
/// stderr per t. t ≥ d contributes an exact 0 (no unknown columns remain).
BoundCurve run_classical_mc(BoundKind kind, int d, std::vector<int> t_values,
                            int n_matrices, SeedSpec seed, int threads = 0);

enum class OutputFormat { json, csv };

/// Writes result.json (format json) or grid.csv + bounds.csv (format csv)
/// under res.config_echo.output_path, creating directories as needed.
/// CSV floats carry 17 significant digits; JSON floats are round-trip exact.
void write_result(const ExperimentResult& res, OutputFormat format);

nlohmann::json result_to_json(const ExperimentResult& res);
ExperimentResult result_from_json(const nlohmann::json& doc);

}  // namespace nfl::experiments
