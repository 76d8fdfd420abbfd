// nfl_lab: no-free-lunch bounds, sweeps and Monte Carlo checks for learning
// Haar-random unitaries from entangled training data.

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "nfl/bounds.hpp"
#include "nfl/experiments.hpp"
#include "nfl/learning.hpp"
#include "nfl/sampling.hpp"

namespace {

using nfl::bounds::BoundCurve;
using nfl::bounds::BoundKind;
using nfl::sampling::SeedSpec;

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitRuntime = 2;

std::uint64_t default_seed() {
    if (const char* env = std::getenv("NFL_LAB_SEED"))
        return std::strtoull(env, nullptr, 10);
    return nfl::experiments::kDefaultMasterSeed;
}

std::string fmt(double x) {
    char buffer[64];
    std::snprintf(buffer, sizeof(buffer), "%.17g", x);
    return buffer;
}

void write_or_print(const std::string& out_path, const std::string& payload) {
    if (out_path.empty()) {
        std::cout << payload;
        return;
    }
    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw nfl::IoError("cannot open " + out_path + " for writing");
    out << payload;
}

// ---- bounds ----------------------------------------------------------------

struct BoundsArgs {
    int d = 0;
    int r = 1;
    int t_max = 0;
    std::vector<std::string> kinds{"all-closed-form"};
    std::string out;
    std::string format = "csv";
};

int run_bounds(const BoundsArgs& args) {
    std::vector<BoundKind> kinds;
    for (const std::string& name : args.kinds) {
        if (name == "all-closed-form") {
            for (BoundKind k : nfl::bounds::closed_form_kinds()) kinds.push_back(k);
            continue;
        }
        const auto kind = nfl::bounds::bound_kind_from_string(name);
        if (!kind) throw nfl::InvalidArgs("unknown bound kind '" + name + "'");
        if (*kind == BoundKind::classical_bistochastic_mc)
            throw nfl::InvalidArgs(
                "classical_bistochastic_mc is Monte Carlo; use the classical-mc command");
        kinds.push_back(*kind);
    }

    std::vector<BoundCurve> curves;
    for (BoundKind k : kinds)
        curves.push_back(nfl::bounds::closed_form_curve(k, args.d, args.r, args.t_max));

    std::string payload;
    if (args.format == "json") {
        nlohmann::json doc = nlohmann::json::array();
        for (const BoundCurve& c : curves) {
            nlohmann::json points = nlohmann::json::array();
            for (const auto& p : c.points)
                points.push_back({{"t", p.t}, {"value", p.value}});
            doc.push_back({{"kind", nfl::bounds::to_string(c.kind)},
                           {"d", c.d},
                           {"r", c.r},
                           {"points", std::move(points)}});
        }
        payload = doc.dump(2) + "\n";
    } else {
        payload = "kind,d,r,t,value,stderr\n";
        for (const BoundCurve& c : curves)
            for (const auto& p : c.points)
                payload += std::string(nfl::bounds::to_string(c.kind)) + ',' +
                           std::to_string(c.d) + ',' + std::to_string(c.r) + ',' +
                           std::to_string(p.t) + ',' + fmt(p.value) + ",0\n";
    }
    write_or_print(args.out, payload);
    return kExitOk;
}

// ---- sweep -----------------------------------------------------------------

int run_sweep_cmd(const std::string& config_path, int threads) {
    std::ifstream in(config_path);
    if (!in) {
        std::cerr << "error: cannot read config file " << config_path << "\n";
        return kExitValidation;
    }
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "error: config is not valid JSON: " << e.what() << "\n";
        return kExitValidation;
    }
    const auto cfg = nfl::experiments::ExperimentConfig::from_json(doc);
    const auto result = nfl::experiments::run_sweep(cfg, threads);
    nfl::experiments::write_result(result, nfl::experiments::OutputFormat::json);
    nfl::experiments::write_result(result, nfl::experiments::OutputFormat::csv);

    std::printf("%4s %4s %12s %12s %12s %12s %8s\n", "r", "t", "mean_risk", "sample_std",
                "stderr", "qnfl_bound", "misses");
    for (const auto& s : result.grid)
        std::printf("%4d %4d %12.6f %12.6f %12.6f %12.6f %8d\n", s.r, s.t, s.mean_risk,
                    s.sample_std, s.stderr, nfl::bounds::quantum_nfl_bound(s.d, s.r, s.t),
                    s.non_converged);
    std::printf("wrote result.json, grid.csv, bounds.csv under %s (%.1f s)\n",
                cfg.output_path.c_str(), result.wall_time_seconds);
    return kExitOk;
}

// ---- verify-haar -----------------------------------------------------------

int run_verify_haar(int d, int samples, std::uint64_t seed) {
    if (samples < 1000) {
        std::cerr << "error: --samples must be at least 1000 for meaningful z-scores\n";
        return kExitValidation;
    }
    const auto checks = nfl::sampling::haar_moment_checks(d, samples, SeedSpec{seed, 0});
    std::printf("%-24s %12s %8s %12s %8s\n", "check", "empirical", "exact", "stderr", "z");
    bool pass = true;
    for (const auto& c : checks) {
        std::printf("%-24s %12.6f %8.3f %12.6f %8.3f\n", c.name, c.empirical, c.exact, c.stderr,
                    c.z);
        pass = pass && std::abs(c.z) <= 4.0;
    }
    std::printf("%s\n", pass ? "all |z| <= 4" : "FAILED: |z| > 4");
    return pass ? kExitOk : kExitRuntime;
}

// ---- classical-mc ----------------------------------------------------------

int run_classical_mc_cmd(const std::string& kind, int d, int t, int matrices,
                         std::uint64_t seed) {
    if (kind == "bistochastic") {
        if (t >= d) {
            std::cerr << "error: bistochastic bound needs t < d\n";
            return kExitValidation;
        }
        const auto est =
            nfl::bounds::bistochastic_mc_bound(d, t, matrices, SeedSpec{seed, 0});
        std::printf("bistochastic MC bound  d=%d t=%d n=%d\n", d, t, matrices);
        std::printf("  value   %s\n  stderr  %s\n", fmt(est.value).c_str(),
                    fmt(est.stderr).c_str());
        std::printf("  analytic lower bound  %s\n",
                    fmt(nfl::bounds::bistochastic_analytic_bound(d, t)).c_str());
        std::printf("  stochastic bound      %s\n",
                    fmt(nfl::bounds::classical_stochastic_bound(d, t)).c_str());
        return kExitOk;
    }
    if (kind == "stochastic-oracle") {
        const auto est = nfl::bounds::stochastic_F_oracle(d, matrices, SeedSpec{seed, 0});
        const double closed = nfl::bounds::stochastic_F(d);
        const double z = est.stderr > 0.0 ? (est.value - closed) / est.stderr : 0.0;
        std::printf("stochastic F(d) oracle  d=%d samples=%d\n", d, matrices);
        std::printf("  estimate     %s\n  stderr       %s\n", fmt(est.value).c_str(),
                    fmt(est.stderr).c_str());
        std::printf("  closed form  %s\n  z            %.3f\n", fmt(closed).c_str(), z);
        return std::abs(z) <= 4.0 ? kExitOk : kExitRuntime;
    }
    std::cerr << "error: --kind must be bistochastic or stochastic-oracle\n";
    return kExitValidation;
}

// ---- thresholds ------------------------------------------------------------

int run_thresholds(int d, int t_max, const std::string& out, int matrices,
                   std::uint64_t seed) {
    const std::vector<BoundKind> kinds = {
        BoundKind::classical_permutation, BoundKind::classical_deterministic,
        BoundKind::classical_bistochastic_mc, BoundKind::classical_stochastic};
    std::string payload = "kind,d,t,threshold_real,threshold_ceil\n";
    for (BoundKind kind : kinds)
        for (int t = 1; t <= t_max; ++t) {
            nfl::bounds::ThresholdMcParams mc{matrices,
                                              SeedSpec{seed, 0}.substream(static_cast<std::uint64_t>(t))};
            const double raw = nfl::bounds::rank_threshold(kind, d, t, mc);
            // A rank below 1 is meaningless: once r = 1 violates the bound the
            // reported threshold floors at 1.
            const double real = std::max(1.0, raw);
            const int ceiling = static_cast<int>(std::ceil(real - 1e-9));
            payload += std::string(nfl::bounds::to_string(kind)) + ',' + std::to_string(d) +
                       ',' + std::to_string(t) + ',' + fmt(real) + ',' +
                       std::to_string(ceiling) + '\n';
        }
    write_or_print(out, payload);
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"No-free-lunch theorems for entangled training data: bounds, "
                 "Monte Carlo sweeps and verification"};
    app.require_subcommand(1);

    BoundsArgs bounds_args;
    CLI::App* bounds_cmd = app.add_subcommand("bounds", "Closed-form bound curves over t");
    bounds_cmd->add_option("--d", bounds_args.d, "Hilbert space dimension")->required();
    bounds_cmd->add_option("--r", bounds_args.r, "Schmidt rank for the quantum curve");
    bounds_cmd->add_option("--t-max", bounds_args.t_max, "largest t")->required();
    bounds_cmd->add_option("--kinds", bounds_args.kinds,
                           "bound kinds (or all-closed-form)")
        ->delimiter(',');
    bounds_cmd->add_option("--out", bounds_args.out, "output file (stdout if omitted)");
    bounds_cmd->add_option("--format", bounds_args.format, "json or csv")
        ->check(CLI::IsMember({"json", "csv"}));

    std::string config_path;
    int threads = 0;
    CLI::App* sweep_cmd = app.add_subcommand("sweep", "Monte Carlo sweep from a JSON config");
    sweep_cmd->add_option("--config", config_path, "config file")->required();
    sweep_cmd->add_option("--threads", threads, "worker threads (default: all cores)");

    int vh_d = 0, vh_samples = 100000;
    std::uint64_t vh_seed = default_seed();
    CLI::App* vh_cmd =
        app.add_subcommand("verify-haar", "Monte Carlo check of Haar moment identities");
    vh_cmd->add_option("--d", vh_d, "dimension")->required()->check(CLI::Range(2, 1 << 20));
    vh_cmd->add_option("--samples", vh_samples, "number of Haar unitaries");
    vh_cmd->add_option("--seed", vh_seed, "master seed (default: NFL_LAB_SEED or built-in)");

    std::string mc_kind;
    int mc_d = 0, mc_t = 0, mc_matrices = 1000;
    std::uint64_t mc_seed = default_seed();
    CLI::App* mc_cmd = app.add_subcommand(
        "classical-mc", "Monte Carlo classical bounds and the stochastic F(d) oracle");
    mc_cmd->add_option("--kind", mc_kind, "bistochastic or stochastic-oracle")->required();
    mc_cmd->add_option("--d", mc_d, "dimension")->required()->check(CLI::Range(2, 1 << 20));
    mc_cmd->add_option("--t", mc_t, "training columns (bistochastic only)");
    mc_cmd->add_option("--matrices", mc_matrices, "matrices (or oracle samples)");
    mc_cmd->add_option("--seed", mc_seed, "master seed (default: NFL_LAB_SEED or built-in)");

    int th_d = 0, th_t_max = 0, th_matrices = 1000;
    std::string th_out;
    std::uint64_t th_seed = default_seed();
    CLI::App* th_cmd = app.add_subcommand(
        "thresholds", "Minimal Schmidt rank violating each classical bound");
    th_cmd->add_option("--d", th_d, "dimension")->required()->check(CLI::Range(2, 1 << 20));
    th_cmd->add_option("--t-max", th_t_max, "largest t")->required();
    th_cmd->add_option("--out", th_out, "output file (stdout if omitted)");
    th_cmd->add_option("--matrices", th_matrices, "matrices for the bistochastic MC bound");
    th_cmd->add_option("--seed", th_seed, "master seed (default: NFL_LAB_SEED or built-in)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitValidation;
    }

    try {
        if (*bounds_cmd) return run_bounds(bounds_args);
        if (*sweep_cmd) return run_sweep_cmd(config_path, threads);
        if (*vh_cmd) return run_verify_haar(vh_d, vh_samples, vh_seed);
        if (*mc_cmd) return run_classical_mc_cmd(mc_kind, mc_d, mc_t, mc_matrices, mc_seed);
        if (*th_cmd) return run_thresholds(th_d, th_t_max, th_out, th_matrices, th_seed);
    } catch (const nfl::ConfigInvalid& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitRuntime;
    }
    return kExitValidation;
}
