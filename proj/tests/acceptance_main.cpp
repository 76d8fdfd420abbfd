// Acceptance suite: one pass/fail line per criterion, exit 0 iff all pass.
//
// The large d = 64 sweep runs through the real CLI twice (different thread
// counts); its result.json feeds the saturation, zero-risk and fluctuation
// checks as well as the byte-identity determinism check.

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "nfl/bounds.hpp"
#include "nfl/experiments.hpp"
#include "nfl/learning.hpp"
#include "nfl/sampling.hpp"

namespace fs = std::filesystem;
using nfl::bounds::BoundKind;
using nfl::sampling::SeedSpec;

namespace {

struct Criterion {
    int number;
    std::string title;
    bool pass = false;
    std::string detail;
};

std::string cli_path() { return NFL_CLI_PATH; }
std::string config_dir() { return NFL_CONFIG_DIR; }

bool run_cli(const std::string& args) {
    const std::string command = cli_path() + " " + args + " > /dev/null";
    return std::system(command.c_str()) == 0;
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

nfl::experiments::ExperimentResult load_result(const fs::path& path) {
    return nfl::experiments::result_from_json(nlohmann::json::parse(slurp(path)));
}

}  // namespace

int main() {
    std::vector<Criterion> criteria;
    const fs::path out_dir = "out/fig3";
    const fs::path run_a = "out/fig3_run_a.json";

    // Fig. 3 sweep, twice through the CLI at different thread counts.
    std::fprintf(stderr, "[acceptance] running the d=64 sweep (run 1/2, --threads 4)...\n");
    const bool sweep_a_ok =
        run_cli("sweep --config " + config_dir() + "/fig3.json --threads 4");
    if (sweep_a_ok) fs::rename(out_dir / "result.json", run_a);
    std::fprintf(stderr, "[acceptance] running the d=64 sweep (run 2/2, --threads 1)...\n");
    const bool sweep_b_ok =
        run_cli("sweep --config " + config_dir() + "/fig3.json --threads 1");

    // 1. saturation of the quantum bound across the (r, t) grid
    {
        Criterion c{1, "quantum NFL saturation over the d=64 grid (10x100 trials/point)"};
        if (sweep_a_ok) {
            const auto result = load_result(run_a);
            int total = 0, within = 0;
            for (const auto& s : result.grid) {
                ++total;
                const double bound = nfl::bounds::quantum_nfl_bound(s.d, s.r, s.t);
                if (std::abs(s.mean_risk - bound) <= 3.0 * s.stderr ||
                    (s.stderr == 0.0 && std::abs(s.mean_risk - bound) <= 1e-10))
                    ++within;
            }
            std::ostringstream detail;
            detail << within << "/" << total << " grid points within 3*stderr";
            c.detail = detail.str();
            c.pass = total == 127 && within >= static_cast<int>(std::ceil(0.95 * total));
        } else {
            c.detail = "sweep failed to run";
        }
        criteria.push_back(c);
    }

    // 2. exact zero risk on every full-rank trial
    {
        Criterion c{2, "zero risk on every trial with r*t = d"};
        if (sweep_a_ok) {
            const auto result = load_result(run_a);
            double worst = 0.0;
            int points = 0;
            for (const auto& s : result.grid)
                if (s.r * s.t == s.d) {
                    ++points;
                    worst = std::max(worst, s.max_risk);
                }
            std::ostringstream detail;
            detail << points << " grid points, max single-trial risk " << worst;
            c.detail = detail.str();
            c.pass = points == 7 && worst <= 1e-10;
        } else {
            c.detail = "sweep failed to run";
        }
        criteria.push_back(c);
    }

    // 3. risk fluctuations against the closed form
    {
        Criterion c{3, "sample std within 15% of the predicted fluctuation"};
        if (sweep_a_ok) {
            const auto result = load_result(run_a);
            bool ok = true;
            double worst_rel = 0.0;
            for (const auto& s : result.grid) {
                if (s.n_unitaries * s.n_sets < 500) continue;
                const double predicted = nfl::bounds::quantum_risk_std(s.d, s.r, s.t);
                if (s.r * s.t == s.d) {
                    ok = ok && s.sample_std <= 1e-10;
                } else {
                    const double rel = std::abs(s.sample_std - predicted) / predicted;
                    worst_rel = std::max(worst_rel, rel);
                    ok = ok && rel <= 0.15;
                }
            }
            std::ostringstream detail;
            detail << "worst relative deviation " << worst_rel;
            c.detail = detail.str();
            c.pass = ok;
        } else {
            c.detail = "sweep failed to run";
        }
        criteria.push_back(c);
    }

    // 4. d = 2 variational stand-in for the hardware experiment
    {
        Criterion c{4, "d=2 variational learner against the rank-1 and rank-2 bounds"};
        std::fprintf(stderr, "[acceptance] running the d=2 variational sweep...\n");
        std::ifstream in(config_dir() + "/fig2.json");
        nlohmann::json doc;
        in >> doc;
        const auto cfg = nfl::experiments::ExperimentConfig::from_json(doc);
        const auto result = nfl::experiments::run_sweep(cfg, 0);
        double m11 = -1.0, m21 = -1.0;
        for (const auto& s : result.grid) {
            if (s.r == 1 && s.t == 1) m11 = s.mean_risk;
            if (s.r == 2 && s.t == 1) m21 = s.mean_risk;
        }
        std::ostringstream detail;
        detail << "mean risk (r=1,t=1) = " << m11 << ", (r=2,t=1) = " << m21;
        c.detail = detail.str();
        c.pass = m11 >= 1.0 / 3.0 && m11 <= 1.0 / 3.0 + 0.05 && m21 >= 0.0 && m21 <= 0.02;
        criteria.push_back(c);
    }

    // 5. closed-form F(d) against its Monte Carlo oracle
    {
        Criterion c{5, "stochastic F(d) matches the Haar-state oracle at 1e6 samples"};
        std::fprintf(stderr, "[acceptance] running the stochastic F oracle...\n");
        bool ok = std::abs(nfl::bounds::stochastic_F(2) - std::exp(2.0) / 12.0) <=
                  1e-14 * std::exp(2.0) / 12.0;
        std::ostringstream detail;
        detail << "z =";
        for (int d : {2, 4, 8, 64}) {
            const auto est = nfl::bounds::stochastic_F_oracle(
                d, 1000000, SeedSpec{505, static_cast<std::uint64_t>(d)});
            const double z = (est.value - nfl::bounds::stochastic_F(d)) / est.stderr;
            detail << " " << z;
            ok = ok && std::abs(z) <= 4.0;
        }
        c.detail = detail.str() + " (d = 2, 4, 8, 64)";
        c.pass = ok;
        criteria.push_back(c);
    }

    // 6. bistochastic Monte Carlo bound consistency
    {
        Criterion c{6, "bistochastic MC bound anchors, pins d=2 t=1, sits in the sandwich"};
        std::fprintf(stderr, "[acceptance] running the bistochastic MC bound checks...\n");
        const auto anchor = nfl::bounds::bistochastic_mc_bound(8, 0, 1000, SeedSpec{606, 0});
        const double anchor_gap =
            std::abs(anchor.value - nfl::bounds::classical_stochastic_bound(8, 0));
        bool ok = anchor_gap <= 3.0 * anchor.stderr;

        const auto pinned = nfl::bounds::bistochastic_mc_bound(2, 1, 1000, SeedSpec{606, 1});
        ok = ok && pinned.value <= 1e-12;

        bool sandwich = true;
        for (int t = 1; t < 8; ++t) {
            const auto est = nfl::bounds::bistochastic_mc_bound(
                8, t, 1000, SeedSpec{606, 2 + static_cast<std::uint64_t>(t)});
            sandwich = sandwich &&
                       est.value + 3.0 * est.stderr >=
                           nfl::bounds::bistochastic_analytic_bound(8, t) &&
                       est.value - 3.0 * est.stderr <=
                           nfl::bounds::classical_stochastic_bound(8, t);
        }
        ok = ok && sandwich;
        std::ostringstream detail;
        detail << "anchor gap " << anchor_gap << " (3*stderr " << 3.0 * anchor.stderr
               << "), d=2 t=1 value " << pinned.value << ", sandwich "
               << (sandwich ? "holds" : "broken");
        c.detail = detail.str();
        c.pass = ok;
        criteria.push_back(c);
    }

    // 7. Haar moment identities
    {
        Criterion c{7, "Haar moments |z| <= 4 at 1e5 samples for d = 2, 3, 4, 8"};
        std::fprintf(stderr, "[acceptance] running the Haar moment checks...\n");
        bool ok = true;
        double worst = 0.0;
        for (int d : {2, 3, 4, 8}) {
            const auto checks = nfl::sampling::haar_moment_checks(
                d, 100000, SeedSpec{707, static_cast<std::uint64_t>(d)});
            for (const auto& check : checks) {
                worst = std::max(worst, std::abs(check.z));
                ok = ok && std::abs(check.z) <= 4.0;
            }
        }
        std::ostringstream detail;
        detail << "worst |z| = " << worst;
        c.detail = detail.str();
        c.pass = ok;
        criteria.push_back(c);
    }

    // 8. rank-threshold table ordering
    {
        Criterion c{8, "threshold table ordering at d=8 and exact permutation threshold"};
        std::fprintf(stderr, "[acceptance] running the rank-threshold table...\n");
        bool ok = nfl::bounds::rank_threshold(BoundKind::classical_permutation, 8, 1) == 3.0;
        bool ordered = true;
        for (int t = 1; t <= 8; ++t) {
            nfl::bounds::ThresholdMcParams mc{1000,
                                              SeedSpec{808, static_cast<std::uint64_t>(t)}};
            const auto ceil_of = [&](BoundKind kind) {
                const double real = std::max(1.0, nfl::bounds::rank_threshold(kind, 8, t, mc));
                return static_cast<int>(std::ceil(real - 1e-9));
            };
            const int perm = ceil_of(BoundKind::classical_permutation);
            const int det = ceil_of(BoundKind::classical_deterministic);
            const int bis = ceil_of(BoundKind::classical_bistochastic_mc);
            const int sto = ceil_of(BoundKind::classical_stochastic);
            ordered = ordered && perm >= det && det >= bis && bis >= sto;
        }
        ok = ok && ordered;
        std::ostringstream detail;
        detail << "integer thresholds " << (ordered ? "ordered" : "out of order")
               << ", permutation threshold(t=1) = "
               << nfl::bounds::rank_threshold(BoundKind::classical_permutation, 8, 1);
        c.detail = detail.str();
        c.pass = ok;
        criteria.push_back(c);
    }

    // 9. byte-identical artifacts across thread counts
    {
        Criterion c{9, "byte-identical result.json across --threads 4 and --threads 1"};
        if (sweep_a_ok && sweep_b_ok) {
            const std::string a = slurp(run_a);
            const std::string b = slurp(out_dir / "result.json");
            c.pass = !a.empty() && a == b;
            std::ostringstream detail;
            detail << a.size() << " bytes" << (c.pass ? ", identical" : ", DIFFER");
            c.detail = detail.str();
        } else {
            c.detail = "sweep failed to run";
        }
        criteria.push_back(c);
    }

    bool all = true;
    for (const auto& c : criteria) {
        std::printf("criterion %d: %-4s %s (%s)\n", c.number, c.pass ? "PASS" : "FAIL",
                    c.title.c_str(), c.detail.c_str());
        all = all && c.pass;
    }
    std::printf("%s\n", all ? "acceptance: all criteria passed"
                            : "acceptance: at least one criterion failed");
    return all ? 0 : 1;
}
