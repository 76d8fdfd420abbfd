#include "nfl/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <thread>

#include <nlohmann/json.hpp>

namespace nfl::experiments {

using nlohmann::json;
using sampling::RandomStream;

namespace {

// Stream tags keep target unitaries, training sets, learner randomness and
// bound curves on disjoint substreams, so e.g. changing n_sets never perturbs
// the unitary sequence.
enum StreamTag : std::uint64_t {
    kTagUnitary = 1,
    kTagTrainingSet = 2,
    kTagLearner = 3,
    kTagBounds = 4,
};

SeedSpec sweep_stream(std::uint64_t master, StreamTag tag, std::uint64_t point,
                      std::uint64_t unitary = 0, std::uint64_t set = 0) {
    return SeedSpec{master, 0}
        .substream(tag)
        .substream(point)
        .substream(unitary)
        .substream(set);
}

int resolve_threads(int threads) {
    if (threads > 0) return threads;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

void parallel_for(int n, int threads, const std::function<void(int)>& body) {
    threads = std::clamp(resolve_threads(threads), 1, std::max(1, n));
    if (threads == 1) {
        for (int i = 0; i < n; ++i) body(i);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (int w = 0; w < threads; ++w)
        pool.emplace_back([&] {
            for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) body(i);
        });
    for (std::thread& th : pool) th.join();
}

}  // namespace

void ExperimentConfig::validate() const {
    if (d < 2) throw ConfigInvalid("d", "must be >= 2");
    if (r_values.empty()) throw ConfigInvalid("r_values", "must not be empty");
    for (int r : r_values)
        if (r < 1 || r > d) throw ConfigInvalid("r_values", "entries must satisfy 1 <= r <= d");
    if (t_values.empty()) throw ConfigInvalid("t_values", "must not be empty");
    for (int t : t_values)
        if (t < 0) throw ConfigInvalid("t_values", "entries must be >= 0");
    if (n_unitaries < 1) throw ConfigInvalid("n_unitaries", "must be >= 1");
    if (n_sets < 1) throw ConfigInvalid("n_sets", "must be >= 1");
    try {
        optimizer.validate();
    } catch (const InvalidArgs& e) {
        throw ConfigInvalid("optimizer", e.what());
    }
    if (output_path.empty()) throw ConfigInvalid("output_path", "must not be empty");
}

namespace {

LearnerMethod learner_from_string(const std::string& name) {
    if (name == "perfect") return LearnerMethod::perfect;
    if (name == "variational") return LearnerMethod::variational;
    if (name == "variational_shots") return LearnerMethod::variational_shots;
    throw ConfigInvalid("learner", "unknown learner '" + name + "'");
}

SetStyle style_from_string(const std::string& name) {
    if (name == "orthonormal") return SetStyle::orthonormal;
    if (name == "generic") return SetStyle::generic;
    throw ConfigInvalid("set_style", "unknown style '" + name + "'");
}

template <typename T>
T take(const json& doc, const char* key, T fallback) {
    if (!doc.contains(key)) return fallback;
    try {
        return doc.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ConfigInvalid(key, e.what());
    }
}

}  // namespace

ExperimentConfig ExperimentConfig::from_json(const json& doc) {
    static const std::vector<std::string> known = {
        "d",         "r_values",  "t_values",    "n_unitaries",      "n_sets",
        "learner",   "set_style", "optimizer",   "master_seed",      "bounds_requested",
        "output_path"};
    if (!doc.is_object()) throw ConfigInvalid("<root>", "config must be a JSON object");
    for (const auto& [key, value] : doc.items())
        if (std::find(known.begin(), known.end(), key) == known.end())
            throw ConfigInvalid(key, "unknown key");

    ExperimentConfig cfg;
    if (!doc.contains("d")) throw ConfigInvalid("d", "missing");
    cfg.d = take<int>(doc, "d", 0);
    if (!doc.contains("r_values")) throw ConfigInvalid("r_values", "missing");
    cfg.r_values = take<std::vector<int>>(doc, "r_values", {});
    if (!doc.contains("t_values")) throw ConfigInvalid("t_values", "missing");
    cfg.t_values = take<std::vector<int>>(doc, "t_values", {});
    cfg.n_unitaries = take<int>(doc, "n_unitaries", cfg.n_unitaries);
    cfg.n_sets = take<int>(doc, "n_sets", cfg.n_sets);
    cfg.learner = learner_from_string(take<std::string>(doc, "learner", "perfect"));
    cfg.set_style = style_from_string(take<std::string>(doc, "set_style", "generic"));

    if (doc.contains("optimizer")) {
        const json& opt = doc.at("optimizer");
        if (!opt.is_object()) throw ConfigInvalid("optimizer", "must be an object");
        static const std::vector<std::string> opt_known = {
            "max_iters", "cost_tol", "learning_rate", "fd_step", "shots", "restarts"};
        for (const auto& [key, value] : opt.items())
            if (std::find(opt_known.begin(), opt_known.end(), key) == opt_known.end())
                throw ConfigInvalid("optimizer." + key, "unknown key");
        cfg.optimizer.max_iters = take<int>(opt, "max_iters", cfg.optimizer.max_iters);
        cfg.optimizer.cost_tol = take<double>(opt, "cost_tol", cfg.optimizer.cost_tol);
        cfg.optimizer.learning_rate =
            take<double>(opt, "learning_rate", cfg.optimizer.learning_rate);
        cfg.optimizer.fd_step = take<double>(opt, "fd_step", cfg.optimizer.fd_step);
        cfg.optimizer.restarts = take<int>(opt, "restarts", cfg.optimizer.restarts);
        if (opt.contains("shots") && !opt.at("shots").is_null())
            cfg.optimizer.shots = take<int>(opt, "shots", 0);
    }

    if (doc.contains("master_seed")) {
        cfg.master_seed = take<std::uint64_t>(doc, "master_seed", cfg.master_seed);
    } else if (const char* env = std::getenv("NFL_LAB_SEED")) {
        cfg.master_seed = std::strtoull(env, nullptr, 10);
    }

    if (doc.contains("bounds_requested")) {
        cfg.bounds_requested.clear();
        for (const std::string& name : take<std::vector<std::string>>(doc, "bounds_requested", {})) {
            const auto kind = bounds::bound_kind_from_string(name);
            if (!kind) throw ConfigInvalid("bounds_requested", "unknown bound kind '" + name + "'");
            cfg.bounds_requested.push_back(*kind);
        }
    }
    cfg.output_path = take<std::string>(doc, "output_path", cfg.output_path);
    cfg.validate();
    return cfg;
}

json ExperimentConfig::to_json() const {
    json opt{{"max_iters", optimizer.max_iters},
             {"cost_tol", optimizer.cost_tol},
             {"learning_rate", optimizer.learning_rate},
             {"fd_step", optimizer.fd_step},
             {"restarts", optimizer.restarts}};
    opt["shots"] = optimizer.shots ? json(*optimizer.shots) : json(nullptr);

    std::vector<std::string> kinds;
    kinds.reserve(bounds_requested.size());
    for (BoundKind k : bounds_requested) kinds.emplace_back(bounds::to_string(k));

    return json{{"d", d},
                {"r_values", r_values},
                {"t_values", t_values},
                {"n_unitaries", n_unitaries},
                {"n_sets", n_sets},
                {"learner", learning::to_string(learner)},
                {"set_style", sampling::to_string(set_style)},
                {"optimizer", opt},
                {"master_seed", master_seed},
                {"bounds_requested", kinds},
                {"output_path", output_path}};
}

namespace {

struct GridPoint {
    int r = 0, t = 0;
    std::uint64_t index = 0;  // position in the effective grid, seeds derive from it
};

std::vector<GridPoint> effective_grid(const ExperimentConfig& cfg) {
    std::vector<GridPoint> grid;
    std::uint64_t index = 0;
    for (int r : cfg.r_values)
        for (int t : cfg.t_values) {
            if (static_cast<long long>(r) * t > cfg.d) {
                std::clog << "run_sweep: skipping grid point r=" << r << " t=" << t
                          << " (r*t exceeds d=" << cfg.d << "; risk is identically zero)\n";
                ++index;  // keep seeds stable whether or not neighbours are skipped
                continue;
            }
            grid.push_back({r, t, index++});
        }
    return grid;
}

RiskStats sweep_point(const ExperimentConfig& cfg, const GridPoint& point, int threads) {
    const int trials = cfg.n_unitaries * cfg.n_sets;
    std::vector<learning::UnitaryOperator> targets;
    targets.reserve(cfg.n_unitaries);
    for (int i = 0; i < cfg.n_unitaries; ++i)
        targets.push_back(sampling::haar_unitary(
            cfg.d, sweep_stream(cfg.master_seed, kTagUnitary, point.index, i)));

    std::vector<double> risks(trials);
    std::vector<unsigned char> missed(trials, 0);
    parallel_for(trials, threads, [&](int trial) {
        const int i = trial / cfg.n_sets;
        const int j = trial % cfg.n_sets;
        const sampling::TrainingSet s = sampling::training_set(
            targets[i], cfg.d, point.r, point.t, cfg.set_style,
            sweep_stream(cfg.master_seed, kTagTrainingSet, point.index, i, j));
        const SeedSpec learner_seed =
            sweep_stream(cfg.master_seed, kTagLearner, point.index, i, j);
        learning::HypothesisResult hypothesis =
            cfg.learner == LearnerMethod::perfect
                ? learning::perfect_learner(targets[i], s, learner_seed)
                : learning::variational_learner(targets[i], s, cfg.optimizer, learner_seed);
        risks[trial] = learning::risk(targets[i], hypothesis.v);
        missed[trial] = hypothesis.converged ? 0 : 1;
    });

    RiskStats stats;
    stats.d = cfg.d;
    stats.r = point.r;
    stats.t = point.t;
    stats.n_unitaries = cfg.n_unitaries;
    stats.n_sets = cfg.n_sets;
    double sum = 0.0;
    for (int k = 0; k < trials; ++k) {
        sum += risks[k];
        stats.max_risk = std::max(stats.max_risk, risks[k]);
        stats.non_converged += missed[k];
    }
    stats.mean_risk = sum / trials;
    if (trials > 1) {
        double ss = 0.0;
        for (double x : risks) ss += (x - stats.mean_risk) * (x - stats.mean_risk);
        stats.sample_std = std::sqrt(ss / (trials - 1));
    }
    stats.stderr = stats.sample_std / std::sqrt(static_cast<double>(trials));
    return stats;
}

}  // namespace

BoundCurve run_classical_mc(BoundKind kind, int d, std::vector<int> t_values,
                            int n_matrices, SeedSpec seed, int threads) {
    if (kind != BoundKind::classical_bistochastic_mc)
        throw InvalidArgs("run_classical_mc: only classical_bistochastic_mc is Monte Carlo");
    std::sort(t_values.begin(), t_values.end());
    t_values.erase(std::unique(t_values.begin(), t_values.end()), t_values.end());
    BoundCurve curve{kind, d, 1, {}};
    curve.points.reserve(t_values.size());
    for (int t : t_values) {
        if (t >= d) {
            curve.points.push_back({t, 0.0, 0.0});
            continue;
        }
        const bounds::McEstimate est = bounds::bistochastic_mc_bound(
            d, t, n_matrices, seed.substream(static_cast<std::uint64_t>(t)), threads);
        curve.points.push_back({t, est.value, est.stderr});
    }
    curve.validate();
    return curve;
}

ExperimentResult run_sweep(const ExperimentConfig& cfg, int threads) {
    cfg.validate();
    const auto started = std::chrono::steady_clock::now();

    ExperimentResult result;
    result.config_echo = cfg;
    for (const GridPoint& point : effective_grid(cfg))
        result.grid.push_back(sweep_point(cfg, point, threads));

    const int t_max = *std::max_element(cfg.t_values.begin(), cfg.t_values.end());
    std::vector<int> curve_ts(t_max + 1);
    for (int t = 0; t <= t_max; ++t) curve_ts[t] = t;
    for (BoundKind kind : cfg.bounds_requested) {
        if (kind == BoundKind::quantum_nfl) {
            for (int r : cfg.r_values)
                result.curves.push_back(bounds::closed_form_curve(kind, cfg.d, r, t_max));
        } else if (kind == BoundKind::classical_bistochastic_mc) {
            result.curves.push_back(run_classical_mc(
                kind, cfg.d, curve_ts, 1000,
                sweep_stream(cfg.master_seed, kTagBounds, 0), threads));
        } else {
            result.curves.push_back(bounds::closed_form_curve(kind, cfg.d, 1, t_max));
        }
    }

    result.wall_time_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    return result;
}

namespace {

json risk_stats_to_json(const RiskStats& s) {
    return json{{"d", s.d},
                {"r", s.r},
                {"t", s.t},
                {"n_unitaries", s.n_unitaries},
                {"n_sets", s.n_sets},
                {"mean_risk", s.mean_risk},
                {"sample_std", s.sample_std},
                {"stderr", s.stderr},
                {"max_risk", s.max_risk},
                {"non_converged", s.non_converged}};
}

RiskStats risk_stats_from_json(const json& doc) {
    RiskStats s;
    s.d = doc.at("d").get<int>();
    s.r = doc.at("r").get<int>();
    s.t = doc.at("t").get<int>();
    s.n_unitaries = doc.at("n_unitaries").get<int>();
    s.n_sets = doc.at("n_sets").get<int>();
    s.mean_risk = doc.at("mean_risk").get<double>();
    s.sample_std = doc.at("sample_std").get<double>();
    s.stderr = doc.at("stderr").get<double>();
    s.max_risk = doc.at("max_risk").get<double>();
    s.non_converged = doc.at("non_converged").get<int>();
    return s;
}

json curve_to_json(const BoundCurve& c) {
    json points = json::array();
    for (const bounds::BoundPoint& p : c.points) {
        json entry{{"t", p.t}, {"value", p.value}};
        if (p.stderr) entry["stderr"] = *p.stderr;
        points.push_back(std::move(entry));
    }
    return json{{"kind", bounds::to_string(c.kind)}, {"d", c.d}, {"r", c.r},
                {"points", std::move(points)}};
}

BoundCurve curve_from_json(const json& doc) {
    BoundCurve c;
    c.kind = *bounds::bound_kind_from_string(doc.at("kind").get<std::string>());
    c.d = doc.at("d").get<int>();
    c.r = doc.at("r").get<int>();
    for (const json& entry : doc.at("points")) {
        bounds::BoundPoint p;
        p.t = entry.at("t").get<int>();
        p.value = entry.at("value").get<double>();
        if (entry.contains("stderr")) p.stderr = entry.at("stderr").get<double>();
        c.points.push_back(p);
    }
    return c;
}

std::string format_double(double x) {
    char buffer[64];
    std::snprintf(buffer, sizeof(buffer), "%.17g", x);
    return buffer;
}

}  // namespace

json result_to_json(const ExperimentResult& res) {
    json grid = json::array();
    for (const RiskStats& s : res.grid) grid.push_back(risk_stats_to_json(s));
    json curves = json::array();
    for (const BoundCurve& c : res.curves) curves.push_back(curve_to_json(c));
    return json{{"config_echo", res.config_echo.to_json()},
                {"grid", std::move(grid)},
                {"curves", std::move(curves)},
                {"code_version", res.code_version}};
}

ExperimentResult result_from_json(const json& doc) {
    ExperimentResult res;
    res.config_echo = ExperimentConfig::from_json(doc.at("config_echo"));
    for (const json& entry : doc.at("grid")) res.grid.push_back(risk_stats_from_json(entry));
    for (const json& entry : doc.at("curves")) res.curves.push_back(curve_from_json(entry));
    res.code_version = doc.at("code_version").get<std::string>();
    return res;
}

void write_result(const ExperimentResult& res, OutputFormat format) {
    namespace fs = std::filesystem;
    const fs::path dir(res.config_echo.output_path);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError("cannot create output directory " + dir.string());

    const auto open = [&](const char* name) {
        std::ofstream out(dir / name, std::ios::binary);
        if (!out) throw IoError(std::string("cannot open ") + name + " for writing");
        return out;
    };

    if (format == OutputFormat::json) {
        std::ofstream out = open("result.json");
        out << result_to_json(res).dump(2) << '\n';
        return;
    }

    std::ofstream grid = open("grid.csv");
    grid << "d,r,t,n_unitaries,n_sets,mean_risk,sample_std,stderr,learner\n";
    for (const RiskStats& s : res.grid)
        grid << s.d << ',' << s.r << ',' << s.t << ',' << s.n_unitaries << ',' << s.n_sets
             << ',' << format_double(s.mean_risk) << ',' << format_double(s.sample_std) << ','
             << format_double(s.stderr) << ',' << learning::to_string(res.config_echo.learner)
             << '\n';

    std::ofstream curves = open("bounds.csv");
    curves << "kind,d,r,t,value,stderr\n";
    for (const BoundCurve& c : res.curves)
        for (const bounds::BoundPoint& p : c.points)
            curves << bounds::to_string(c.kind) << ',' << c.d << ',' << c.r << ',' << p.t << ','
                   << format_double(p.value) << ',' << format_double(p.stderr.value_or(0.0))
                   << '\n';
}

}  // namespace nfl::experiments
