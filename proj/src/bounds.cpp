#include "nfl/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

namespace nfl::bounds {

const char* to_string(BoundKind k) {
    switch (k) {
        case BoundKind::quantum_nfl: return "quantum_nfl";
        case BoundKind::classical_deterministic: return "classical_deterministic";
        case BoundKind::classical_permutation: return "classical_permutation";
        case BoundKind::classical_stochastic: return "classical_stochastic";
        case BoundKind::classical_bistochastic_analytic: return "classical_bistochastic_analytic";
        case BoundKind::classical_bistochastic_mc: return "classical_bistochastic_mc";
    }
    return "?";
}

std::optional<BoundKind> bound_kind_from_string(const std::string& name) {
    for (BoundKind k :
         {BoundKind::quantum_nfl, BoundKind::classical_deterministic,
          BoundKind::classical_permutation, BoundKind::classical_stochastic,
          BoundKind::classical_bistochastic_analytic, BoundKind::classical_bistochastic_mc})
        if (name == to_string(k)) return k;
    return std::nullopt;
}

std::vector<BoundKind> closed_form_kinds() {
    return {BoundKind::quantum_nfl, BoundKind::classical_deterministic,
            BoundKind::classical_permutation, BoundKind::classical_stochastic,
            BoundKind::classical_bistochastic_analytic};
}

std::vector<BoundKind> classical_kinds() {
    return {BoundKind::classical_deterministic, BoundKind::classical_permutation,
            BoundKind::classical_stochastic, BoundKind::classical_bistochastic_analytic,
            BoundKind::classical_bistochastic_mc};
}

namespace {

void require(bool ok, const char* what) {
    if (!ok) throw InvalidArgs(what);
}

double clamp01(double x) { return std::clamp(x, 0.0, 1.0); }

}  // namespace

double quantum_nfl_bound(int d, int r, int t) {
    require(d >= 2, "quantum_nfl_bound: d must be >= 2");
    require(r >= 1 && r <= d, "quantum_nfl_bound: need 1 <= r <= d");
    require(t >= 0, "quantum_nfl_bound: t must be >= 0");
    const double rt = static_cast<double>(r) * t;
    return clamp01(1.0 - (rt * rt + d + 1.0) / (d * (d + 1.0)));
}

double quantum_risk_std(int d, int r, int t) {
    require(d >= 2, "quantum_risk_std: d must be >= 2");
    require(r >= 1 && r <= d, "quantum_risk_std: need 1 <= r <= d");
    require(t >= 0, "quantum_risk_std: t must be >= 0");
    const double rt = static_cast<double>(r) * t;
    if (rt >= d) return 0.0;
    return std::sqrt(2.0 * rt * rt + 1.0) / (d * (d + 1.0));
}

double classical_deterministic_bound(int d, int t) {
    require(d >= 2, "classical_deterministic_bound: d must be >= 2");
    require(t >= 0, "classical_deterministic_bound: t must be >= 0");
    return clamp01((1.0 - static_cast<double>(t) / d) * (1.0 - 1.0 / d));
}

double classical_permutation_bound(int d, int t) {
    require(d >= 2, "classical_permutation_bound: d must be >= 2");
    require(t >= 0, "classical_permutation_bound: t must be >= 0");
    return clamp01(1.0 - (t + 1.0) / d);
}

double stochastic_F(int d) {
    require(d >= 2, "stochastic_F: d must be >= 2");
    const double dd = d;
    if (d <= 20) {
        return std::exp(2.0) * (dd - 1.0) / ((dd + 1.0) * std::pow(dd, dd + 1.0)) *
               (std::pow(dd - 2.0, dd + 1.0) + 2.0 * std::pow(dd - 1.0, dd));
    }
    // log-sum-exp of the two terms; safe since d−2 > 0 here.
    const double l1 = (dd + 1.0) * std::log(dd - 2.0);
    const double l2 = std::log(2.0) + dd * std::log(dd - 1.0);
    const double hi = std::max(l1, l2);
    const double sum = hi + std::log(std::exp(l1 - hi) + std::exp(l2 - hi));
    return std::exp(2.0 + std::log(dd - 1.0) - std::log(dd + 1.0) - (dd + 1.0) * std::log(dd) +
                    sum);
}

double classical_stochastic_bound(int d, int t) {
    require(d >= 2, "classical_stochastic_bound: d must be >= 2");
    require(t >= 0, "classical_stochastic_bound: t must be >= 0");
    return clamp01((1.0 - static_cast<double>(t) / d) * stochastic_F(d));
}

double bistochastic_analytic_bound(int d, int t) {
    require(d >= 2, "bistochastic_analytic_bound: d must be >= 2");
    require(t >= 0, "bistochastic_analytic_bound: t must be >= 0");
    return clamp01((1.0 / (1.0 + d)) * (1.0 - (t + 1.0) / d));
}

McEstimate bistochastic_mc_bound(int d, int t, int n_matrices, SeedSpec seed, int threads) {
    require(d >= 2, "bistochastic_mc_bound: d must be >= 2");
    require(t >= 0, "bistochastic_mc_bound: t must be >= 0");
    if (t >= d) throw DegenerateSplit("bistochastic_mc_bound: need t < d");
    require(n_matrices >= 1, "bistochastic_mc_bound: n_matrices must be >= 1");

    std::vector<double> per_matrix(n_matrices);
    const auto run_matrix = [&](int i) {
        const Eigen::MatrixXd b =
            sampling::random_bistochastic(d, seed.substream(static_cast<std::uint64_t>(i)))
                .entries();
        Eigen::VectorXd h = Eigen::VectorXd::Ones(d);
        for (int j = 0; j < t; ++j) h -= b.col(j);
        h /= static_cast<double>(d - t);
        double acc = 0.0;
        for (int x = t; x < d; ++x) {
            const double dist = 0.5 * (b.col(x) - h).cwiseAbs().sum();
            acc += dist * dist;
        }
        per_matrix[i] = acc / (d - t);
    };

    int n_threads = threads > 0 ? threads
                                : static_cast<int>(std::thread::hardware_concurrency());
    n_threads = std::clamp(n_threads, 1, n_matrices);
    if (n_threads == 1) {
        for (int i = 0; i < n_matrices; ++i) run_matrix(i);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(n_threads);
        for (int w = 0; w < n_threads; ++w)
            pool.emplace_back([&, w] {
                for (int i = w; i < n_matrices; i += n_threads) run_matrix(i);
            });
        for (std::thread& th : pool) th.join();
    }

    double sum = 0.0;
    for (double x : per_matrix) sum += x;
    const double grand_mean = sum / n_matrices;
    double var = 0.0;
    for (double x : per_matrix) var += (x - grand_mean) * (x - grand_mean);
    var = n_matrices > 1 ? var / (n_matrices - 1) : 0.0;

    const double scale = (1.0 - static_cast<double>(t) / d) * std::exp(2.0);
    return {scale * grand_mean, scale * std::sqrt(var / n_matrices)};
}

McEstimate stochastic_F_oracle(int d, int samples, SeedSpec seed) {
    require(d >= 2, "stochastic_F_oracle: d must be >= 2");
    require(samples >= 2, "stochastic_F_oracle: need at least 2 samples");
    sampling::RandomStream rng(seed);
    double sum = 0.0, sum_sq = 0.0;
    for (int i = 0; i < samples; ++i) {
        const linalg::ComplexVector psi = sampling::haar_pure_state(d, rng);
        double dist = 0.0;
        for (int l = 0; l < d; ++l) dist += std::abs(std::norm(psi(l)) - 1.0 / d);
        const double x = 0.25 * dist * dist;
        sum += x;
        sum_sq += x * x;
    }
    const double mean = sum / samples;
    const double var = std::max(0.0, (sum_sq - samples * mean * mean) / (samples - 1));
    const double scale = std::exp(2.0);
    return {scale * mean, scale * std::sqrt(var / samples)};
}

double rank_threshold(BoundKind kind, int d, int t,
                      const std::optional<ThresholdMcParams>& mc) {
    require(d >= 2, "rank_threshold: d must be >= 2");
    require(t >= 1, "rank_threshold: t must be >= 1");
    const double dd = d, tt = t;
    switch (kind) {
        case BoundKind::classical_permutation:
            return std::sqrt((dd + 1.0) / tt);
        case BoundKind::classical_deterministic:
            return std::sqrt((dd * dd - 1.0) / (dd * tt));
        case BoundKind::classical_stochastic: {
            const double b = classical_stochastic_bound(d, t);
            return std::sqrt(std::max(0.0, dd * (dd + 1.0) * (1.0 - b) - (dd + 1.0)) / (tt * tt));
        }
        case BoundKind::classical_bistochastic_analytic:
        case BoundKind::classical_bistochastic_mc: {
            double b = 0.0;
            if (kind == BoundKind::classical_bistochastic_analytic) {
                b = bistochastic_analytic_bound(d, t);
            } else if (t < d) {
                const ThresholdMcParams params = mc.value_or(ThresholdMcParams{});
                b = bistochastic_mc_bound(d, t, params.n_matrices, params.seed).value;
            }  // t >= d: no unknown columns, the bound is 0
            return std::sqrt(std::max(0.0, dd * (dd + 1.0) * (1.0 - b) - (dd + 1.0)) / (tt * tt));
        }
        case BoundKind::quantum_nfl:
            break;
    }
    throw InvalidArgs("rank_threshold: kind must be a classical bound");
}

void BoundCurve::validate() const {
    for (std::size_t i = 0; i < points.size(); ++i) {
        if (points[i].value < 0.0 || points[i].value > 1.0)
            throw InvalidArgs("BoundCurve: value outside [0, 1]");
        if (i > 0) {
            if (points[i].t <= points[i - 1].t)
                throw InvalidArgs("BoundCurve: t values must increase");
            double slack = 1e-12;
            if (points[i].stderr) slack += 3.0 * *points[i].stderr;
            if (points[i - 1].stderr) slack += 3.0 * *points[i - 1].stderr;
            if (points[i].value > points[i - 1].value + slack)
                throw InvalidArgs("BoundCurve: values must be non-increasing in t");
        }
    }
}

BoundCurve closed_form_curve(BoundKind kind, int d, int r, int t_max) {
    require(t_max >= 0, "closed_form_curve: t_max must be >= 0");
    require(kind != BoundKind::classical_bistochastic_mc,
            "closed_form_curve: MC bound has no closed form");
    BoundCurve curve{kind, d, kind == BoundKind::quantum_nfl ? r : 1, {}};
    curve.points.reserve(t_max + 1);
    for (int t = 0; t <= t_max; ++t) {
        double value = 0.0;
        switch (kind) {
            case BoundKind::quantum_nfl: value = quantum_nfl_bound(d, r, t); break;
            case BoundKind::classical_deterministic:
                value = classical_deterministic_bound(d, t);
                break;
            case BoundKind::classical_permutation:
                value = classical_permutation_bound(d, t);
                break;
            case BoundKind::classical_stochastic:
                value = classical_stochastic_bound(d, t);
                break;
            case BoundKind::classical_bistochastic_analytic:
                value = bistochastic_analytic_bound(d, t);
                break;
            case BoundKind::classical_bistochastic_mc: break;
        }
        curve.points.push_back({t, value, std::nullopt});
    }
    curve.validate();
    return curve;
}

}  // namespace nfl::bounds
