#pragma once

#include <optional>
#include <string>
#include <vector>

#include "nfl/sampling.hpp"

namespace nfl::bounds {

using sampling::SeedSpec;

enum class BoundKind {
    quantum_nfl,
    classical_deterministic,
    classical_permutation,
    classical_stochastic,
    classical_bistochastic_analytic,
    classical_bistochastic_mc,
};

const char* to_string(BoundKind k);
std::optional<BoundKind> bound_kind_from_string(const std::string& name);

/// The five kinds with closed-form values (everything but the MC bound).
std::vector<BoundKind> closed_form_kinds();
std::vector<BoundKind> classical_kinds();

/// Quantum NFL lower bound on the average risk:
/// max(0, 1 − (r²t² + d + 1) / (d(d+1))).
double quantum_nfl_bound(int d, int r, int t);

/// Standard deviation of the risk after perfect training:
/// √(2r²t² + 1) / (d(d+1)) for r·t < d, exactly 0 otherwise.
double quantum_risk_std(int d, int r, int t);

/// (1 − t/d)(1 − 1/d).
double classical_deterministic_bound(int d, int t);

/// max(0, 1 − (t+1)/d), the invertible-function bound.
double classical_permutation_bound(int d, int t);

/// Stochastic prefactor F(d) = e²(d−1)/((d+1)·d^{d+1}) · ((d−2)^{d+1} + 2(d−1)^d).
/// Evaluated in log space above d = 20 (d^{d+1} leaves double range near
/// d = 140 and sheds accuracy earlier). Tends to 1 as d → ∞.
double stochastic_F(int d);

/// (1 − t/d) · F(d).
double classical_stochastic_bound(int d, int t);

/// Closed-form lower bound for bistochastic maps, max(0, (1/(1+d))·(1 − (t+1)/d)).
/// Not tight: the derivation discards a non-negative integral.
double bistochastic_analytic_bound(int d, int t);

struct McEstimate {
    double value = 0.0;
    double stderr = 0.0;
};

/// Tighter bistochastic bound by Monte Carlo: over n random bistochastic
/// matrices, designate the first t columns as training, form the optimal
/// hypothesis h = (𝟙 − Σ_{i≤t} col_i)/(d−t) for every unknown column, and
/// average (½‖col − h‖₁)². Returns (1 − t/d) · e² · grand mean, with the
/// standard error propagated from the matrix-level sample variance.
/// Deterministic given (seed, n_matrices); parallel-safe per-matrix streams.
McEstimate bistochastic_mc_bound(int d, int t, int n_matrices, SeedSpec seed,
                                 int threads = 0);

/// Monte Carlo oracle for F(d): e² × mean over Haar states of
/// (½‖p − uniform‖₁)² with p the state's probability vector. Agrees with
/// stochastic_F within sampling error; both value and stderr carry the e².
McEstimate stochastic_F_oracle(int d, int samples, SeedSpec seed);

struct ThresholdMcParams {
    int n_matrices = 1000;
    SeedSpec seed{};
};

/// Real-valued minimal Schmidt rank r at which the quantum bound drops to the
/// classical bound of the given kind:
///   permutation    √((d+1)/t)
///   deterministic  √((d²−1)/(dt))
///   stochastic / bistochastic
///                  √(max(0, (d(d+1)(1 − B) − (d+1))) / t²)
/// where B is the corresponding classical bound value at (d, t); the
/// bistochastic B comes from bistochastic_mc_bound (0 for t ≥ d, where
/// nothing is left to estimate). Integer ceilings are a reporting concern.
double rank_threshold(BoundKind kind, int d, int t,
                      const std::optional<ThresholdMcParams>& mc = std::nullopt);

struct BoundPoint {
    int t = 0;
    double value = 0.0;
    std::optional<double> stderr;
};

/// One bound curve over t; values clamped to [0, 1] and non-increasing in t
/// (within Monte Carlo error for the MC kind).
struct BoundCurve {
    BoundKind kind = BoundKind::quantum_nfl;
    int d = 0;
    int r = 1;  // quantum only; 1 for classical kinds
    std::vector<BoundPoint> points;

    void validate() const;
};

/// Closed-form curve for t = 0..t_max (kind must not be the MC kind).
BoundCurve closed_form_curve(BoundKind kind, int d, int r, int t_max);

/// Monte Carlo risk statistics at one (d, r, t) grid point.
struct RiskStats {
    int d = 0, r = 0, t = 0;
    int n_unitaries = 0, n_sets = 0;
    double mean_risk = 0.0;
    double sample_std = 0.0;
    double stderr = 0.0;     // sample_std / √(n_unitaries·n_sets)
    double max_risk = 0.0;   // largest single-trial risk
    int non_converged = 0;   // variational trials that missed cost_tol
};

}  // namespace nfl::bounds
