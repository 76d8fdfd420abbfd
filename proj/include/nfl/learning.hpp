#pragma once

#include <optional>
#include <vector>

#include "nfl/linalg.hpp"
#include "nfl/sampling.hpp"

namespace nfl::learning {

using linalg::Complex;
using linalg::ComplexMatrix;
using linalg::UnitaryOperator;
using sampling::SeedSpec;
using sampling::TrainingSet;

enum class LearnerMethod { perfect, variational, variational_shots };

const char* to_string(LearnerMethod m);

/// Learned hypothesis unitary plus training diagnostics.
struct HypothesisResult {
    UnitaryOperator v;
    LearnerMethod method;
    double final_cost = 0.0;    // in [0, 1]
    int iterations = 0;         // optimizer iterations actually performed
    double global_phase = 0.0;  // θ drawn by the perfect learner; 0 otherwise
    int complement_dim = 0;     // d − span_dim of the training set
    bool converged = true;      // false = NonConverged status (not a failure)
};

struct OptimizerConfig {
    int max_iters = 5000;
    double cost_tol = 1e-6;
    double learning_rate = 0.1;
    double fd_step = 1e-5;
    std::optional<int> shots;  // unset: exact cost
    int restarts = 3;

    void validate() const;
};

/// Training cost 1 − (1/t)·Σ_j |⟨φ_j|(V⊗I)|ψ_j⟩|², by direct inner products.
/// Empty training sets cost 0 (vacuous average counts as perfect).
double cost(const UnitaryOperator& v, const TrainingSet& s);

/// The t overlaps ⟨φ_j|(V⊗I)|ψ_j⟩ behind the cost, by direct inner products.
std::vector<Complex> pair_overlaps(const UnitaryOperator& v, const TrainingSet& s);

/// Shot-noise estimate of the cost: per pair, Binomial(shots, p_j)/shots
/// replaces p_j = |⟨φ_j|(V⊗I)|ψ_j⟩|². Unbiased.
double sampled_cost(const UnitaryOperator& v, const TrainingSet& s, int shots, SeedSpec seed);

/// Analytic zero-cost hypothesis from the block construction: with B an
/// orthonormal basis of span{ξ_{j,k}}, returns v = u·W for
/// W = e^{iθ}·P_B ⊕ Y, θ uniform in [0, 2π), Y Haar on the orthocomplement.
/// cost(v, s) ≤ 1e-12 by construction.
HypothesisResult perfect_learner(const UnitaryOperator& u, const TrainingSet& s,
                                 SeedSpec seed);

/// Minimizes the (exact or sampled) cost over V(θ) = exp(i·Σ θ_k G_k) with
/// G_k the generalized Gell-Mann basis plus identity (d² real parameters):
/// Adam on central finite differences for the exact cost, SPSA when shots is
/// set. Keeps the best of cfg.restarts independent starts and reports what it
/// achieved; `converged` is false if the tolerance was never reached.
HypothesisResult variational_learner(const UnitaryOperator& u, const TrainingSet& s,
                                     const OptimizerConfig& cfg, SeedSpec seed);

/// Average squared trace distance between outputs on Haar inputs:
/// 1 − (d + |Tr(u†v)|²)/(d(d+1)), clamped to ≥ 0 against round-off.
/// Range [0, d/(d+1)].
double risk(const UnitaryOperator& u, const UnitaryOperator& v);

struct MonteCarloEstimate {
    double mean = 0.0;
    double stderr = 0.0;
};

/// Direct Monte Carlo of the risk integral: mean over n Haar states of
/// 1 − |⟨x|u†v|x⟩|². Cross-checks the closed form.
MonteCarloEstimate risk_monte_carlo(const UnitaryOperator& u, const UnitaryOperator& v,
                                    int n, SeedSpec seed);

/// d² Hermitian generators: identity, then the generalized Gell-Mann set
/// (symmetric, antisymmetric, diagonal), each with Tr G² = 2 except identity.
std::vector<ComplexMatrix> gell_mann_basis(int d);

/// Optional per-iteration trace of the optimizer's best-so-far cost.
struct OptimizerTrace {
    std::vector<double> best_cost;  // one entry per iteration, non-increasing
};

namespace detail {
/// Single Adam run on the exact cost from a given start; exposed for tests.
struct RunResult {
    Eigen::VectorXd theta;
    double cost = 1.0;
    int iterations = 0;
};
RunResult minimize_exact(int d, const TrainingSet& s, const OptimizerConfig& cfg,
                         Eigen::VectorXd theta0, OptimizerTrace* trace = nullptr);
}  // namespace detail

}  // namespace nfl::learning
