#include "nfl/learning.hpp"

#include <algorithm>
#include <cmath>

namespace nfl::learning {

using sampling::BipartiteState;
using sampling::RandomStream;

const char* to_string(LearnerMethod m) {
    switch (m) {
        case LearnerMethod::perfect: return "perfect";
        case LearnerMethod::variational: return "variational";
        case LearnerMethod::variational_shots: return "variational_shots";
    }
    return "?";
}

void OptimizerConfig::validate() const {
    if (max_iters < 1) throw InvalidArgs("OptimizerConfig: max_iters must be positive");
    if (cost_tol <= 0.0 || cost_tol >= 1.0)
        throw InvalidArgs("OptimizerConfig: cost_tol must lie in (0, 1)");
    if (learning_rate <= 0.0) throw InvalidArgs("OptimizerConfig: learning_rate must be positive");
    if (fd_step <= 0.0) throw InvalidArgs("OptimizerConfig: fd_step must be positive");
    if (restarts < 1) throw InvalidArgs("OptimizerConfig: restarts must be positive");
    if (shots && *shots < 1) throw InvalidArgs("OptimizerConfig: shots must be positive");
}

namespace {

using RowMajorMap = Eigen::Map<
    const Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>;

Complex overlap_direct(const UnitaryOperator& v, const BipartiteState& in,
                       const BipartiteState& out) {
    // ψ viewed as a d_x × d_r matrix turns (V ⊗ I)|ψ⟩ into V·M.
    RowMajorMap psi(in.amplitudes().data(), in.d_x(), in.d_r());
    RowMajorMap phi(out.amplitudes().data(), out.d_x(), out.d_r());
    return (phi.conjugate().cwiseProduct(v.matrix() * psi)).sum();
}

void check_dims(const UnitaryOperator& v, const TrainingSet& s) {
    if (s.t() > 0 && v.dim() != s.d_x())
        throw DimensionMismatch("hypothesis dimension != training set dimension");
}

}  // namespace

std::vector<Complex> pair_overlaps(const UnitaryOperator& v, const TrainingSet& s) {
    check_dims(v, s);
    std::vector<Complex> overlaps;
    overlaps.reserve(s.t());
    for (int j = 0; j < s.t(); ++j)
        overlaps.push_back(overlap_direct(v, s.input(j), s.output(j)));
    return overlaps;
}

double cost(const UnitaryOperator& v, const TrainingSet& s) {
    check_dims(v, s);
    if (s.t() == 0) return 0.0;
    double total = 0.0;
    for (int j = 0; j < s.t(); ++j)
        total += std::norm(overlap_direct(v, s.input(j), s.output(j)));
    return 1.0 - total / s.t();
}

double sampled_cost(const UnitaryOperator& v, const TrainingSet& s, int shots, SeedSpec seed) {
    check_dims(v, s);
    if (shots < 1) throw InvalidArgs("sampled_cost: shots must be >= 1");
    if (s.t() == 0) return 0.0;
    RandomStream rng(seed);
    double total = 0.0;
    for (int j = 0; j < s.t(); ++j) {
        const double p = std::min(1.0, std::norm(overlap_direct(v, s.input(j), s.output(j))));
        total += static_cast<double>(rng.binomial(shots, p)) / shots;
    }
    return 1.0 - total / s.t();
}

double risk(const UnitaryOperator& u, const UnitaryOperator& v) {
    if (u.dim() != v.dim()) throw DimensionMismatch("risk: dimension mismatch");
    const double d = u.dim();
    // Tr(u†v) without forming the product
    const Complex tr = (u.matrix().conjugate().cwiseProduct(v.matrix())).sum();
    return std::max(0.0, 1.0 - (d + std::norm(tr)) / (d * (d + 1.0)));
}

MonteCarloEstimate risk_monte_carlo(const UnitaryOperator& u, const UnitaryOperator& v,
                                    int n, SeedSpec seed) {
    if (u.dim() != v.dim()) throw DimensionMismatch("risk_monte_carlo: dimension mismatch");
    if (n < 1) throw InvalidArgs("risk_monte_carlo: n must be >= 1");
    const int d = u.dim();
    const ComplexMatrix w = u.matrix().adjoint() * v.matrix();
    RandomStream rng(seed);
    double sum = 0.0, sum_sq = 0.0;
    for (int i = 0; i < n; ++i) {
        const linalg::ComplexVector x = sampling::haar_pure_state(d, rng);
        const double val = std::max(0.0, 1.0 - std::norm(x.dot(w * x)));
        sum += val;
        sum_sq += val * val;
    }
    const double mean = sum / n;
    double stderr = 0.0;
    if (n > 1) {
        const double var = std::max(0.0, (sum_sq - n * mean * mean) / (n - 1));
        stderr = std::sqrt(var / n);
    }
    return {mean, stderr};
}

HypothesisResult perfect_learner(const UnitaryOperator& u, const TrainingSet& s,
                                 SeedSpec seed) {
    if (s.t() > 0 && u.dim() != s.d_x())
        throw DimensionMismatch("perfect_learner: dimension mismatch");
    const int d = u.dim();
    const int m = s.span_dim();
    RandomStream rng(seed);
    const double theta = rng.uniform_angle();
    const Complex phase(std::cos(theta), std::sin(theta));

    ComplexMatrix v;
    ComplexMatrix w;  // = u†v, kept for the residual-cost diagnostic
    if (m == d) {
        // Full span forces W = e^{iθ}·I.
        v = phase * u.matrix();
        w = phase * ComplexMatrix::Identity(d, d);
    } else if (m == 0) {
        w = haar_unitary(d, rng).matrix();
        v = u.matrix() * w;
    } else {
        // Complete the span basis to a full unitary frame, then
        // W = Q · diag(e^{iθ}·I_m, Y) · Q†.
        Eigen::HouseholderQR<ComplexMatrix> qr(s.input_span_basis());
        ComplexMatrix frame = qr.householderQ() * ComplexMatrix::Identity(d, d);
        const UnitaryOperator y = haar_unitary(d - m, rng);
        ComplexMatrix scaled(d, d);
        scaled.leftCols(m) = phase * frame.leftCols(m);
        scaled.rightCols(d - m) = frame.rightCols(d - m) * y.matrix();
        w = scaled * frame.adjoint();
        v = u.matrix() * w;
    }

    HypothesisResult result{UnitaryOperator(std::move(v)),
                            LearnerMethod::perfect,
                            0.0,
                            0,
                            theta,
                            d - m,
                            true};

    // Residual training cost through the Schmidt identity
    // ⟨φ_j|(V⊗I)|ψ_j⟩ = Σ_k c_{j,k} ⟨ξ_{j,k}|W|ξ_{j,k}⟩; zero by
    // construction up to round-off.
    if (s.t() > 0) {
        double total = 0.0;
        for (int j = 0; j < s.t(); ++j) {
            const BipartiteState& in = s.input(j);
            const ComplexMatrix wx = w * in.left_vectors();
            Complex overlap(0.0, 0.0);
            for (int k = 0; k < in.schmidt_rank(); ++k)
                overlap += in.schmidt_coeffs()(k) * in.left_vectors().col(k).dot(wx.col(k));
            total += std::norm(overlap);
        }
        result.final_cost = std::max(0.0, 1.0 - total / s.t());
    }
    return result;
}

std::vector<ComplexMatrix> gell_mann_basis(int d) {
    if (d < 1) throw InvalidDimension("gell_mann_basis: d must be >= 1");
    std::vector<ComplexMatrix> basis;
    basis.reserve(static_cast<std::size_t>(d) * d);
    basis.push_back(ComplexMatrix::Identity(d, d));
    for (int j = 0; j < d; ++j)
        for (int k = j + 1; k < d; ++k) {
            ComplexMatrix sym = ComplexMatrix::Zero(d, d);
            sym(j, k) = sym(k, j) = Complex(1.0, 0.0);
            basis.push_back(std::move(sym));
            ComplexMatrix asym = ComplexMatrix::Zero(d, d);
            asym(j, k) = Complex(0.0, -1.0);
            asym(k, j) = Complex(0.0, 1.0);
            basis.push_back(std::move(asym));
        }
    for (int l = 1; l < d; ++l) {
        ComplexMatrix diag = ComplexMatrix::Zero(d, d);
        const double scale = std::sqrt(2.0 / (l * (l + 1.0)));
        for (int i = 0; i < l; ++i) diag(i, i) = scale;
        diag(l, l) = -l * scale;
        basis.push_back(std::move(diag));
    }
    return basis;
}

namespace {

UnitaryOperator build_unitary(const std::vector<ComplexMatrix>& basis,
                              const Eigen::VectorXd& theta) {
    const Eigen::Index d = basis.front().rows();
    ComplexMatrix h = ComplexMatrix::Zero(d, d);
    for (std::size_t k = 0; k < basis.size(); ++k) h += theta(k) * basis[k];
    return linalg::expm_hermitian(linalg::HermitianMatrix(std::move(h)), 1.0);
}

Eigen::VectorXd random_start(std::size_t n_params, RandomStream& rng) {
    Eigen::VectorXd theta(n_params);
    for (Eigen::Index k = 0; k < theta.size(); ++k)
        theta(k) = (rng.uniform() - 0.5) * 2.0 * std::numbers::pi;
    return theta;
}

}  // namespace

namespace detail {

RunResult minimize_exact(int d, const TrainingSet& s, const OptimizerConfig& cfg,
                         Eigen::VectorXd theta0, OptimizerTrace* trace) {
    const std::vector<ComplexMatrix> basis = gell_mann_basis(d);
    const auto eval = [&](const Eigen::VectorXd& th) { return cost(build_unitary(basis, th), s); };

    Eigen::VectorXd theta = std::move(theta0);
    Eigen::VectorXd best_theta = theta;
    double best = eval(theta);

    Eigen::VectorXd m1 = Eigen::VectorXd::Zero(theta.size());
    Eigen::VectorXd m2 = Eigen::VectorXd::Zero(theta.size());
    constexpr double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;

    int iter = 0;
    for (; iter < cfg.max_iters && best > cfg.cost_tol; ++iter) {
        Eigen::VectorXd grad(theta.size());
        for (Eigen::Index k = 0; k < theta.size(); ++k) {
            Eigen::VectorXd probe = theta;
            probe(k) = theta(k) + cfg.fd_step;
            const double up = eval(probe);
            probe(k) = theta(k) - cfg.fd_step;
            const double down = eval(probe);
            grad(k) = (up - down) / (2.0 * cfg.fd_step);
        }
        m1 = beta1 * m1 + (1.0 - beta1) * grad;
        m2 = beta2 * m2 + (1.0 - beta2) * grad.cwiseProduct(grad);
        const double corr1 = 1.0 - std::pow(beta1, iter + 1);
        const double corr2 = 1.0 - std::pow(beta2, iter + 1);
        theta -= (cfg.learning_rate / corr1) * m1.cwiseQuotient(
                     ((m2 / corr2).cwiseSqrt().array() + eps).matrix());

        const double c = eval(theta);
        if (c < best) {
            best = c;
            best_theta = theta;
        }
        if (trace) trace->best_cost.push_back(best);
    }
    return {std::move(best_theta), best, iter};
}

}  // namespace detail

namespace {

// SPSA (simultaneous perturbation) with standard Spall gain schedules; finite
// differences are useless under shot noise.
detail::RunResult minimize_sampled(int d, const TrainingSet& s, const OptimizerConfig& cfg,
                                   Eigen::VectorXd theta0, RandomStream& rng) {
    const std::vector<ComplexMatrix> basis = gell_mann_basis(d);
    const int shots = *cfg.shots;
    const auto eval = [&](const Eigen::VectorXd& th) {
        const UnitaryOperator v = build_unitary(basis, th);
        if (s.t() == 0) return 0.0;
        double total = 0.0;
        for (int j = 0; j < s.t(); ++j) {
            const double p =
                std::min(1.0, std::norm(overlap_direct(v, s.input(j), s.output(j))));
            total += static_cast<double>(rng.binomial(shots, p)) / shots;
        }
        return 1.0 - total / s.t();
    };

    Eigen::VectorXd theta = std::move(theta0);
    Eigen::VectorXd best_theta = theta;
    double best = eval(theta);
    const double big_a = std::max(1.0, 0.1 * cfg.max_iters);
    constexpr double alpha = 0.602, gamma = 0.101, c0 = 0.1;

    int iter = 0;
    for (; iter < cfg.max_iters && best > cfg.cost_tol; ++iter) {
        // normalized so the first step size is the configured learning rate
        const double ak =
            cfg.learning_rate * std::pow((big_a + 1.0) / (iter + 1.0 + big_a), alpha);
        const double ck = c0 / std::pow(iter + 1.0, gamma);
        Eigen::VectorXd delta(theta.size());
        for (Eigen::Index k = 0; k < delta.size(); ++k)
            delta(k) = (rng.next_u64() & 1) ? 1.0 : -1.0;
        const double up = eval(theta + ck * delta);
        const double down = eval(theta - ck * delta);
        const double slope = (up - down) / (2.0 * ck);
        theta -= ak * slope * delta;

        const double c = eval(theta);
        if (c < best) {
            best = c;
            best_theta = theta;
        }
    }
    return {std::move(best_theta), best, iter};
}

}  // namespace

HypothesisResult variational_learner(const UnitaryOperator& u, const TrainingSet& s,
                                     const OptimizerConfig& cfg, SeedSpec seed) {
    if (s.t() > 0 && u.dim() != s.d_x())
        throw DimensionMismatch("variational_learner: dimension mismatch");
    cfg.validate();
    const int d = u.dim();
    const std::size_t n_params = static_cast<std::size_t>(d) * d;
    const LearnerMethod method =
        cfg.shots ? LearnerMethod::variational_shots : LearnerMethod::variational;
    RandomStream rng(seed);

    if (s.t() == 0) {
        const std::vector<ComplexMatrix> basis = gell_mann_basis(d);
        UnitaryOperator v = build_unitary(basis, random_start(n_params, rng));
        return {std::move(v), method, 0.0, 0, 0.0, d - s.span_dim(), true};
    }

    std::optional<detail::RunResult> best;
    int total_iters = 0;
    for (int restart = 0; restart < cfg.restarts; ++restart) {
        Eigen::VectorXd theta0 = random_start(n_params, rng);
        detail::RunResult run = cfg.shots ? minimize_sampled(d, s, cfg, std::move(theta0), rng)
                                          : detail::minimize_exact(d, s, cfg, std::move(theta0));
        total_iters += run.iterations;
        if (!best || run.cost < best->cost) best = std::move(run);
        if (best->cost <= cfg.cost_tol) break;
    }

    const std::vector<ComplexMatrix> basis = gell_mann_basis(d);
    UnitaryOperator v = build_unitary(basis, best->theta);
    const bool converged = best->cost <= cfg.cost_tol;
    return {std::move(v), method, best->cost, total_iters, 0.0, d - s.span_dim(), converged};
}

}  // namespace nfl::learning
