#pragma once

#include <cstdint>
#include <vector>

#include "nfl/linalg.hpp"

namespace nfl::sampling {

using linalg::Complex;
using linalg::ComplexMatrix;
using linalg::ComplexVector;
using linalg::RealVector;
using linalg::UnitaryOperator;

/// Names one reproducible random stream. Two specs with different
/// (master_seed, stream_index) yield statistically independent streams.
struct SeedSpec {
    std::uint64_t master_seed = 0;
    std::uint64_t stream_index = 0;

    /// Child stream for parallel work items: folds `salt` into stream_index
    /// through splitmix64 so nested derivations stay collision-resistant.
    SeedSpec substream(std::uint64_t salt) const;
};

/// Deterministic generator (xoshiro256**). The four state words are produced
/// by two independent splitmix64 output streams, two words keyed by
/// master_seed and two by stream_index. splitmix64's output function is a
/// bijection on 64-bit words, so the map (master_seed, stream_index) -> state
/// is injective: words 0-1 recover master_seed, words 2-3 recover
/// stream_index. No std::random distribution is used anywhere, so identical
/// seeds give bit-identical outputs on every platform.
class RandomStream {
  public:
    explicit RandomStream(SeedSpec seed);

    std::uint64_t next_u64();

    /// Uniform on [0, 1), 53 random bits.
    double uniform();

    /// Uniform on [0, 2π).
    double uniform_angle();

    /// Standard normal via Box–Muller (second value cached).
    double gaussian();

    /// Standard complex normal: (N(0,1) + i·N(0,1)) / √2.
    Complex complex_gaussian();

    /// Number of successes in `shots` independent Bernoulli(p) draws.
    int binomial(int shots, double p);

    /// Matrix of independent standard complex normal entries, filled
    /// column-major (fixed, documented draw order).
    ComplexMatrix ginibre(int rows, int cols);

  private:
    std::uint64_t state_[4];
    double spare_gaussian_ = 0.0;
    bool has_spare_ = false;
};

/// Normalized vector on H_X ⊗ H_R with cached Schmidt data. Flat index
/// convention: amplitude of |x⟩⊗|ρ⟩ at x·d_r + ρ.
class BipartiteState {
  public:
    /// Assemble Σ_k √c_k ξ_k ⊗ ζ_k from explicit Schmidt data (validated:
    /// orthonormal ξ/ζ columns, coefficients positive and summing to 1).
    static BipartiteState from_schmidt(RealVector coeffs, ComplexMatrix left,
                                       ComplexMatrix right);

    /// Analyze raw amplitudes (must be normalized); Schmidt data is computed
    /// and cached with the default rank cutoff.
    static BipartiteState from_amplitudes(ComplexVector amplitudes, int d_x, int d_r);

    int d_x() const { return d_x_; }
    int d_r() const { return d_r_; }
    int schmidt_rank() const { return static_cast<int>(coeffs_.size()); }
    const ComplexVector& amplitudes() const { return amplitudes_; }
    const RealVector& schmidt_coeffs() const { return coeffs_; }
    /// ξ vectors as columns, d_x × r.
    const ComplexMatrix& left_vectors() const { return left_; }
    /// ζ vectors as columns, d_r × r.
    const ComplexMatrix& right_vectors() const { return right_; }

  private:
    BipartiteState() = default;
    int d_x_ = 0, d_r_ = 0;
    ComplexVector amplitudes_;
    RealVector coeffs_;
    ComplexMatrix left_, right_;
};

enum class SetStyle { orthonormal, generic };

const char* to_string(SetStyle s);

/// t input/output pairs of common Schmidt rank r with outputs
/// (U ⊗ I)·inputs; inputs' ξ-span basis is computed once and cached.
class TrainingSet {
  public:
    int t() const { return static_cast<int>(inputs_.size()); }
    int r() const { return r_; }
    int d_x() const { return d_x_; }
    int d_r() const { return d_r_; }
    SetStyle style() const { return style_; }
    /// Dimension of span{ξ_{j,k}} ⊆ H_X (r·t̃ for t̃ independent inputs).
    int span_dim() const { return static_cast<int>(span_basis_.cols()); }
    /// Orthonormal basis of the input span, d_x × span_dim.
    const ComplexMatrix& input_span_basis() const { return span_basis_; }

    const BipartiteState& input(int j) const { return inputs_.at(j); }
    const BipartiteState& output(int j) const { return outputs_.at(j); }

  private:
    friend TrainingSet training_set(const UnitaryOperator&, int, int, int, SetStyle, SeedSpec);
    int r_ = 0, d_x_ = 0, d_r_ = 0;
    SetStyle style_ = SetStyle::generic;
    std::vector<BipartiteState> inputs_, outputs_;
    ComplexMatrix span_basis_;
};

/// Non-negative square matrix whose rows and columns each sum to 1 (within
/// 1e-9, validated at construction).
class BistochasticMatrix {
  public:
    explicit BistochasticMatrix(Eigen::MatrixXd entries);
    int dim() const { return static_cast<int>(entries_.rows()); }
    const Eigen::MatrixXd& entries() const { return entries_; }

  private:
    Eigen::MatrixXd entries_;
};

/// Haar-distributed element of U(d): Ginibre matrix, QR, diagonal phase
/// correction Q·diag(R_ii/|R_ii|).
UnitaryOperator haar_unitary(int d, SeedSpec seed);
UnitaryOperator haar_unitary(int d, RandomStream& rng);

/// Haar-random unit vector in dimension d.
ComplexVector haar_pure_state(int d, SeedSpec seed);
ComplexVector haar_pure_state(int d, RandomStream& rng);

/// Random state of exact Schmidt rank r on H_X ⊗ H_R: coefficients are the
/// squared amplitudes of a Haar r-dimensional state, resampled until every
/// coefficient is at least 1e-6; ξ (ζ) vectors are the first r columns of an
/// independent Haar unitary on H_X (H_R).
BipartiteState schmidt_rank_state(int d_x, int d_r, int r, SeedSpec seed);
BipartiteState schmidt_rank_state(int d_x, int d_r, int r, RandomStream& rng);

/// Training set for target u. Orthonormal style draws all ξ vectors as
/// disjoint column blocks of one Haar unitary on H_X (requires r·t ≤ d);
/// generic style samples t independent schmidt_rank_state inputs.
TrainingSet training_set(const UnitaryOperator& u, int d_r, int r, int t, SetStyle style,
                         SeedSpec seed);

/// |u_ij|² of a Haar unitary.
BistochasticMatrix random_bistochastic(int d, SeedSpec seed);

/// Minimum Schmidt coefficient produced by the sampler.
inline constexpr double kMinSchmidtCoeff = 1e-6;

/// One Haar-moment check: empirical mean of a trace statistic against its
/// Weingarten-calculus value, with the z-score of the deviation.
struct HaarMomentCheck {
    const char* name;
    double empirical;
    double exact;
    double stderr;
    double z;
};

/// Monte Carlo validation of the Haar sampler over `samples` unitaries:
/// E|Tr Y|² = 1, E|Tr Y|⁴ = 2, E[Re(Tr Y·e^{iφ})²] = 1/2, E[Re(Tr Y)] = 0.
std::vector<HaarMomentCheck> haar_moment_checks(int d, int samples, SeedSpec seed,
                                                double phi = 1.234567);

}  // namespace nfl::sampling
