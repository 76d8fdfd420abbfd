#pragma once

#include <Eigen/Dense>

#include <complex>
#include <vector>

#include "nfl/errors.hpp"

namespace nfl::linalg {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

/// Construction tolerance for unitarity, ‖U†U − I‖_max.
inline constexpr double kUnitaryTol = 1e-10;
/// Construction tolerance for Hermiticity, ‖H − H†‖_max.
inline constexpr double kHermitianTol = 1e-12;
/// Default numerical-rank cutoff: singular values at or below it count as zero.
/// Well above construction round-off, far below the sampler's 1e-6 coefficient
/// floor (which puts singular values at or above 1e-3).
inline constexpr double kRankCutoff = 1e-8;

/// Largest entry magnitude, ‖m‖_max.
double max_abs_entry(const Eigen::Ref<const ComplexMatrix>& m);

/// True iff no entry is NaN or infinite.
bool all_entries_finite(const Eigen::Ref<const ComplexMatrix>& m);

/// A d×d matrix validated to be unitary at construction.
class UnitaryOperator {
  public:
    explicit UnitaryOperator(ComplexMatrix m);

    static UnitaryOperator identity(int d);

    int dim() const { return static_cast<int>(matrix_.rows()); }
    const ComplexMatrix& matrix() const { return matrix_; }

    /// How far U†U is from the identity (entry-wise max).
    double unitarity_defect() const;

  private:
    ComplexMatrix matrix_;
};

/// A square matrix validated to satisfy ‖H − H†‖_max ≤ 1e-12 at construction.
class HermitianMatrix {
  public:
    explicit HermitianMatrix(ComplexMatrix m);

    int dim() const { return static_cast<int>(matrix_.rows()); }
    const ComplexMatrix& matrix() const { return matrix_; }

  private:
    ComplexMatrix matrix_;
};

struct QrResult {
    ComplexMatrix q;  // unitary
    ComplexMatrix r;  // upper triangular, real non-negative diagonal
};

/// Householder QR of a square matrix, with the diagonal of R phase-fixed to be
/// real and non-negative (so the factorization is unique for full-rank input).
/// This is exactly the phase correction that turns the QR of a Ginibre matrix
/// into a Haar-distributed Q.
QrResult qr_decompose(const ComplexMatrix& m);

struct SchmidtDecomposition {
    RealVector coeffs;    // descending, sum ≈ 1; only values with √c above the cutoff
    ComplexMatrix left;   // d_x × rank, orthonormal columns ξ_k
    ComplexMatrix right;  // d_r × rank, orthonormal columns ζ_k

    int rank() const { return static_cast<int>(coeffs.size()); }
};

/// Schmidt decomposition of a unit vector on H_X ⊗ H_R (index convention:
/// amplitude of |x⟩⊗|ρ⟩ lives at flat index x·d_r + ρ). Each left vector is
/// phase-fixed so that its first non-negligible component is real positive,
/// making the decomposition deterministic.
SchmidtDecomposition schmidt_decompose(const ComplexVector& v, int d_x, int d_r,
                                       double cutoff = kRankCutoff);

/// Rebuild Σ_k √c_k ξ_k ⊗ ζ_k.
ComplexVector schmidt_reconstruct(const SchmidtDecomposition& sd);

/// exp(i·scale·H) through the eigendecomposition of H. Hermitian generators
/// with dimension ≤ 256 are the only use case here, so no Padé machinery.
UnitaryOperator expm_hermitian(const HermitianMatrix& h, double scale);

struct SpanBasis {
    ComplexMatrix basis;  // dim × rank, orthonormal columns
    int rank = 0;
};

/// Orthonormal basis of span{vectors} by modified Gram–Schmidt with one
/// reorthogonalization pass; residuals with norm ≤ tol are treated as
/// dependent. Rank equals the numerical rank at singular-value cutoff tol.
SpanBasis orthonormal_basis_of_span(const std::vector<ComplexVector>& vectors,
                                    double tol = kRankCutoff);

/// Overload for vectors already stacked as columns.
SpanBasis orthonormal_basis_of_span(const ComplexMatrix& columns, double tol = kRankCutoff);

}  // namespace nfl::linalg
