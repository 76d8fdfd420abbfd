#include "nfl/linalg.hpp"

#include <algorithm>
#include <cmath>

namespace nfl::linalg {

double max_abs_entry(const Eigen::Ref<const ComplexMatrix>& m) {
    if (m.size() == 0) return 0.0;
    return m.cwiseAbs().maxCoeff();
}

bool all_entries_finite(const Eigen::Ref<const ComplexMatrix>& m) {
    for (Eigen::Index j = 0; j < m.cols(); ++j)
        for (Eigen::Index i = 0; i < m.rows(); ++i) {
            const Complex& z = m(i, j);
            if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
        }
    return true;
}

UnitaryOperator::UnitaryOperator(ComplexMatrix m) : matrix_(std::move(m)) {
    if (matrix_.rows() != matrix_.cols())
        throw NonSquare("UnitaryOperator: matrix is not square");
    if (matrix_.rows() < 1) throw InvalidDimension("UnitaryOperator: empty matrix");
    if (!all_entries_finite(matrix_))
        throw InvalidArgs("UnitaryOperator: non-finite entries");
    const Eigen::Index d = matrix_.rows();
    ComplexMatrix defect = matrix_.adjoint() * matrix_;
    defect -= ComplexMatrix::Identity(d, d);
    if (max_abs_entry(defect) > kUnitaryTol)
        throw InvalidArgs("UnitaryOperator: U†U deviates from identity beyond 1e-10");
    const double abs_det = std::abs(matrix_.determinant());
    if (std::abs(abs_det - 1.0) > 1e-8)
        throw InvalidArgs("UnitaryOperator: |det| deviates from 1 beyond 1e-8");
}

UnitaryOperator UnitaryOperator::identity(int d) {
    if (d < 1) throw InvalidDimension("identity: d must be >= 1");
    return UnitaryOperator(ComplexMatrix::Identity(d, d));
}

double UnitaryOperator::unitarity_defect() const {
    const Eigen::Index d = matrix_.rows();
    ComplexMatrix defect = matrix_.adjoint() * matrix_;
    defect -= ComplexMatrix::Identity(d, d);
    return max_abs_entry(defect);
}

HermitianMatrix::HermitianMatrix(ComplexMatrix m) : matrix_(std::move(m)) {
    if (matrix_.rows() != matrix_.cols())
        throw NonSquare("HermitianMatrix: matrix is not square");
    if (matrix_.rows() < 1) throw InvalidDimension("HermitianMatrix: empty matrix");
    if (!all_entries_finite(matrix_))
        throw InvalidArgs("HermitianMatrix: non-finite entries");
    ComplexMatrix defect = matrix_ - matrix_.adjoint();
    if (max_abs_entry(defect) > kHermitianTol)
        throw InvalidArgs("HermitianMatrix: ‖H − H†‖_max exceeds 1e-12");
}

QrResult qr_decompose(const ComplexMatrix& m) {
    if (m.rows() != m.cols()) throw NonSquare("qr_decompose: matrix is not square");
    const Eigen::Index d = m.rows();
    Eigen::HouseholderQR<ComplexMatrix> qr(m);
    ComplexMatrix q = qr.householderQ() * ComplexMatrix::Identity(d, d);
    ComplexMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
    // Fix phases so diag(R) is real non-negative; Q absorbs them.
    for (Eigen::Index i = 0; i < d; ++i) {
        const Complex rii = r(i, i);
        const double mag = std::abs(rii);
        const Complex phase = (mag > 0.0) ? rii / mag : Complex(1.0, 0.0);
        r.row(i) *= std::conj(phase);
        q.col(i) *= phase;
    }
    return {std::move(q), std::move(r)};
}

SchmidtDecomposition schmidt_decompose(const ComplexVector& v, int d_x, int d_r,
                                       double cutoff) {
    if (d_x < 1 || d_r < 1)
        throw InvalidDimension("schmidt_decompose: dimensions must be >= 1");
    if (v.size() != static_cast<Eigen::Index>(d_x) * d_r)
        throw DimensionMismatch("schmidt_decompose: vector length != d_x * d_r");

    // Row x of A holds the amplitudes ⟨x,ρ|ψ⟩ for fixed x.
    Eigen::Map<const Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>
        a(v.data(), d_x, d_r);
    Eigen::JacobiSVD<ComplexMatrix> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);

    const RealVector& sigma = svd.singularValues();  // descending
    int rank = 0;
    while (rank < sigma.size() && sigma(rank) > cutoff) ++rank;

    SchmidtDecomposition sd;
    sd.coeffs = sigma.head(rank).array().square();
    sd.left = svd.matrixU().leftCols(rank);
    sd.right = svd.matrixV().leftCols(rank).conjugate();

    // ψ = Σ σ_k U_{:,k} ⊗ conj(V_{:,k}); phase convention: first component of
    // each left vector with magnitude above the cutoff is made real positive.
    for (int k = 0; k < rank; ++k) {
        Eigen::Index lead = 0;
        while (lead + 1 < sd.left.rows() && std::abs(sd.left(lead, k)) <= cutoff) ++lead;
        const Complex z = sd.left(lead, k);
        const double mag = std::abs(z);
        if (mag > 0.0) {
            const Complex phase = z / mag;
            sd.left.col(k) *= std::conj(phase);
            sd.right.col(k) *= phase;
        }
    }
    return sd;
}

ComplexVector schmidt_reconstruct(const SchmidtDecomposition& sd) {
    const Eigen::Index d_x = sd.left.rows();
    const Eigen::Index d_r = sd.right.rows();
    ComplexVector v = ComplexVector::Zero(d_x * d_r);
    for (int k = 0; k < sd.rank(); ++k) {
        const double root = std::sqrt(sd.coeffs(k));
        for (Eigen::Index x = 0; x < d_x; ++x)
            v.segment(x * d_r, d_r) += root * sd.left(x, k) * sd.right.col(k);
    }
    return v;
}

UnitaryOperator expm_hermitian(const HermitianMatrix& h, double scale) {
    const int d = h.dim();
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(h.matrix());
    ComplexVector phases(d);
    for (int i = 0; i < d; ++i) {
        const double angle = scale * es.eigenvalues()(i);
        phases(i) = Complex(std::cos(angle), std::sin(angle));
    }
    ComplexMatrix u = es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
    return UnitaryOperator(std::move(u));
}

SpanBasis orthonormal_basis_of_span(const ComplexMatrix& columns, double tol) {
    if (columns.cols() == 0) throw EmptyInput("orthonormal_basis_of_span: no vectors");
    if (tol <= 0.0) throw InvalidArgs("orthonormal_basis_of_span: tol must be positive");

    const Eigen::Index dim = columns.rows();
    ComplexMatrix basis(dim, std::min<Eigen::Index>(columns.cols(), dim));
    int rank = 0;
    for (Eigen::Index j = 0; j < columns.cols(); ++j) {
        ComplexVector w = columns.col(j);
        // Two projection passes keep the basis orthonormal to round-off even
        // for nearly dependent inputs.
        for (int pass = 0; pass < 2; ++pass)
            for (int k = 0; k < rank; ++k)
                w -= basis.col(k).dot(w) * basis.col(k);
        const double norm = w.norm();
        if (norm > tol) {
            basis.col(rank) = w / norm;
            ++rank;
            if (rank == dim) break;  // span is the whole space
        }
    }
    return {basis.leftCols(rank), rank};
}

SpanBasis orthonormal_basis_of_span(const std::vector<ComplexVector>& vectors, double tol) {
    if (vectors.empty()) throw EmptyInput("orthonormal_basis_of_span: no vectors");
    const Eigen::Index dim = vectors.front().size();
    ComplexMatrix columns(dim, static_cast<Eigen::Index>(vectors.size()));
    for (std::size_t j = 0; j < vectors.size(); ++j) {
        if (vectors[j].size() != dim)
            throw DimensionMismatch("orthonormal_basis_of_span: mixed vector lengths");
        columns.col(static_cast<Eigen::Index>(j)) = vectors[j];
    }
    return orthonormal_basis_of_span(columns, tol);
}

}  // namespace nfl::linalg
