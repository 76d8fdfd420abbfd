#include "nfl/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

namespace nfl::sampling {

namespace {

constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

// splitmix64 output function; a bijection on 64-bit words.
std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

}  // namespace

SeedSpec SeedSpec::substream(std::uint64_t salt) const {
    return {master_seed, mix64(stream_index + kGolden * (salt + 1))};
}

RandomStream::RandomStream(SeedSpec seed) {
    state_[0] = mix64(seed.master_seed + kGolden);
    state_[1] = mix64(seed.master_seed + 2 * kGolden);
    state_[2] = mix64(seed.stream_index + kGolden);
    state_[3] = mix64(seed.stream_index + 2 * kGolden);
    if ((state_[0] | state_[1] | state_[2] | state_[3]) == 0) state_[0] = 1;
    // Warm-up rounds diffuse the two seed halves across the whole state (the
    // first raw output reads only state_[1], which is master-keyed). The
    // update is bijective, so the seeding map stays injective.
    for (int i = 0; i < 8; ++i) next_u64();
}

std::uint64_t RandomStream::next_u64() {
    // xoshiro256** by Blackman & Vigna.
    const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
}

double RandomStream::uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double RandomStream::uniform_angle() {
    return uniform() * 2.0 * std::numbers::pi;
}

double RandomStream::gaussian() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_gaussian_;
    }
    // Marsaglia polar method; one log/sqrt per pair, no trigonometry.
    double a, b, s;
    do {
        a = 2.0 * uniform() - 1.0;
        b = 2.0 * uniform() - 1.0;
        s = a * a + b * b;
    } while (s >= 1.0 || s == 0.0);
    const double f = std::sqrt(-2.0 * std::log(s) / s);
    spare_gaussian_ = b * f;
    has_spare_ = true;
    return a * f;
}

Complex RandomStream::complex_gaussian() {
    const double re = gaussian();
    const double im = gaussian();
    return Complex(re, im) * std::numbers::sqrt2 * 0.5;
}

int RandomStream::binomial(int shots, double p) {
    if (shots < 0) throw InvalidArgs("binomial: shots must be non-negative");
    if (p <= 0.0) return 0;
    if (p >= 1.0) return shots;
    int count = 0;
    for (int i = 0; i < shots; ++i)
        if (uniform() < p) ++count;
    return count;
}

ComplexMatrix RandomStream::ginibre(int rows, int cols) {
    ComplexMatrix g(rows, cols);
    for (int j = 0; j < cols; ++j)
        for (int i = 0; i < rows; ++i) g(i, j) = complex_gaussian();
    return g;
}

namespace {

// First r columns of a Haar unitary on dimension d: Ginibre block followed by
// orthonormalization with the R-diagonal kept real positive. Two-pass
// modified Gram-Schmidt computes the same positive-diagonal QR map as a
// Householder factorization at a fraction of the cost for thin blocks.
ComplexMatrix haar_isometry(int d, int r, RandomStream& rng) {
    ComplexMatrix q = rng.ginibre(d, r);
    for (int j = 0; j < r; ++j) {
        auto col = q.col(j);
        for (int pass = 0; pass < 2; ++pass)
            for (int k = 0; k < j; ++k) col -= q.col(k).dot(col) * q.col(k);
        col /= col.norm();
    }
    return q;
}

}  // namespace

UnitaryOperator haar_unitary(int d, RandomStream& rng) {
    if (d < 1) throw InvalidDimension("haar_unitary: d must be >= 1");
    return UnitaryOperator(haar_isometry(d, d, rng));
}

UnitaryOperator haar_unitary(int d, SeedSpec seed) {
    RandomStream rng(seed);
    return haar_unitary(d, rng);
}

ComplexVector haar_pure_state(int d, RandomStream& rng) {
    if (d < 1) throw InvalidDimension("haar_pure_state: d must be >= 1");
    ComplexVector v(d);
    for (int i = 0; i < d; ++i) v(i) = rng.complex_gaussian();
    return v / v.norm();
}

ComplexVector haar_pure_state(int d, SeedSpec seed) {
    RandomStream rng(seed);
    return haar_pure_state(d, rng);
}

namespace {

// Squared amplitudes of a Haar r-dimensional state, resampled until the
// smallest coefficient clears the floor, then sorted descending.
RealVector schmidt_coefficients(int r, RandomStream& rng) {
    RealVector c(r);
    while (true) {
        double total = 0.0;
        for (int k = 0; k < r; ++k) {
            const Complex z = rng.complex_gaussian();
            c(k) = std::norm(z);
            total += c(k);
        }
        c /= total;
        if (c.minCoeff() >= kMinSchmidtCoeff) break;
    }
    std::sort(c.data(), c.data() + r, std::greater<double>());
    return c;
}

ComplexVector assemble_amplitudes(const RealVector& coeffs, const ComplexMatrix& left,
                                  const ComplexMatrix& right) {
    const Eigen::Index d_x = left.rows();
    const Eigen::Index d_r = right.rows();
    ComplexVector v = ComplexVector::Zero(d_x * d_r);
    for (Eigen::Index k = 0; k < coeffs.size(); ++k) {
        const double root = std::sqrt(coeffs(k));
        for (Eigen::Index x = 0; x < d_x; ++x)
            v.segment(x * d_r, d_r) += root * left(x, k) * right.col(k);
    }
    return v;
}

}  // namespace

BipartiteState BipartiteState::from_schmidt(RealVector coeffs, ComplexMatrix left,
                                            ComplexMatrix right) {
    const int r = static_cast<int>(coeffs.size());
    if (r < 1) throw InvalidArgs("BipartiteState: empty coefficient list");
    if (left.cols() != r || right.cols() != r)
        throw DimensionMismatch("BipartiteState: vector count != coefficient count");
    if (coeffs.minCoeff() <= 0.0)
        throw InvalidArgs("BipartiteState: coefficients must be positive");
    if (std::abs(coeffs.sum() - 1.0) > 1e-10)
        throw InvalidArgs("BipartiteState: coefficients must sum to 1");
    for (const ComplexMatrix* m : {&left, &right}) {
        ComplexMatrix gram = m->adjoint() * (*m);
        gram -= ComplexMatrix::Identity(r, r);
        if (linalg::max_abs_entry(gram) > 1e-10)
            throw InvalidArgs("BipartiteState: Schmidt vectors not orthonormal");
    }
    BipartiteState s;
    s.d_x_ = static_cast<int>(left.rows());
    s.d_r_ = static_cast<int>(right.rows());
    s.amplitudes_ = assemble_amplitudes(coeffs, left, right);
    s.coeffs_ = std::move(coeffs);
    s.left_ = std::move(left);
    s.right_ = std::move(right);
    return s;
}

BipartiteState BipartiteState::from_amplitudes(ComplexVector amplitudes, int d_x, int d_r) {
    if (std::abs(amplitudes.norm() - 1.0) > 1e-10)
        throw InvalidArgs("BipartiteState: amplitudes not normalized");
    auto sd = linalg::schmidt_decompose(amplitudes, d_x, d_r);
    BipartiteState s;
    s.d_x_ = d_x;
    s.d_r_ = d_r;
    s.amplitudes_ = std::move(amplitudes);
    s.coeffs_ = std::move(sd.coeffs);
    s.left_ = std::move(sd.left);
    s.right_ = std::move(sd.right);
    return s;
}

const char* to_string(SetStyle s) {
    return s == SetStyle::orthonormal ? "orthonormal" : "generic";
}

BipartiteState schmidt_rank_state(int d_x, int d_r, int r, RandomStream& rng) {
    if (r < 1 || r > std::min(d_x, d_r))
        throw RankOutOfRange("schmidt_rank_state: need 1 <= r <= min(d_x, d_r)");
    RealVector coeffs = schmidt_coefficients(r, rng);
    ComplexMatrix left = haar_isometry(d_x, r, rng);
    ComplexMatrix right = haar_isometry(d_r, r, rng);
    return BipartiteState::from_schmidt(std::move(coeffs), std::move(left), std::move(right));
}

BipartiteState schmidt_rank_state(int d_x, int d_r, int r, SeedSpec seed) {
    RandomStream rng(seed);
    return schmidt_rank_state(d_x, d_r, r, rng);
}

TrainingSet training_set(const UnitaryOperator& u, int d_r, int r, int t, SetStyle style,
                         SeedSpec seed) {
    const int d = u.dim();
    if (t < 0) throw InvalidArgs("training_set: t must be >= 0");
    if (t > 0 && (r < 1 || r > std::min(d, d_r)))
        throw RankOutOfRange("training_set: need 1 <= r <= min(d, d_r)");
    if (style == SetStyle::orthonormal && r * t > d)
        throw OrthonormalOverflow("training_set: orthonormal style needs r*t <= d");

    RandomStream rng(seed);
    TrainingSet s;
    s.r_ = r;
    s.d_x_ = d;
    s.d_r_ = d_r;
    s.style_ = style;
    s.span_basis_ = ComplexMatrix(d, 0);
    if (t == 0) return s;

    std::vector<BipartiteState> inputs;
    inputs.reserve(t);
    if (style == SetStyle::orthonormal) {
        ComplexMatrix xi_blocks = haar_isometry(d, r * t, rng);
        for (int j = 0; j < t; ++j) {
            RealVector coeffs = schmidt_coefficients(r, rng);
            ComplexMatrix right = haar_isometry(d_r, r, rng);
            inputs.push_back(BipartiteState::from_schmidt(
                std::move(coeffs), xi_blocks.middleCols(j * r, r), std::move(right)));
        }
        s.span_basis_ = std::move(xi_blocks);
    } else {
        ComplexMatrix stacked(d, r * t);
        for (int j = 0; j < t; ++j) {
            inputs.push_back(schmidt_rank_state(d, d_r, r, rng));
            stacked.middleCols(j * r, r) = inputs.back().left_vectors();
        }
        s.span_basis_ = linalg::orthonormal_basis_of_span(stacked).basis;
    }

    s.outputs_.reserve(t);
    for (const BipartiteState& in : inputs)
        s.outputs_.push_back(BipartiteState::from_schmidt(
            in.schmidt_coeffs(), u.matrix() * in.left_vectors(), in.right_vectors()));
    s.inputs_ = std::move(inputs);
    return s;
}

BistochasticMatrix::BistochasticMatrix(Eigen::MatrixXd entries) : entries_(std::move(entries)) {
    if (entries_.rows() != entries_.cols())
        throw NonSquare("BistochasticMatrix: matrix is not square");
    if (entries_.rows() < 2) throw InvalidDimension("BistochasticMatrix: d must be >= 2");
    if (entries_.minCoeff() < 0.0)
        throw InvalidArgs("BistochasticMatrix: negative entry");
    for (Eigen::Index i = 0; i < entries_.rows(); ++i) {
        if (std::abs(entries_.row(i).sum() - 1.0) > 1e-9)
            throw InvalidArgs("BistochasticMatrix: row sum deviates from 1");
        if (std::abs(entries_.col(i).sum() - 1.0) > 1e-9)
            throw InvalidArgs("BistochasticMatrix: column sum deviates from 1");
    }
}

BistochasticMatrix random_bistochastic(int d, SeedSpec seed) {
    if (d < 2) throw InvalidDimension("random_bistochastic: d must be >= 2");
    UnitaryOperator u = haar_unitary(d, seed);
    return BistochasticMatrix(u.matrix().cwiseAbs2());
}

std::vector<HaarMomentCheck> haar_moment_checks(int d, int samples, SeedSpec seed, double phi) {
    if (d < 2) throw InvalidDimension("haar_moment_checks: d must be >= 2");
    if (samples < 2) throw InvalidArgs("haar_moment_checks: need at least 2 samples");

    constexpr int n_stats = 4;
    double sum[n_stats] = {}, sum_sq[n_stats] = {};
    const Complex rotation(std::cos(phi), std::sin(phi));
    RandomStream rng(seed);
    for (int i = 0; i < samples; ++i) {
        const Complex tr = haar_unitary(d, rng).matrix().trace();
        const double rotated = (tr * rotation).real();
        const double stats[n_stats] = {std::norm(tr), std::norm(tr) * std::norm(tr),
                                       rotated * rotated, tr.real()};
        for (int k = 0; k < n_stats; ++k) {
            sum[k] += stats[k];
            sum_sq[k] += stats[k] * stats[k];
        }
    }

    static constexpr const char* names[n_stats] = {"E|Tr Y|^2", "E|Tr Y|^4",
                                                   "E Re(Tr Y e^{i phi})^2", "E Re(Tr Y)"};
    static constexpr double exact[n_stats] = {1.0, 2.0, 0.5, 0.0};
    std::vector<HaarMomentCheck> checks;
    checks.reserve(n_stats);
    for (int k = 0; k < n_stats; ++k) {
        const double mean = sum[k] / samples;
        const double var = std::max(0.0, (sum_sq[k] - samples * mean * mean) / (samples - 1));
        const double stderr = std::sqrt(var / samples);
        const double z = stderr > 0.0 ? (mean - exact[k]) / stderr : 0.0;
        checks.push_back({names[k], mean, exact[k], stderr, z});
    }
    return checks;
}

}  // namespace nfl::sampling
