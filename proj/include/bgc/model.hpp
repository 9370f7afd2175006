#pragma once

// Domain types of the bipartite member/center graph model and the
// quadratic-form kernels shared by every solver step.
//
// Members are the r observed variables, centers the k unobserved cluster
// nodes. The p = r + k node Laplacian is
//
//     L = [ I_r   -B           ]
//         [ -B^T  Diag(B^T 1_r) ]
//
// with B row-stochastic, and each sample's center coordinates are the
// A-weighted averages A^T x of its member coordinates.

#include <Eigen/Dense>

namespace bgc {

using Index = Eigen::Index;
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Mask = Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>;

// Tolerance used when validating simplex constraints on B and A.
inline constexpr double kSimplexTolerance = 1e-9;

// Observed member data: r variables by n samples, plus per-sample energies.
class MemberData {
public:
    explicit MemberData(Matrix samples);

    const Matrix& samples() const { return samples_; }
    // h_i = ||x_i||^2 for every sample column.
    const Vector& energies() const { return energies_; }

    Index members() const { return samples_.rows(); }
    Index sample_count() const { return samples_.cols(); }

private:
    Matrix samples_;
    Vector energies_;
};

// Member-to-center edge weights; r x k, every row on the probability simplex.
class BipartiteWeights {
public:
    explicit BipartiteWeights(Matrix weights, double tolerance = kSimplexTolerance);

    static BipartiteWeights uniform(Index members, Index clusters);

    const Matrix& matrix() const { return weights_; }
    Index members() const { return weights_.rows(); }
    Index clusters() const { return weights_.cols(); }

    // B^T 1_r, the degree of every center node.
    Vector center_degrees() const { return weights_.colwise().sum().transpose(); }
    // Entries carrying an edge (B_ij > 0).
    Mask support() const { return weights_.array() > 0.0; }

private:
    Matrix weights_;
};

// Averaging weights that synthesize the center rows; r x k, every column on
// the simplex and zero wherever the support mask is false.
class CenterMixing {
public:
    // Full support; used for random initial mixing.
    explicit CenterMixing(Matrix mixing, double tolerance = kSimplexTolerance);
    CenterMixing(Matrix mixing, Mask support, double tolerance = kSimplexTolerance);

    const Matrix& matrix() const { return mixing_; }
    const Mask& support() const { return support_; }
    Index members() const { return mixing_.rows(); }
    Index clusters() const { return mixing_.cols(); }

private:
    Matrix mixing_;
    Mask support_;
};

// Rank-(p-k) Laplacian held by its spectral factors L = U Diag(lambda) U^T.
class BlockLaplacian {
public:
    BlockLaplacian(Matrix eigenvectors, Vector eigenvalues);

    const Matrix& eigenvectors() const { return eigenvectors_; }
    const Vector& eigenvalues() const { return eigenvalues_; }
    Index size() const { return eigenvectors_.rows(); }
    Index rank() const { return eigenvalues_.size(); }

    Matrix dense() const;
    // log of the generalized determinant, the sum of log eigenvalues.
    double log_pdet() const;

private:
    Matrix eigenvectors_;
    Vector eigenvalues_;
};

class DualVariable {
public:
    explicit DualVariable(Matrix value);
    static DualVariable zero(Index size) { return DualVariable(Matrix::Zero(size, size)); }

    const Matrix& matrix() const { return value_; }

private:
    Matrix value_;
};

// [[I_r, -B], [-B^T, Diag(B^T 1_r)]]
Matrix block_laplacian(const BipartiteWeights& weights);

// G(A) = -2 A^T x x^T + diag(A^T x x^T A) 1_r^T, evaluated from v = A^T x
// without forming the outer product. Returns k x r.
Matrix g_matrix(const CenterMixing& mixing, const Eigen::Ref<const Vector>& sample);

// x^T L x for the augmented sample [x; A^T x], i.e. h + tr(B G(A)).
double structured_quad_form(const Eigen::Ref<const Vector>& sample,
                            const CenterMixing& mixing,
                            const BipartiteWeights& weights);

// structured_quad_form for every sample column at once.
Vector quad_forms(const MemberData& data, const CenterMixing& mixing,
                  const BipartiteWeights& weights);

} // namespace bgc
