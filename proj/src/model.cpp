#include "bgc/model.hpp"

#include "bgc/errors.hpp"

#include <cmath>
#include <string>

namespace bgc {

namespace {

void require_finite(const Matrix& m, const char* what)
{
    if (!m.allFinite())
        throw InvalidInput(std::string(what) + ": non-finite entries");
}

void require_nonnegative(const Matrix& m, const char* what)
{
    if (m.size() > 0 && m.minCoeff() < 0.0)
        throw InvalidInput(std::string(what) + ": negative entries");
}

} // namespace

MemberData::MemberData(Matrix samples) : samples_(std::move(samples))
{
    if (samples_.rows() < 2)
        throw InvalidInput("member data needs at least two members");
    if (samples_.cols() < 1)
        throw InvalidInput("member data needs at least one sample");
    require_finite(samples_, "member data");
    energies_ = samples_.colwise().squaredNorm().transpose();
}

BipartiteWeights::BipartiteWeights(Matrix weights, double tolerance)
    : weights_(std::move(weights))
{
    if (weights_.rows() < 1 || weights_.cols() < 1)
        throw InvalidInput("bipartite weights must be non-empty");
    require_finite(weights_, "bipartite weights");
    require_nonnegative(weights_, "bipartite weights");
    const Vector sums = weights_.rowwise().sum();
    if ((sums.array() - 1.0).abs().maxCoeff() > tolerance)
        throw InvalidInput("bipartite weights: rows must sum to one");
}

BipartiteWeights BipartiteWeights::uniform(Index members, Index clusters)
{
    return BipartiteWeights(Matrix::Constant(members, clusters, 1.0 / static_cast<double>(clusters)));
}

CenterMixing::CenterMixing(Matrix mixing, double tolerance)
    : CenterMixing(mixing, Mask::Constant(mixing.rows(), mixing.cols(), true), tolerance)
{
}

CenterMixing::CenterMixing(Matrix mixing, Mask support, double tolerance)
    : mixing_(std::move(mixing)), support_(std::move(support))
{
    if (mixing_.rows() < 1 || mixing_.cols() < 1)
        throw InvalidInput("center mixing must be non-empty");
    if (support_.rows() != mixing_.rows() || support_.cols() != mixing_.cols())
        throw InvalidInput("center mixing: support mask has wrong shape");
    require_finite(mixing_, "center mixing");
    require_nonnegative(mixing_, "center mixing");
    if (((!support_) && (mixing_.array() != 0.0)).any())
        throw InvalidInput("center mixing: weight outside the support mask");
    const Vector sums = mixing_.colwise().sum().transpose();
    if ((sums.array() - 1.0).abs().maxCoeff() > tolerance)
        throw InvalidInput("center mixing: columns must sum to one");
}

BlockLaplacian::BlockLaplacian(Matrix eigenvectors, Vector eigenvalues)
    : eigenvectors_(std::move(eigenvectors)), eigenvalues_(std::move(eigenvalues))
{
    if (eigenvectors_.cols() != eigenvalues_.size())
        throw InvalidInput("block laplacian: eigenpair count mismatch");
    if (!eigenvectors_.allFinite() || !eigenvalues_.allFinite())
        throw NumericalError("block laplacian: non-finite spectrum");
    if (eigenvalues_.size() > 0 && eigenvalues_.minCoeff() <= 0.0)
        throw NumericalError("block laplacian: kept eigenvalues must be positive");
}

Matrix BlockLaplacian::dense() const
{
    Matrix dense = eigenvectors_ * eigenvalues_.asDiagonal() * eigenvectors_.transpose();
    return 0.5 * (dense + dense.transpose());
}

double BlockLaplacian::log_pdet() const
{
    return eigenvalues_.array().log().sum();
}

DualVariable::DualVariable(Matrix value) : value_(std::move(value))
{
    if (value_.rows() != value_.cols())
        throw InvalidInput("dual variable must be square");
    require_finite(value_, "dual variable");
}

Matrix block_laplacian(const BipartiteWeights& weights)
{
    const Matrix& b = weights.matrix();
    const Index r = b.rows();
    const Index k = b.cols();
    Matrix l = Matrix::Zero(r + k, r + k);
    l.topLeftCorner(r, r).setIdentity();
    l.topRightCorner(r, k) = -b;
    l.bottomLeftCorner(k, r) = -b.transpose();
    l.bottomRightCorner(k, k).diagonal() = weights.center_degrees();
    return l;
}

Matrix g_matrix(const CenterMixing& mixing, const Eigen::Ref<const Vector>& sample)
{
    if (sample.size() != mixing.members())
        throw InvalidInput("g_matrix: sample length does not match member count");
    const Vector v = mixing.matrix().transpose() * sample;
    Matrix g = -2.0 * v * sample.transpose();
    g.colwise() += v.cwiseAbs2();
    return g;
}

double structured_quad_form(const Eigen::Ref<const Vector>& sample,
                            const CenterMixing& mixing,
                            const BipartiteWeights& weights)
{
    if (sample.size() != mixing.members() || mixing.members() != weights.members() ||
        mixing.clusters() != weights.clusters())
        throw InvalidInput("structured_quad_form: dimension mismatch");
    const Vector v = mixing.matrix().transpose() * sample;
    const Vector bx = weights.matrix().transpose() * sample;
    const double value = sample.squaredNorm() - 2.0 * bx.dot(v) +
                         weights.center_degrees().dot(v.cwiseAbs2());
    // PSD form; only rounding can push it below zero.
    return value < 0.0 ? 0.0 : value;
}

Vector quad_forms(const MemberData& data, const CenterMixing& mixing,
                  const BipartiteWeights& weights)
{
    if (data.members() != mixing.members() || mixing.members() != weights.members() ||
        mixing.clusters() != weights.clusters())
        throw InvalidInput("quad_forms: dimension mismatch");
    const Matrix v = mixing.matrix().transpose() * data.samples();  // k x n
    const Matrix bx = weights.matrix().transpose() * data.samples(); // k x n
    const Vector degrees = weights.center_degrees();
    Vector out = data.energies();
    out.array() -= 2.0 * (bx.array() * v.array()).colwise().sum().transpose();
    out.array() += (v.array().square().colwise() * degrees.array()).colwise().sum().transpose();
    return out.cwiseMax(0.0);
}

} // namespace bgc
