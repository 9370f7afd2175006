#include "bgc/solver.hpp"

#include "bgc/errors.hpp"
#include "bgc/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

namespace bgc {

namespace {

// Relative eigenvalue cutoff for the pseudo-inverse in init_weights.
constexpr double kPinvCutoff = 1e-10;
// Inner PGD loops stop once the relative Frobenius change drops below this.
constexpr double kInnerTolerance = 1e-8;

double relative_change(const Matrix& next, const Matrix& prev)
{
    return (next - prev).norm() / std::max(1.0, prev.norm());
}

void check_shapes(const CenterMixing& mixing, const BipartiteWeights& weights, const MemberData& data)
{
    if (mixing.members() != weights.members() || mixing.clusters() != weights.clusters() ||
        data.members() != weights.members())
        throw InvalidInput("solver: dimension mismatch between data, A and B");
}

// Flips each column so its first non-negligible component is positive.
void normalize_signs(Matrix& vectors)
{
    for (Index j = 0; j < vectors.cols(); ++j) {
        for (Index i = 0; i < vectors.rows(); ++i) {
            if (std::abs(vectors(i, j)) > 1e-12) {
                if (vectors(i, j) < 0.0)
                    vectors.col(j) *= -1.0;
                break;
            }
        }
    }
}

// Positive root of rho x^2 - s x - 1 = 0, written to avoid cancellation.
double positive_root(double sigma, double rho)
{
    const double disc = std::sqrt(sigma * sigma + 4.0 * rho);
    if (sigma >= 0.0)
        return (sigma + disc) / (2.0 * rho);
    return 2.0 / (disc - sigma);
}

Vector project_masked(const Vector& point, const std::vector<Index>& support)
{
    Vector sub(static_cast<Index>(support.size()));
    for (std::size_t s = 0; s < support.size(); ++s)
        sub[static_cast<Index>(s)] = point[support[s]];
    const Vector projected = project_simplex(sub);
    Vector out = Vector::Zero(point.size());
    for (std::size_t s = 0; s < support.size(); ++s)
        out[support[s]] = projected[static_cast<Index>(s)];
    return out;
}

} // namespace

void SolverConfig::validate(Index members) const
{
    if (clusters < 1)
        throw InvalidInput("k must be positive");
    if (clusters >= members)
        throw InvalidInput("k must be smaller than the number of members");
    if (!(nu > 2.0) || !std::isfinite(nu))
        throw InvalidInput("nu must be finite and greater than 2");
    if (!(rho > 0.0) || !std::isfinite(rho))
        throw InvalidInput("rho must be positive");
    if (b_step && !(*b_step > 0.0))
        throw InvalidInput("B step size must be positive");
    if (a_step && !(*a_step > 0.0))
        throw InvalidInput("A step size must be positive");
    if (max_outer < 1 || inner_iters < 1)
        throw InvalidInput("iteration caps must be positive");
    if (!(tol_primal >= 0.0) || !(tol_change >= 0.0))
        throw InvalidInput("tolerances must be non-negative");
}

CenterMixing random_mixing(Index members, Index clusters, MixingInit init, std::uint64_t seed)
{
    if (members < 1 || clusters < 1)
        throw InvalidInput("random_mixing: empty shape");
    std::mt19937_64 rng(seed);
    Matrix a(members, clusters);
    if (init == MixingInit::Uniform) {
        std::uniform_real_distribution<double> draw(0.0, 1.0);
        for (Index j = 0; j < clusters; ++j)
            for (Index i = 0; i < members; ++i)
                a(i, j) = draw(rng);
    } else {
        std::normal_distribution<double> draw(0.0, 1.0);
        for (Index j = 0; j < clusters; ++j)
            for (Index i = 0; i < members; ++i)
                a(i, j) = std::abs(draw(rng));
    }
    for (Index j = 0; j < clusters; ++j) {
        const double total = a.col(j).sum();
        if (total > 0.0)
            a.col(j) /= total;
        else
            a.col(j).setConstant(1.0 / static_cast<double>(members));
    }
    return CenterMixing(std::move(a));
}

BipartiteWeights init_weights(const MemberData& data, const CenterMixing& initial_mixing,
                              Index clusters)
{
    const Index r = data.members();
    if (initial_mixing.members() != r || initial_mixing.clusters() != clusters)
        throw InvalidInput("init_weights: A0 shape does not match data and k");
    if (clusters >= r)
        throw InvalidInput("init_weights: k must be smaller than r");

    const Index p = r + clusters;
    const auto n = static_cast<double>(data.sample_count());
    Matrix augmented(p, data.sample_count());
    augmented.topRows(r) = data.samples();
    augmented.bottomRows(clusters) = initial_mixing.matrix().transpose() * data.samples();
    Matrix moment = augmented * augmented.transpose() / n;
    moment = 0.5 * (moment + moment.transpose());

    const double scale = moment.cwiseAbs().maxCoeff();
    if (!(scale > 0.0))
        throw InitializationError("init_weights: second-moment matrix is zero");

    Eigen::SelfAdjointEigenSolver<Matrix> eig(moment);
    if (eig.info() != Eigen::Success)
        throw NumericalError("init_weights: eigendecomposition failed");
    const Vector& values = eig.eigenvalues();
    const double cutoff = kPinvCutoff * values.cwiseAbs().maxCoeff();
    Vector inverted = Vector::Zero(p);
    for (Index i = 0; i < p; ++i)
        if (values[i] > cutoff)
            inverted[i] = 1.0 / values[i];
    const Matrix& vecs = eig.eigenvectors();
    const Matrix block =
        vecs.topRows(r) * inverted.asDiagonal() * vecs.bottomRows(clusters).transpose();

    return BipartiteWeights(project_rows_simplex((-block).cwiseMax(0.0)));
}

BlockLaplacian l_update(const BipartiteWeights& weights, const DualVariable& dual, double rho,
                        Index clusters)
{
    const Index p = weights.members() + weights.clusters();
    if (dual.matrix().rows() != p || weights.clusters() != clusters)
        throw InvalidInput("l_update: dimension mismatch");
    if (!(rho > 0.0))
        throw InvalidInput("l_update: rho must be positive");

    Matrix target = rho * block_laplacian(weights) - dual.matrix();
    target = 0.5 * (target + target.transpose());
    Eigen::SelfAdjointEigenSolver<Matrix> eig(target);
    if (eig.info() != Eigen::Success)
        throw NumericalError("l_update: eigendecomposition failed");

    // Eigen sorts ascending; keep the top p - k in descending order.
    const Index kept = p - clusters;
    Matrix vectors = eig.eigenvectors().rightCols(kept).rowwise().reverse();
    const Vector sigma = eig.eigenvalues().tail(kept).reverse();
    normalize_signs(vectors);

    Vector lambda(kept);
    for (Index j = 0; j < kept; ++j)
        lambda[j] = positive_root(sigma[j], rho);
    return BlockLaplacian(std::move(vectors), std::move(lambda));
}

Vector mm_sample_weights(const MemberData& data, const CenterMixing& mixing,
                         const BipartiteWeights& weights, double nu)
{
    const auto p = static_cast<double>(weights.members() + weights.clusters());
    const auto n = static_cast<double>(data.sample_count());
    const Vector forms = quad_forms(data, mixing, weights);
    return ((p + nu) / n) / (forms.array() + nu);
}

Matrix b_majorizer_coeffs(const CenterMixing& mixing, const BipartiteWeights& anchor,
                          const BlockLaplacian& laplacian, const DualVariable& dual,
                          const MemberData& data, const SolverConfig& config)
{
    check_shapes(mixing, anchor, data);
    const Index r = anchor.members();
    const Index k = anchor.clusters();
    if (laplacian.size() != r + k || dual.matrix().rows() != r + k)
        throw InvalidInput("b_majorizer_coeffs: L or Y has the wrong size");

    const Vector w = mm_sample_weights(data, mixing, anchor, config.nu);
    const Matrix& x = data.samples();
    const Matrix scatter = x * w.asDiagonal() * x.transpose();
    const Matrix& a = mixing.matrix();
    const Matrix as = a.transpose() * scatter; // k x r
    Matrix coeffs = -2.0 * as;
    coeffs.colwise() += (as * a).diagonal();

    const Matrix m = laplacian.dense() + dual.matrix() / config.rho;
    Matrix penalty = m.topRightCorner(r, k).transpose() + m.bottomLeftCorner(k, r);
    penalty.colwise() -= m.diagonal().tail(k);
    coeffs += config.rho * penalty;
    return coeffs;
}

double b_surrogate(const Matrix& weights, const Matrix& coeffs, double rho)
{
    const Vector degrees = weights.colwise().sum().transpose();
    return (weights * coeffs).trace() + rho * weights.squaredNorm() + 0.5 * rho * degrees.squaredNorm();
}

Matrix b_surrogate_gradient(const Matrix& weights, const Matrix& coeffs, double rho)
{
    Matrix grad = coeffs.transpose() + 2.0 * rho * weights;
    grad.rowwise() += rho * weights.colwise().sum();
    return grad;
}

BipartiteWeights b_update(const BipartiteWeights& anchor, const Matrix& coeffs, double rho,
                          std::optional<double> step, int inner_iters)
{
    const Index r = anchor.members();
    if (coeffs.rows() != anchor.clusters() || coeffs.cols() != r)
        throw InvalidInput("b_update: H must be k x r");
    const double mu = step.value_or(1.0 / (rho * (static_cast<double>(r) + 2.0)));

    Matrix current = anchor.matrix();
    for (int it = 0; it < inner_iters; ++it) {
        const Matrix grad = b_surrogate_gradient(current, coeffs, rho);
        if (!grad.allFinite())
            throw NumericalError("b_update: non-finite gradient");
        Matrix next = project_rows_simplex(current - mu * grad);
        const double change = relative_change(next, current);
        current = std::move(next);
        if (change < kInnerTolerance)
            break;
    }
    return BipartiteWeights(std::move(current));
}

Matrix a_majorizer_matrix(const CenterMixing& anchor, const BipartiteWeights& weights,
                          const MemberData& data, const SolverConfig& config)
{
    check_shapes(anchor, weights, data);
    const Vector w = mm_sample_weights(data, anchor, weights, config.nu);
    const Matrix& x = data.samples();
    Matrix scatter = x * w.asDiagonal() * x.transpose();
    return 0.5 * (scatter + scatter.transpose());
}

double a_column_surrogate(const Vector& column, const Vector& weight_column, const Matrix& scatter)
{
    const double mass = weight_column.sum();
    return mass * column.dot(scatter * column) - 2.0 * weight_column.dot(scatter * column);
}

Vector a_column_gradient(const Vector& column, const Vector& weight_column, const Matrix& scatter)
{
    const double mass = weight_column.sum();
    return 2.0 * scatter * (mass * column - weight_column);
}

CenterMixing a_update(const CenterMixing& anchor, const BipartiteWeights& weights,
                      const Matrix& scatter, std::optional<double> step, int inner_iters)
{
    const Index r = weights.members();
    const Index k = weights.clusters();
    if (anchor.members() != r || anchor.clusters() != k || scatter.rows() != r || scatter.cols() != r)
        throw InvalidInput("a_update: dimension mismatch");

    const Mask support = weights.support();
    const double trace = scatter.trace();
    Matrix out = Matrix::Zero(r, k);
    for (Index j = 0; j < k; ++j) {
        std::vector<Index> members;
        for (Index i = 0; i < r; ++i)
            if (support(i, j))
                members.push_back(i);
        if (members.empty())
            throw DegenerateCluster("cluster " + std::to_string(j) + " has no members");

        const Vector b = weights.matrix().col(j);
        const double mass = b.sum();
        Vector current = project_masked(anchor.matrix().col(j), members);
        if (trace > 0.0) {
            const double eta = step.value_or(1.0 / (2.0 * std::max(mass, 1e-12) * trace));
            for (int it = 0; it < inner_iters; ++it) {
                const Vector grad = a_column_gradient(current, b, scatter);
                if (!grad.allFinite())
                    throw NumericalError("a_update: non-finite gradient");
                Vector next = project_masked(current - eta * grad, members);
                const double change = (next - current).norm() / std::max(1.0, current.norm());
                current = std::move(next);
                if (change < kInnerTolerance)
                    break;
            }
        }
        out.col(j) = current;
    }
    return CenterMixing(std::move(out), support);
}

DualVariable dual_update(const DualVariable& dual, const BlockLaplacian& laplacian,
                         const BipartiteWeights& weights, double rho)
{
    const Index p = weights.members() + weights.clusters();
    if (dual.matrix().rows() != p || laplacian.size() != p)
        throw InvalidInput("dual_update: dimension mismatch");
    Matrix next = dual.matrix() + rho * (laplacian.dense() - block_laplacian(weights));
    return DualVariable(0.5 * (next + next.transpose()));
}

double objective(const BlockLaplacian& laplacian, const BipartiteWeights& weights,
                 const CenterMixing& mixing, const MemberData& data, const SolverConfig& config)
{
    check_shapes(mixing, weights, data);
    if (laplacian.rank() > 0 && laplacian.eigenvalues().minCoeff() <= 0.0)
        throw NumericalError("objective: non-positive eigenvalue in L");
    const auto p = static_cast<double>(weights.members() + weights.clusters());
    const auto n = static_cast<double>(data.sample_count());
    const Vector forms = quad_forms(data, mixing, weights);
    const double fit = (forms.array() / config.nu).log1p().sum() * (p + config.nu) / n;
    return fit - laplacian.log_pdet();
}

std::vector<int> row_argmax(const Matrix& weights)
{
    std::vector<int> labels(static_cast<std::size_t>(weights.rows()), 0);
    for (Index i = 0; i < weights.rows(); ++i) {
        Index best = 0;
        for (Index j = 1; j < weights.cols(); ++j)
            if (weights(i, j) > weights(i, best))
                best = j;
        labels[static_cast<std::size_t>(i)] = static_cast<int>(best);
    }
    return labels;
}

ClusterResult run(const MemberData& data, const SolverConfig& config,
                  const CenterMixing& initial_mixing, const IterationObserver& observer)
{
    config.validate(data.members());
    const Index k = config.clusters;
    if (initial_mixing.members() != data.members() || initial_mixing.clusters() != k)
        throw InvalidInput("run: A0 shape does not match data and k");

    const Index p = data.members() + k;
    SolverState state{
        l_update(BipartiteWeights::uniform(data.members(), k), DualVariable::zero(p), config.rho, k),
        init_weights(data, initial_mixing, k),
        initial_mixing,
        DualVariable::zero(p),
        0,
        {},
    };

    bool converged = false;
    while (state.iter < config.max_outer) {
        state.laplacian = l_update(state.weights, state.dual, config.rho, k);

        const Matrix coeffs = b_majorizer_coeffs(state.mixing, state.weights, state.laplacian,
                                                 state.dual, data, config);
        BipartiteWeights next_weights =
            b_update(state.weights, coeffs, config.rho, config.b_step, config.inner_iters);

        const Matrix scatter = a_majorizer_matrix(state.mixing, next_weights, data, config);
        state.mixing = a_update(state.mixing, next_weights, scatter, config.a_step, config.inner_iters);
        state.dual = dual_update(state.dual, state.laplacian, next_weights, config.rho);

        const Matrix dense = state.laplacian.dense();
        TraceEntry entry;
        entry.iter = ++state.iter;
        entry.primal_residual =
            (dense - block_laplacian(next_weights)).norm() / std::max(1.0, dense.norm());
        entry.b_change = relative_change(next_weights.matrix(), state.weights.matrix());
        state.weights = std::move(next_weights);
        entry.objective = objective(state.laplacian, state.weights, state.mixing, data, config);
        state.trace.push_back(entry);

        if (observer)
            observer(state);
        if (entry.primal_residual < config.tol_primal && entry.b_change < config.tol_change) {
            converged = true;
            break;
        }
    }

    return ClusterResult{row_argmax(state.weights.matrix()), state.weights, state.mixing,
                         converged, state.iter, std::move(state.trace)};
}

ClusterResult run(const MemberData& data, const SolverConfig& config, MixingInit init,
                  const IterationObserver& observer)
{
    config.validate(data.members());
    return run(data, config, random_mixing(data.members(), config.clusters, init, config.seed), observer);
}

} // namespace bgc
