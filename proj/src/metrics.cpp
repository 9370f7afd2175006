#include "bgc/metrics.hpp"

#include "bgc/errors.hpp"
#include "bgc/solver.hpp"

#include <algorithm>
#include <limits>
#include <string>

namespace bgc {

namespace {

void require_same_length(const LabeledPartition& a, const LabeledPartition& b)
{
    if (a.size() != b.size())
        throw InvalidInput("label vectors differ in length");
}

Matrix contingency(const LabeledPartition& truth, const LabeledPartition& pred)
{
    Matrix table = Matrix::Zero(truth.clusters(), pred.clusters());
    for (std::size_t i = 0; i < truth.size(); ++i)
        table(truth.labels()[i], pred.labels()[i]) += 1.0;
    return table;
}

double pairs(double count) { return 0.5 * count * (count - 1.0); }

} // namespace

LabeledPartition::LabeledPartition(std::vector<int> labels, int clusters)
    : labels_(std::move(labels)), clusters_(clusters)
{
    if (clusters_ < 1)
        throw InvalidInput("partition needs at least one cluster");
    for (int label : labels_)
        if (label < 0 || label >= clusters_)
            throw InvalidInput("label " + std::to_string(label) + " out of range");
}

LabeledPartition::LabeledPartition(std::vector<int> labels)
    : LabeledPartition(labels, labels.empty() ? 1 : 1 + *std::max_element(labels.begin(), labels.end()))
{
}

LabeledPartition labels_from_b(const BipartiteWeights& weights)
{
    return LabeledPartition(row_argmax(weights.matrix()), static_cast<int>(weights.clusters()));
}

std::vector<int> max_weight_assignment(const Matrix& weights)
{
    // Hungarian algorithm (potentials form) on the cost -weights.
    const Index n = weights.rows();
    if (weights.cols() != n)
        throw InvalidInput("assignment needs a square matrix");
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
    std::vector<Index> match(n + 1, 0), way(n + 1, 0);
    for (Index row = 1; row <= n; ++row) {
        match[0] = row;
        Index col0 = 0;
        std::vector<double> minv(n + 1, inf);
        std::vector<char> used(n + 1, 0);
        do {
            used[col0] = 1;
            const Index row0 = match[col0];
            double delta = inf;
            Index col1 = 0;
            for (Index col = 1; col <= n; ++col) {
                if (used[col])
                    continue;
                const double cur = -weights(row0 - 1, col - 1) - u[row0] - v[col];
                if (cur < minv[col]) {
                    minv[col] = cur;
                    way[col] = col0;
                }
                if (minv[col] < delta) {
                    delta = minv[col];
                    col1 = col;
                }
            }
            for (Index col = 0; col <= n; ++col) {
                if (used[col]) {
                    u[match[col]] += delta;
                    v[col] -= delta;
                } else {
                    minv[col] -= delta;
                }
            }
            col0 = col1;
        } while (match[col0] != 0);
        do {
            const Index col1 = way[col0];
            match[col0] = match[col1];
            col0 = col1;
        } while (col0 != 0);
    }
    std::vector<int> assignment(static_cast<std::size_t>(n), 0);
    for (Index col = 1; col <= n; ++col)
        assignment[static_cast<std::size_t>(match[col] - 1)] = static_cast<int>(col - 1);
    return assignment;
}

double accuracy(const LabeledPartition& truth, const LabeledPartition& pred)
{
    require_same_length(truth, pred);
    if (truth.size() == 0)
        throw UndefinedMetric("accuracy of an empty partition");
    const int k = std::max(truth.clusters(), pred.clusters());
    Matrix confusion = Matrix::Zero(k, k);
    confusion.topLeftCorner(truth.clusters(), pred.clusters()) = contingency(truth, pred);
    const std::vector<int> assignment = max_weight_assignment(confusion);
    double hits = 0.0;
    for (int t = 0; t < k; ++t)
        hits += confusion(t, assignment[static_cast<std::size_t>(t)]);
    return hits / static_cast<double>(truth.size());
}

double purity(const LabeledPartition& truth, const LabeledPartition& pred)
{
    require_same_length(truth, pred);
    if (truth.size() == 0)
        throw UndefinedMetric("purity of an empty partition");
    const Matrix table = contingency(truth, pred);
    return table.colwise().maxCoeff().sum() / static_cast<double>(truth.size());
}

double ari(const LabeledPartition& truth, const LabeledPartition& pred)
{
    require_same_length(truth, pred);
    if (truth.size() < 2)
        throw UndefinedMetric("ARI needs at least two members");
    const Matrix table = contingency(truth, pred);
    double index = 0.0;
    for (Index i = 0; i < table.rows(); ++i)
        for (Index j = 0; j < table.cols(); ++j)
            index += pairs(table(i, j));
    double row_pairs = 0.0;
    for (Index i = 0; i < table.rows(); ++i)
        row_pairs += pairs(table.row(i).sum());
    double col_pairs = 0.0;
    for (Index j = 0; j < table.cols(); ++j)
        col_pairs += pairs(table.col(j).sum());
    const double expected = row_pairs * col_pairs / pairs(static_cast<double>(truth.size()));
    const double max_index = 0.5 * (row_pairs + col_pairs);
    if (max_index == expected)
        return 1.0; // both partitions trivial in the same way
    return (index - expected) / (max_index - expected);
}

double modularity(const BipartiteWeights& weights, const LabeledPartition& labels)
{
    const Matrix& b = weights.matrix();
    const Index r = b.rows();
    const Index k = b.cols();
    if (static_cast<Index>(labels.size()) != r)
        throw InvalidInput("modularity: label count does not match members");
    const double total = b.sum(); // m
    if (!(total > 0.0))
        throw UndefinedMetric("modularity of a graph without edges");

    // Every edge joins a member to a center, so the weight inside a label is
    // sum_{i : c_i = j} B_ij, and the degree mass of a label adds member
    // degrees to the center degree.
    const int groups = std::max(labels.clusters(), static_cast<int>(k));
    Vector inner = Vector::Zero(groups);
    Vector degree = Vector::Zero(groups);
    const Vector member_degree = b.rowwise().sum();
    const Vector center_degree = b.colwise().sum().transpose();
    for (Index i = 0; i < r; ++i) {
        const int c = labels.labels()[static_cast<std::size_t>(i)];
        degree[c] += member_degree[i];
        if (c < k)
            inner[c] += b(i, c);
    }
    for (Index j = 0; j < k; ++j)
        degree[j] += center_degree[j];
    const double two_m = 2.0 * total;
    // W is symmetric, so each in-label edge appears twice in sum_ij W_ij.
    return (2.0 * inner.sum()) / two_m - degree.squaredNorm() / (two_m * two_m);
}

double chi(const MemberData& data, const LabeledPartition& labels)
{
    const Matrix& x = data.samples();
    const Index r = x.rows();
    if (static_cast<Index>(labels.size()) != r)
        throw InvalidInput("chi: label count does not match members");

    const int k = labels.clusters();
    Matrix centroids = Matrix::Zero(k, x.cols());
    Vector counts = Vector::Zero(k);
    for (Index i = 0; i < r; ++i) {
        const int c = labels.labels()[static_cast<std::size_t>(i)];
        centroids.row(c) += x.row(i);
        counts[c] += 1.0;
    }
    int nonempty = 0;
    for (int c = 0; c < k; ++c) {
        if (counts[c] > 0.0) {
            centroids.row(c) /= counts[c];
            ++nonempty;
        }
    }
    if (nonempty < 2)
        throw UndefinedMetric("CHI needs at least two non-empty clusters");

    const Eigen::RowVectorXd mean = x.colwise().mean();
    double between = 0.0;
    for (int c = 0; c < k; ++c)
        if (counts[c] > 0.0)
            between += counts[c] * (centroids.row(c) - mean).squaredNorm();
    double within = 0.0;
    for (Index i = 0; i < r; ++i)
        within += (x.row(i) - centroids.row(labels.labels()[static_cast<std::size_t>(i)])).squaredNorm();
    if (!(within > 0.0))
        throw UndefinedMetric("CHI undefined: zero within-cluster dispersion");
    return (between / (nonempty - 1)) / (within / static_cast<double>(r - nonempty));
}

} // namespace bgc
