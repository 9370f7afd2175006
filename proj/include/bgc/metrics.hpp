#pragma once

#include "bgc/model.hpp"

#include <vector>

namespace bgc {

// Cluster labels of the r members, each in [0, clusters).
class LabeledPartition {
public:
    LabeledPartition(std::vector<int> labels, int clusters);
    // Uses 1 + max label as the cluster count.
    explicit LabeledPartition(std::vector<int> labels);

    const std::vector<int>& labels() const { return labels_; }
    int clusters() const { return clusters_; }
    std::size_t size() const { return labels_.size(); }

private:
    std::vector<int> labels_;
    int clusters_;
};

LabeledPartition labels_from_b(const BipartiteWeights& weights);

// Best agreement over all relabelings of pred, found by optimal assignment on
// the confusion matrix. Denominator is the member count.
double accuracy(const LabeledPartition& truth, const LabeledPartition& pred);

// Sum over predicted clusters of the majority true-class count, over r.
double purity(const LabeledPartition& truth, const LabeledPartition& pred);

// Adjusted Rand index. Throws UndefinedMetric for fewer than two members.
double ari(const LabeledPartition& truth, const LabeledPartition& pred);

// Newman modularity of the weighted member/center graph built from B, with
// member i labeled by labels[i] and center j labeled j.
double modularity(const BipartiteWeights& weights, const LabeledPartition& labels);

// Calinski-Harabasz index with each member's row of X as its feature vector.
double chi(const MemberData& data, const LabeledPartition& labels);

// Maximum-weight perfect matching on a square matrix; returns row -> column.
std::vector<int> max_weight_assignment(const Matrix& weights);

} // namespace bgc
