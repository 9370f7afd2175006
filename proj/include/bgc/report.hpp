#pragma once

// File formats shared by the command-line tools: the JSON run report, label
// CSVs, weight-matrix JSON and the DOT edge list.

#include "bgc/data.hpp"
#include "bgc/solver.hpp"

#include <json.hpp>

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace bgc {

// One optional value per metric; undefined metrics carry a reason instead.
struct MetricSet {
    std::optional<double> acc;
    std::optional<double> purity;
    std::optional<double> mod;
    std::optional<double> ari;
    std::optional<double> chi;
    std::map<std::string, std::string> reasons;
};

struct RunReport {
    std::vector<int> labels;
    MetricSet metrics;
    nlohmann::ordered_json config;
    int iterations = 0;
    bool converged = false;
    std::vector<TraceEntry> trace;
    double timing_ms = 0.0;
};

nlohmann::ordered_json to_json(const MetricSet& metrics);
MetricSet metrics_from_json(const nlohmann::ordered_json& j);

nlohmann::ordered_json to_json(const RunReport& report);
RunReport report_from_json(const nlohmann::ordered_json& j);

// Computes every metric the inputs allow. Missing inputs or undefined values
// leave the metric empty with a reason.
MetricSet evaluate_metrics(const LabeledPartition& pred, const LabeledPartition* truth,
                           const BipartiteWeights* weights, const MemberData* data);

// "member,label" CSV; the last column is read as the label.
std::vector<int> read_labels_csv(const std::filesystem::path& path);
void write_labels_csv(const std::filesystem::path& path, const std::vector<int>& labels,
                      const std::vector<std::string>& names);

// {"members": r, "clusters": k, "B": [[...], ...]}
nlohmann::ordered_json weights_to_json(const BipartiteWeights& weights);
BipartiteWeights weights_from_json(const nlohmann::ordered_json& j);

// Undirected member--center edges with B_ij above the threshold.
std::string weights_to_dot(const BipartiteWeights& weights, const std::vector<std::string>& names,
                           double threshold);

// Shortest decimal string that parses back to the same double.
std::string format_double(double value);

} // namespace bgc
