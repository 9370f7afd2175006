#include "bgc/report.hpp"

#include "bgc/errors.hpp"

#include <array>
#include <charconv>
#include <fstream>
#include <sstream>

namespace bgc {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

constexpr std::array<const char*, 5> kMetricNames{"acc", "purity", "mod", "ari", "chi"};

std::optional<double>* metric_slot(MetricSet& m, const std::string& name)
{
    if (name == "acc") return &m.acc;
    if (name == "purity") return &m.purity;
    if (name == "mod") return &m.mod;
    if (name == "ari") return &m.ari;
    if (name == "chi") return &m.chi;
    return nullptr;
}

template <typename Fn>
void try_metric(MetricSet& out, const std::string& name, Fn&& compute)
{
    try {
        *metric_slot(out, name) = compute();
    } catch (const UndefinedMetric& e) {
        out.reasons[name] = e.what();
    }
}

} // namespace

ordered_json to_json(const MetricSet& metrics)
{
    ordered_json j = ordered_json::object();
    MetricSet copy = metrics;
    for (const char* name : kMetricNames) {
        const auto& slot = *metric_slot(copy, name);
        j[name] = slot ? ordered_json(*slot) : ordered_json(nullptr);
    }
    if (!metrics.reasons.empty())
        j["reasons"] = metrics.reasons;
    return j;
}

MetricSet metrics_from_json(const ordered_json& j)
{
    MetricSet m;
    for (const char* name : kMetricNames)
        if (j.contains(name) && !j.at(name).is_null())
            *metric_slot(m, name) = j.at(name).get<double>();
    if (j.contains("reasons"))
        m.reasons = j.at("reasons").get<std::map<std::string, std::string>>();
    return m;
}

ordered_json to_json(const RunReport& report)
{
    ordered_json trace = ordered_json::array();
    for (const auto& t : report.trace)
        trace.push_back({{"iter", t.iter}, {"objective", t.objective}, {"primal_residual", t.primal_residual}});
    ordered_json j;
    j["labels"] = report.labels;
    j["metrics"] = to_json(report.metrics);
    j["config"] = report.config;
    j["iterations"] = report.iterations;
    j["converged"] = report.converged;
    j["trace"] = std::move(trace);
    j["timing_ms"] = report.timing_ms;
    return j;
}

RunReport report_from_json(const ordered_json& j)
{
    try {
        RunReport report;
        report.labels = j.at("labels").get<std::vector<int>>();
        report.metrics = metrics_from_json(j.at("metrics"));
        report.config = j.at("config");
        report.iterations = j.at("iterations").get<int>();
        report.converged = j.at("converged").get<bool>();
        for (const auto& t : j.at("trace")) {
            TraceEntry entry;
            entry.iter = t.at("iter").get<int>();
            entry.objective = t.at("objective").get<double>();
            entry.primal_residual = t.at("primal_residual").get<double>();
            report.trace.push_back(entry);
        }
        report.timing_ms = j.at("timing_ms").get<double>();
        return report;
    } catch (const json::exception& e) {
        throw ParseError(std::string("malformed run report: ") + e.what());
    }
}

MetricSet evaluate_metrics(const LabeledPartition& pred, const LabeledPartition* truth,
                           const BipartiteWeights* weights, const MemberData* data)
{
    MetricSet out;
    if (truth) {
        try_metric(out, "acc", [&] { return accuracy(*truth, pred); });
        try_metric(out, "purity", [&] { return purity(*truth, pred); });
        try_metric(out, "ari", [&] { return ari(*truth, pred); });
    } else {
        for (const char* name : {"acc", "purity", "ari"})
            out.reasons[name] = "no truth labels provided";
    }
    if (weights)
        try_metric(out, "mod", [&] { return modularity(*weights, pred); });
    else
        out.reasons["mod"] = "no graph provided";
    if (data)
        try_metric(out, "chi", [&] { return chi(*data, pred); });
    else
        out.reasons["chi"] = "no data provided";
    return out;
}

std::vector<int> read_labels_csv(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw ParseError("cannot open " + path.string());
    std::string line;
    std::vector<int> labels;
    bool header = true;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (line.empty())
            continue;
        if (header) {
            header = false;
            continue;
        }
        const std::string cell = line.substr(line.find_last_of(',') == std::string::npos
                                                 ? 0
                                                 : line.find_last_of(',') + 1);
        int value = 0;
        const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
        if (ec != std::errc() || ptr != cell.data() + cell.size())
            throw ParseError(path.string() + ":" + std::to_string(line_no) + ": bad label '" + cell + "'");
        labels.push_back(value);
    }
    if (labels.empty())
        throw ParseError(path.string() + ": no labels");
    return labels;
}

void write_labels_csv(const std::filesystem::path& path, const std::vector<int>& labels,
                      const std::vector<std::string>& names)
{
    std::ofstream out(path);
    if (!out)
        throw ParseError("cannot write " + path.string());
    out << "member,label\n";
    for (std::size_t i = 0; i < labels.size(); ++i)
        out << (i < names.size() ? names[i] : std::to_string(i)) << ',' << labels[i] << '\n';
}

ordered_json weights_to_json(const BipartiteWeights& weights)
{
    const Matrix& b = weights.matrix();
    ordered_json rows = ordered_json::array();
    for (Index i = 0; i < b.rows(); ++i) {
        std::vector<double> row(b.cols());
        for (Index j = 0; j < b.cols(); ++j)
            row[static_cast<std::size_t>(j)] = b(i, j);
        rows.push_back(row);
    }
    ordered_json j;
    j["members"] = b.rows();
    j["clusters"] = b.cols();
    j["B"] = std::move(rows);
    return j;
}

BipartiteWeights weights_from_json(const ordered_json& j)
{
    try {
        const auto rows = j.at("B").get<std::vector<std::vector<double>>>();
        if (rows.empty() || rows.front().empty())
            throw ParseError("weights JSON: empty B");
        Matrix b(static_cast<Index>(rows.size()), static_cast<Index>(rows.front().size()));
        for (std::size_t i = 0; i < rows.size(); ++i) {
            if (rows[i].size() != rows.front().size())
                throw ParseError("weights JSON: ragged B");
            for (std::size_t c = 0; c < rows[i].size(); ++c)
                b(static_cast<Index>(i), static_cast<Index>(c)) = rows[i][c];
        }
        return BipartiteWeights(std::move(b));
    } catch (const json::exception& e) {
        throw ParseError(std::string("malformed weights JSON: ") + e.what());
    } catch (const InvalidInput& e) {
        throw ParseError(std::string("weights JSON: ") + e.what());
    }
}

std::string weights_to_dot(const BipartiteWeights& weights, const std::vector<std::string>& names,
                           double threshold)
{
    const Matrix& b = weights.matrix();
    std::ostringstream out;
    out << "graph bipartite {\n";
    for (Index i = 0; i < b.rows(); ++i) {
        const auto idx = static_cast<std::size_t>(i);
        out << "  m" << i << " [label=\"" << (idx < names.size() ? names[idx] : "m" + std::to_string(i))
            << "\"];\n";
    }
    for (Index j = 0; j < b.cols(); ++j)
        out << "  c" << j << " [label=\"center " << j << "\", shape=box];\n";
    for (Index i = 0; i < b.rows(); ++i)
        for (Index j = 0; j < b.cols(); ++j)
            if (b(i, j) > threshold)
                out << "  m" << i << " -- c" << j << " [weight=" << format_double(b(i, j)) << "];\n";
    out << "}\n";
    return out.str();
}

std::string format_double(double value)
{
    std::array<char, 32> buf{};
    const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
    return std::string(buf.data(), ptr);
}

} // namespace bgc
