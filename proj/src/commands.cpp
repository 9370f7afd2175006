#include "bgc/commands.hpp"

#include "bgc/data.hpp"
#include "bgc/errors.hpp"
#include "bgc/report.hpp"
#include "bgc/solver.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>

namespace bgc {

namespace {

using nlohmann::ordered_json;

// Argument problems detected after CLI11 parsing.
class UsageError : public Error {
public:
    using Error::Error;
};

struct ClusterOptions {
    std::string input;
    bool returns = false;
    int k = 0;
    std::optional<double> nu;
    bool fit_nu = false;
    double rho = 1.0;
    std::string mu = "auto";
    std::string eta = "auto";
    int inner_iters = 50;
    int max_iter = 1000;
    double tol = 1e-5;
    double tol_change = 1e-6;
    std::string init = "normal";
    std::uint64_t seed = 0;
    std::string truth;
    std::string out = "-";
    std::string dot;
    double threshold = 1e-6;
    std::string weights_out;
};

struct SynthOptions {
    Index r = 60;
    Index k = 3;
    Index n = 2000;
    double nu = 5.0;
    double sep = 0.9;
    std::uint64_t seed = 1;
    std::string prefix = "synth";
    bool returns = false;
};

struct EvalOptions {
    std::string report;
    std::string labels;
    std::string truth;
    std::string data;
    bool returns = false;
    std::string graph;
    std::string out = "-";
};

std::optional<double> parse_step(const std::string& text, const char* flag)
{
    if (text == "auto")
        return std::nullopt;
    try {
        std::size_t used = 0;
        const double value = std::stod(text, &used);
        if (used != text.size() || !(value > 0.0) || !std::isfinite(value))
            throw UsageError("");
        return value;
    } catch (const std::exception&) {
        throw UsageError(std::string(flag) + " must be 'auto' or a positive number");
    }
}

void write_text(const std::string& path, const std::string& text, std::ostream& out)
{
    if (path == "-") {
        out << text;
        return;
    }
    std::ofstream file(path);
    if (!file)
        throw ParseError("cannot write " + path);
    file << text;
}

ordered_json read_json_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw ParseError("cannot open " + path);
    try {
        return ordered_json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(path + ": " + e.what());
    }
}

LabeledPartition read_partition(const std::string& path)
{
    try {
        return LabeledPartition(read_labels_csv(path));
    } catch (const InvalidInput& e) {
        throw ParseError(path + ": " + e.what());
    }
}

int cluster_command(const ClusterOptions& opt, std::ostream& out)
{
    const auto start = std::chrono::steady_clock::now();
    if (opt.k < 2)
        throw UsageError("--k must be at least 2");
    if (opt.nu && opt.fit_nu)
        throw UsageError("--nu and --fit-nu are mutually exclusive");
    if (opt.init != "normal" && opt.init != "uniform")
        throw UsageError("--init must be 'normal' or 'uniform'");

    SolverConfig config;
    config.clusters = opt.k;
    config.rho = opt.rho;
    config.b_step = parse_step(opt.mu, "--mu");
    config.a_step = parse_step(opt.eta, "--eta");
    config.inner_iters = opt.inner_iters;
    config.max_outer = opt.max_iter;
    config.tol_primal = opt.tol;
    config.tol_change = opt.tol_change;
    config.seed = opt.seed;

    std::ifstream in(opt.input);
    if (!in)
        throw ParseError("cannot open " + opt.input);
    const PriceTable table = read_price_table(in);
    const MemberData data = returns_from_table(table, opt.returns);

    config.nu = opt.nu ? *opt.nu : estimate_nu(data);
    try {
        config.validate(data.members());
    } catch (const InvalidInput& e) {
        throw UsageError(e.what());
    }

    const MixingInit init = opt.init == "uniform" ? MixingInit::Uniform : MixingInit::Normal;
    const ClusterResult result = run(data, config, init);

    std::optional<LabeledPartition> truth;
    if (!opt.truth.empty()) {
        truth = read_partition(opt.truth);
        if (truth->size() != static_cast<std::size_t>(data.members()))
            throw ParseError("--truth has " + std::to_string(truth->size()) + " labels for " +
                             std::to_string(data.members()) + " members");
    }
    const LabeledPartition pred(result.labels, static_cast<int>(config.clusters));

    RunReport report;
    report.labels = result.labels;
    report.metrics = evaluate_metrics(pred, truth ? &*truth : nullptr, &result.weights, &data);
    report.config = ordered_json{
        {"input", opt.input},
        {"returns", opt.returns},
        {"k", config.clusters},
        {"nu", config.nu},
        {"nu_source", opt.nu ? "given" : "fit"},
        {"rho", config.rho},
        {"mu", opt.mu},
        {"eta", opt.eta},
        {"inner_iters", config.inner_iters},
        {"max_iter", config.max_outer},
        {"tol", config.tol_primal},
        {"tol_change", config.tol_change},
        {"init", opt.init},
        {"seed", config.seed},
    };
    report.iterations = result.iterations;
    report.converged = result.converged;
    report.trace = result.trace;

    if (!opt.dot.empty())
        write_text(opt.dot, weights_to_dot(result.weights, table.assets, opt.threshold), out);
    if (!opt.weights_out.empty())
        write_text(opt.weights_out, weights_to_json(result.weights).dump(2) + "\n", out);

    report.timing_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    write_text(opt.out, to_json(report).dump(2) + "\n", out);
    return kExitOk;
}

int synth_command(const SynthOptions& opt, std::ostream& out)
{
    SynthSpec spec;
    spec.members = opt.r;
    spec.clusters = opt.k;
    spec.samples = opt.n;
    spec.nu = opt.nu;
    spec.separation = opt.sep;
    spec.seed = opt.seed;
    try {
        spec.validate();
    } catch (const InvalidInput& e) {
        throw UsageError(e.what());
    }
    const SynthData generated = synth(spec);
    const Matrix& x = generated.data.samples(); // r x n

    std::vector<std::string> names;
    for (Index i = 0; i < spec.members; ++i)
        names.push_back("m" + std::to_string(i));

    // Time runs down the rows. Prices are exp of a centered cumulative
    // log-return path, so ingesting them reproduces the samples.
    Matrix rows;
    if (opt.returns) {
        rows = x.transpose();
    } else {
        Matrix log_prices = Matrix::Zero(x.cols() + 1, x.rows());
        for (Index t = 0; t < x.cols(); ++t)
            log_prices.row(t + 1) = log_prices.row(t) + x.col(t).transpose();
        for (Index i = 0; i < log_prices.cols(); ++i) {
            const double hi = log_prices.col(i).maxCoeff();
            const double lo = log_prices.col(i).minCoeff();
            if (hi - lo > 1400.0)
                throw NumericalError("synthetic price path overflows; rerun with --returns");
            log_prices.col(i).array() -= 0.5 * (hi + lo);
        }
        rows = log_prices.array().exp().matrix();
    }

    std::string csv;
    for (std::size_t i = 0; i < names.size(); ++i)
        csv += (i ? "," : "") + names[i];
    csv += '\n';
    for (Index t = 0; t < rows.rows(); ++t) {
        for (Index i = 0; i < rows.cols(); ++i)
            csv += (i ? "," : "") + format_double(rows(t, i));
        csv += '\n';
    }
    write_text(opt.prefix + ".csv", csv, out);
    write_labels_csv(opt.prefix + ".labels.csv", generated.labels.labels(), names);
    write_text(opt.prefix + ".B.json", weights_to_json(generated.weights).dump(2) + "\n", out);
    return kExitOk;
}

int eval_command(const EvalOptions& opt, std::ostream& out)
{
    if (opt.report.empty() == opt.labels.empty())
        throw UsageError("give exactly one of --report and --labels");

    std::vector<int> labels = opt.report.empty() ? read_labels_csv(opt.labels)
                                                 : report_from_json(read_json_file(opt.report)).labels;
    const LabeledPartition truth = read_partition(opt.truth);
    if (truth.size() != labels.size())
        throw ParseError("truth and predicted labels differ in length");

    std::optional<BipartiteWeights> weights;
    if (!opt.graph.empty())
        weights = weights_from_json(read_json_file(opt.graph));
    std::optional<MemberData> data;
    if (!opt.data.empty())
        data = load_returns(opt.data, opt.returns);

    int clusters = 1;
    for (int label : labels)
        clusters = std::max(clusters, label + 1);
    if (weights)
        clusters = std::max(clusters, static_cast<int>(weights->clusters()));
    const LabeledPartition pred = [&] {
        try {
            return LabeledPartition(std::move(labels), clusters);
        } catch (const InvalidInput& e) {
            throw ParseError(e.what());
        }
    }();
    if (weights && weights->members() != static_cast<Index>(pred.size()))
        throw ParseError("--graph member count does not match labels");
    if (data && data->members() != static_cast<Index>(pred.size()))
        throw ParseError("--data member count does not match labels");

    const MetricSet metrics =
        evaluate_metrics(pred, &truth, weights ? &*weights : nullptr, data ? &*data : nullptr);
    write_text(opt.out, to_json(metrics).dump(2) + "\n", out);
    return kExitOk;
}

} // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Bipartite k-component graph clustering of heavy-tailed data", "bgc"};
    app.require_subcommand(1);

    ClusterOptions copt;
    auto* cluster = app.add_subcommand("cluster", "Learn the bipartite graph and cluster the members");
    cluster->add_option("--input", copt.input, "CSV of prices (or returns with --returns), one column per member")
        ->required();
    cluster->add_flag("--returns", copt.returns, "Input already holds log-returns");
    cluster->add_option("--k", copt.k, "Number of clusters (>= 2)")->required();
    cluster->add_option("--nu", copt.nu, "Student-t degrees of freedom (default: fitted)");
    cluster->add_flag("--fit-nu", copt.fit_nu, "Fit nu from the data by kurtosis matching (default)");
    cluster->add_option("--rho", copt.rho, "ADMM penalty")->capture_default_str();
    cluster->add_option("--mu", copt.mu, "B step size, or 'auto' for 1/(rho (r+2))")->capture_default_str();
    cluster->add_option("--eta", copt.eta, "A step size, or 'auto' for the per-column bound")
        ->capture_default_str();
    cluster->add_option("--inner-iters", copt.inner_iters, "PGD iterations per subproblem")->capture_default_str();
    cluster->add_option("--max-iter", copt.max_iter, "Maximum outer iterations")->capture_default_str();
    cluster->add_option("--tol", copt.tol, "Relative primal residual tolerance")->capture_default_str();
    cluster->add_option("--tol-change", copt.tol_change, "Relative B change tolerance")->capture_default_str();
    cluster
        ->add_option("--init", copt.init,
                     "Initial A: 'uniform' draws U[0,1]; 'normal' draws N(0,1) and takes |z| so the "
                     "columns can be normalized to unit sum")
        ->capture_default_str();
    cluster->add_option("--seed", copt.seed, "Seed for the initial A")->capture_default_str();
    cluster->add_option("--truth", copt.truth, "Ground-truth labels CSV; enables ACC, purity and ARI");
    cluster->add_option("--out", copt.out, "Report path ('-' for stdout)")->capture_default_str();
    cluster->add_option("--dot", copt.dot, "Write the learned graph as a DOT edge list");
    cluster->add_option("--threshold", copt.threshold, "Smallest B weight written to --dot")
        ->capture_default_str();
    cluster->add_option("--weights-out", copt.weights_out, "Write the learned B as JSON");

    SynthOptions sopt;
    auto* synth_cmd = app.add_subcommand("synth", "Sample data from a ground-truth bipartite model");
    synth_cmd->add_option("--r", sopt.r, "Members")->capture_default_str();
    synth_cmd->add_option("--k", sopt.k, "Clusters")->capture_default_str();
    synth_cmd->add_option("--n", sopt.n, "Samples")->capture_default_str();
    synth_cmd->add_option("--nu", sopt.nu, "Student-t degrees of freedom")->capture_default_str();
    synth_cmd->add_option("--sep", sopt.sep, "Weight on the member's own center, in (1/k, 1]")
        ->capture_default_str();
    synth_cmd->add_option("--seed", sopt.seed, "Random seed")->capture_default_str();
    synth_cmd->add_option("--out-prefix", sopt.prefix, "Writes PREFIX.csv, PREFIX.labels.csv, PREFIX.B.json")
        ->capture_default_str();
    synth_cmd->add_flag("--returns", sopt.returns, "Write log-returns instead of prices");

    EvalOptions eopt;
    auto* eval = app.add_subcommand("eval", "Score predicted labels against ground truth");
    eval->add_option("--report", eopt.report, "Run report JSON from 'cluster'");
    eval->add_option("--labels", eopt.labels, "Predicted labels CSV");
    eval->add_option("--truth", eopt.truth, "Ground-truth labels CSV")->required();
    eval->add_option("--data", eopt.data, "Data CSV for CHI");
    eval->add_flag("--returns", eopt.returns, "--data already holds log-returns");
    eval->add_option("--graph", eopt.graph, "Weights JSON for modularity");
    eval->add_option("--out", eopt.out, "Output path ('-' for stdout)")->capture_default_str();

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    }

    try {
        if (cluster->parsed())
            return cluster_command(copt, out);
        if (synth_cmd->parsed())
            return synth_command(sopt, out);
        return eval_command(eopt, out);
    } catch (const UsageError& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const DegenerateCluster& e) {
        err << "solver error: " << e.what() << "\n";
        return kExitSolver;
    } catch (const NumericalError& e) {
        err << "solver error: " << e.what() << "\n";
        return kExitSolver;
    } catch (const Error& e) {
        err << "data error: " << e.what() << "\n";
        return kExitData;
    }
}

} // namespace bgc
