#include "bgc/data.hpp"

#include "bgc/errors.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

namespace bgc {

namespace {

std::vector<std::string> split_fields(const std::string& line)
{
    std::vector<std::string> fields;
    std::string field;
    std::istringstream stream(line);
    while (std::getline(stream, field, ','))
        fields.push_back(field);
    if (!line.empty() && line.back() == ',')
        fields.emplace_back();
    return fields;
}

std::string trim(std::string s)
{
    const auto not_space = [](unsigned char c) { return !std::isspace(c); };
    s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
    s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
    return s;
}

double parse_number(const std::string& raw, std::size_t line)
{
    const std::string cell = trim(raw);
    if (cell.empty())
        throw ParseError("line " + std::to_string(line) + ": missing value");
    double value = 0.0;
    const char* begin = cell.data();
    const char* end = begin + cell.size();
    if (*begin == '+')
        ++begin;
    const auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc() || ptr != end || !std::isfinite(value))
        throw ParseError("line " + std::to_string(line) + ": not a number: '" + cell + "'");
    return value;
}

double median(std::vector<double> values)
{
    std::sort(values.begin(), values.end());
    const std::size_t mid = values.size() / 2;
    if (values.size() % 2 == 1)
        return values[mid];
    return 0.5 * (values[mid - 1] + values[mid]);
}

} // namespace

PriceTable read_price_table(std::istream& in)
{
    std::string line;
    std::size_t line_no = 0;
    PriceTable table;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (!trim(line).empty())
            break;
    }
    if (line_no == 0 || trim(line).empty())
        throw ParseError("empty CSV");
    if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0)
        line.erase(0, 3);
    for (const auto& name : split_fields(line))
        table.assets.push_back(trim(name));

    const std::size_t width = table.assets.size();
    std::vector<double> cells;
    std::size_t rows = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (trim(line).empty())
            continue;
        const auto fields = split_fields(line);
        if (fields.size() != width)
            throw ParseError("line " + std::to_string(line_no) + ": expected " +
                             std::to_string(width) + " fields, got " + std::to_string(fields.size()));
        for (const auto& f : fields)
            cells.push_back(parse_number(f, line_no));
        ++rows;
    }
    table.values = Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
        cells.data(), static_cast<Index>(rows), static_cast<Index>(width));
    return table;
}

MemberData returns_from_table(const PriceTable& table, bool already_returns)
{
    const Matrix& v = table.values;
    Matrix returns; // r x n
    if (already_returns) {
        if (v.rows() < 1)
            throw ParseError("no data rows");
        returns = v.transpose();
    } else {
        if (v.rows() < 2)
            throw ParseError("need at least two price rows");
        if (v.minCoeff() <= 0.0)
            throw ParseError("prices must be positive");
        const Index t = v.rows();
        returns = (v.bottomRows(t - 1).array() / v.topRows(t - 1).array()).log().matrix().transpose();
    }
    returns.colwise() -= returns.rowwise().mean();
    return MemberData(std::move(returns));
}

MemberData load_returns(const std::filesystem::path& path, bool already_returns)
{
    std::ifstream in(path);
    if (!in)
        throw ParseError("cannot open " + path.string());
    return returns_from_table(read_price_table(in), already_returns);
}

double median_excess_kurtosis(const MemberData& data)
{
    const Matrix& x = data.samples();
    if (x.cols() < 4)
        throw EstimationError("need at least four samples to estimate nu");
    std::vector<double> kurtosis;
    for (Index i = 0; i < x.rows(); ++i) {
        const Eigen::ArrayXd centered = x.row(i).array() - x.row(i).mean();
        const double m2 = centered.square().mean();
        if (!(m2 > 0.0))
            continue;
        const double m4 = centered.square().square().mean();
        kurtosis.push_back(m4 / (m2 * m2) - 3.0);
    }
    if (kurtosis.empty())
        throw EstimationError("every asset has zero variance");
    return median(std::move(kurtosis));
}

double nu_from_kurtosis(double excess_kurtosis)
{
    if (!(excess_kurtosis > 0.0))
        return 100.0;
    return std::clamp(4.0 + 6.0 / excess_kurtosis, 2.5, 100.0);
}

double estimate_nu(const MemberData& data)
{
    return nu_from_kurtosis(median_excess_kurtosis(data));
}

void SynthSpec::validate() const
{
    if (clusters < 2 || members < clusters)
        throw InvalidInput("synth: need r >= k >= 2");
    if (samples < 1)
        throw InvalidInput("synth: need at least one sample");
    if (!(nu > 2.0) || !std::isfinite(nu))
        throw InvalidInput("synth: nu must be finite and greater than 2");
    if (!(separation > 1.0 / static_cast<double>(clusters)) || separation > 1.0)
        throw InvalidInput("synth: separation must lie in (1/k, 1]");
}

BipartiteWeights synth_weights(const SynthSpec& spec)
{
    spec.validate();
    const Index r = spec.members;
    const Index k = spec.clusters;
    const double off = (1.0 - spec.separation) / static_cast<double>(k - 1);
    Matrix b = Matrix::Constant(r, k, off);
    for (Index i = 0; i < r; ++i)
        b(i, i * k / r) = spec.separation;
    return BipartiteWeights(std::move(b));
}

SynthData synth(const SynthSpec& spec)
{
    BipartiteWeights weights = synth_weights(spec);
    const Index r = spec.members;
    const Index k = spec.clusters;

    Eigen::SelfAdjointEigenSolver<Matrix> eig(block_laplacian(weights));
    if (eig.info() != Eigen::Success)
        throw NumericalError("synth: eigendecomposition failed");
    // Range of L: every eigenvalue above the rounding floor. That is p - k
    // eigenpairs for disjoint clusters and p - 1 once clusters share edges.
    const Vector& values = eig.eigenvalues();
    const double floor = 1e-10 * values.cwiseAbs().maxCoeff();
    Index kept = 0;
    while (kept < values.size() && values[values.size() - 1 - kept] > floor)
        ++kept;
    // Member rows of U Lambda^{-1/2}; center coordinates are discarded.
    const Matrix factor = eig.eigenvectors().rightCols(kept).topRows(r) *
                          values.tail(kept).cwiseSqrt().cwiseInverse().asDiagonal();

    Matrix samples(r, spec.samples);
    Vector w(kept);
    for (Index s = 0; s < spec.samples; ++s) {
        std::seed_seq seq{static_cast<std::uint32_t>(spec.seed), static_cast<std::uint32_t>(spec.seed >> 32),
                          static_cast<std::uint32_t>(s), static_cast<std::uint32_t>(s >> 32)};
        std::mt19937_64 rng(seq);
        std::normal_distribution<double> normal(0.0, 1.0);
        std::chi_squared_distribution<double> chi2(spec.nu);
        for (Index j = 0; j < kept; ++j)
            w[j] = normal(rng);
        const double scale = std::sqrt(spec.nu / chi2(rng));
        samples.col(s) = scale * (factor * w);
    }

    std::vector<int> labels(static_cast<std::size_t>(r));
    for (Index i = 0; i < r; ++i)
        labels[static_cast<std::size_t>(i)] = static_cast<int>(i * k / r);
    return SynthData{MemberData(std::move(samples)), LabeledPartition(std::move(labels), static_cast<int>(k)),
                     std::move(weights)};
}

} // namespace bgc
