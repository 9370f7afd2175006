#pragma once

#include "bgc/metrics.hpp"
#include "bgc/model.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace bgc {

// Parsed numeric CSV: T rows (time points) by r columns (assets).
struct PriceTable {
    std::vector<std::string> assets;
    Matrix values;
};

// Header row of asset identifiers, then one comma-separated row of decimal
// numbers per time point. Ragged rows, empty cells and non-numeric cells
// raise ParseError.
PriceTable read_price_table(std::istream& in);

// Converts a table to r x n member data. Prices become log-returns
// log(P_{t+1} / P_t) (n = T - 1) and must be positive; tables that already
// hold returns pass through (n = T). Every asset is demeaned over time.
MemberData returns_from_table(const PriceTable& table, bool already_returns);

MemberData load_returns(const std::filesystem::path& path, bool already_returns);

// Degrees of freedom from the median per-asset excess kurtosis k:
// 4 + 6 / k clamped to [2.5, 100], or 100 when k <= 0.
double estimate_nu(const MemberData& data);

// Median of per-asset sample excess kurtosis.
double median_excess_kurtosis(const MemberData& data);

double nu_from_kurtosis(double excess_kurtosis);

struct SynthSpec {
    Index members = 60;
    Index clusters = 3;
    Index samples = 2000;
    double nu = 5.0;
    double separation = 0.9; // weight each member puts on its own center
    std::uint64_t seed = 1;

    void validate() const;
};

struct SynthData {
    MemberData data;
    LabeledPartition labels;
    BipartiteWeights weights;
};

// Ground-truth weights for the given parameters: members split into contiguous, nearly
// equal blocks, one per cluster.
BipartiteWeights synth_weights(const SynthSpec& spec);

// Draws n samples x = sqrt(nu / g) L^{+1/2} w, g ~ chi2(nu), w ~ N(0, I), from
// the zero-mean Student-t graph model whose Laplacian L is built from
// synth_weights(spec), supported on the range of L, and keeps the member
// coordinates. Each sample has its own RNG stream.
SynthData synth(const SynthSpec& spec);

} // namespace bgc
