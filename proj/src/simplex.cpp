#include "bgc/simplex.hpp"

#include "bgc/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

namespace bgc {

namespace {
constexpr double kFeasibleSlack = 1e-13;
}

Vector project_simplex(const Eigen::Ref<const Vector>& point)
{
    const Index d = point.size();
    if (d < 1)
        throw InvalidInput("project_simplex: empty vector");
    if (!point.allFinite())
        throw InvalidInput("project_simplex: non-finite entries");

    // Points already on the simplex (up to rounding of a previous projection)
    // are returned untouched, which makes the projection exactly idempotent.
    if (point.minCoeff() >= 0.0 && std::abs(point.sum() - 1.0) <= kFeasibleSlack)
        return point;

    std::vector<Index> order(static_cast<std::size_t>(d));
    std::iota(order.begin(), order.end(), Index{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](Index a, Index b) { return point[a] > point[b]; });

    // The first entry always qualifies: x_(1) + (1 - x_(1)) = 1 > 0.
    double prefix = 0.0;
    double support_sum = point[order[0]];
    Index support = 1;
    for (Index s = 1; s <= d; ++s) {
        prefix += point[order[static_cast<std::size_t>(s - 1)]];
        const double shift = (1.0 - prefix) / static_cast<double>(s);
        if (point[order[static_cast<std::size_t>(s - 1)]] + shift > 0.0) {
            support = s;
            support_sum = prefix;
        }
    }
    const double shift = (1.0 - support_sum) / static_cast<double>(support);

    Vector out = Vector::Zero(d);
    for (Index s = 0; s < support; ++s) {
        const Index i = order[static_cast<std::size_t>(s)];
        out[i] = std::max(point[i] + shift, 0.0);
    }
    return out;
}

Matrix project_rows_simplex(const Eigen::Ref<const Matrix>& rows)
{
    Matrix out(rows.rows(), rows.cols());
    for (Index i = 0; i < rows.rows(); ++i)
        out.row(i) = project_simplex(rows.row(i).transpose()).transpose();
    return out;
}

} // namespace bgc
