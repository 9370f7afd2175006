#pragma once

#include "bgc/model.hpp"

namespace bgc {

// Euclidean projection onto {x >= 0, sum(x) = 1}.
//
// Sorts descending and picks the largest support size s with
// x_(s) + alpha_s > 0, alpha_s = (1 - sum_{i<=s} x_(i)) / s. Entries outside
// the support come back as exact zeros. Throws InvalidInput for empty or
// non-finite input.
Vector project_simplex(const Eigen::Ref<const Vector>& point);

// Row-wise project_simplex.
Matrix project_rows_simplex(const Eigen::Ref<const Matrix>& rows);

} // namespace bgc
