#pragma once

// ADMM solver for the bipartite k-component graph under a Student-t model.
//
// Each outer iteration runs
//   1. a closed-form spectral update of L,
//   2. an MM step on B: build the linear majorizer H at B^l, then projected
//      gradient descent on the row-simplex,
//   3. an MM step on A: build the weighted scatter at A^l, then projected
//      gradient descent per column on the simplex restricted to supp(B),
//   4. dual ascent on Y.

#include "bgc/model.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

namespace bgc {

struct SolverConfig {
    Index clusters = 2;          // k
    double nu = 5.0;             // Student-t degrees of freedom, > 2
    double rho = 1.0;            // ADMM penalty
    std::optional<double> b_step; // PGD step on B; unset = 1 / (rho (r + 2))
    std::optional<double> a_step; // PGD step on A; unset = per-column bound
    int max_outer = 1000;
    int inner_iters = 50;
    double tol_primal = 1e-5;
    double tol_change = 1e-6;
    std::uint64_t seed = 0;

    // Throws InvalidInput when a field is out of range for r members.
    void validate(Index members) const;
};

struct TraceEntry {
    int iter = 0;
    double objective = 0.0;
    double primal_residual = 0.0;
    double b_change = 0.0;
};

struct SolverState {
    BlockLaplacian laplacian;
    BipartiteWeights weights;
    CenterMixing mixing;
    DualVariable dual;
    int iter = 0;
    std::vector<TraceEntry> trace;
};

struct ClusterResult {
    std::vector<int> labels;
    BipartiteWeights weights;
    CenterMixing mixing;
    bool converged = false;
    int iterations = 0;
    std::vector<TraceEntry> trace;
};

enum class MixingInit { Uniform, Normal };

// Random column-stochastic A0. Normal draws are folded to |z| before the
// column normalization.
CenterMixing random_mixing(Index members, Index clusters, MixingInit init, std::uint64_t seed);

// B0 from the pseudo-inverse of the augmented second moment: take the
// member/center block, flip sign, clamp at zero, project rows to the simplex.
BipartiteWeights init_weights(const MemberData& data, const CenterMixing& initial_mixing,
                              Index clusters);

// Keeps the p-k largest eigenpairs of rho * block(B) - Y and maps each
// eigenvalue s to the positive root of rho x^2 - s x - 1 = 0.
BlockLaplacian l_update(const BipartiteWeights& weights, const DualVariable& dual, double rho,
                        Index clusters);

// Per-sample MM weights (p + nu) / n / (x_i^T L x_i + nu).
Vector mm_sample_weights(const MemberData& data, const CenterMixing& mixing,
                         const BipartiteWeights& weights, double nu);

// Linear coefficient H (k x r) of the B-surrogate
//   tr(B H) + rho ||B||_F^2 + rho/2 ||B^T 1||^2.
Matrix b_majorizer_coeffs(const CenterMixing& mixing, const BipartiteWeights& anchor,
                          const BlockLaplacian& laplacian, const DualVariable& dual,
                          const MemberData& data, const SolverConfig& config);

// Surrogate value without its constant, and its gradient H^T + 2 rho B + rho 1 1^T B.
double b_surrogate(const Matrix& weights, const Matrix& coeffs, double rho);
Matrix b_surrogate_gradient(const Matrix& weights, const Matrix& coeffs, double rho);

BipartiteWeights b_update(const BipartiteWeights& anchor, const Matrix& coeffs, double rho,
                          std::optional<double> step, int inner_iters);

// Weighted scatter S = X Diag(w) X^T with the MM sample weights at the anchor.
Matrix a_majorizer_matrix(const CenterMixing& anchor, const BipartiteWeights& weights,
                          const MemberData& data, const SolverConfig& config);

// Column surrogate b a^T S a - 2 b_col^T S a with b = sum(b_col), and its gradient.
double a_column_surrogate(const Vector& column, const Vector& weight_column, const Matrix& scatter);
Vector a_column_gradient(const Vector& column, const Vector& weight_column, const Matrix& scatter);

// Throws DegenerateCluster if some column of B is entirely zero.
CenterMixing a_update(const CenterMixing& anchor, const BipartiteWeights& weights,
                      const Matrix& scatter, std::optional<double> step, int inner_iters);

DualVariable dual_update(const DualVariable& dual, const BlockLaplacian& laplacian,
                         const BipartiteWeights& weights, double rho);

// Penalized negative log-likelihood
//   (p + nu)/n sum_i log(1 + x_i^T L x_i / nu) - log det*(L).
double objective(const BlockLaplacian& laplacian, const BipartiteWeights& weights,
                 const CenterMixing& mixing, const MemberData& data, const SolverConfig& config);

// Row argmax, lowest index on ties.
std::vector<int> row_argmax(const Matrix& weights);

using IterationObserver = std::function<void(const SolverState&)>;

ClusterResult run(const MemberData& data, const SolverConfig& config,
                  const CenterMixing& initial_mixing, const IterationObserver& observer = {});
ClusterResult run(const MemberData& data, const SolverConfig& config, MixingInit init,
                  const IterationObserver& observer = {});

} // namespace bgc
