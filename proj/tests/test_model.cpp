#include "bgc/errors.hpp"
#include "bgc/model.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <random>

using namespace bgc;

namespace {

Matrix mat(std::initializer_list<std::initializer_list<double>> rows)
{
    Matrix m(static_cast<Index>(rows.size()), static_cast<Index>(rows.begin()->size()));
    Index i = 0;
    for (const auto& row : rows) {
        Index j = 0;
        for (double v : row)
            m(i, j++) = v;
        ++i;
    }
    return m;
}

} // namespace

TEST_CASE("block laplacian of two members on one center")
{
    const Matrix l = block_laplacian(BipartiteWeights(mat({{1}, {1}})));
    CHECK(l.isApprox(mat({{1, 0, -1}, {0, 1, -1}, {-1, -1, 2}})));
    CHECK(l.rowwise().sum().cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("block laplacian of identity weights splits into two edges")
{
    const Matrix l = block_laplacian(BipartiteWeights(mat({{1, 0}, {0, 1}})));
    CHECK(l == mat({{1, 0, -1, 0}, {0, 1, 0, -1}, {-1, 0, 1, 0}, {0, -1, 0, 1}}));
}

TEST_CASE("block laplacian is a symmetric PSD Laplacian")
{
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 50; ++trial) {
        const Index r = 2 + trial % 9;
        const Index k = 1 + trial % 4;
        const BipartiteWeights b(oracle::random_row_stochastic(r, k, rng, 0.3));
        const Matrix l = block_laplacian(b);
        CHECK(l == l.transpose());
        CHECK(l.rowwise().sum().cwiseAbs().maxCoeff() < 1e-14);
        CHECK(l.diagonal().minCoeff() >= 0.0);
        CHECK(Eigen::SelfAdjointEigenSolver<Matrix>(l).eigenvalues().minCoeff() >= -1e-10);
        CHECK(l.isApprox(oracle::dense_laplacian(b.matrix()), 1e-14));
    }
}

TEST_CASE("g_matrix hand examples")
{
    SUBCASE("v = 0 gives zero")
    {
        const CenterMixing a(mat({{0.5}, {0.5}}));
        const Matrix g = g_matrix(a, Vector((Vector(2) << 1, -1).finished()));
        CHECK(g.rows() == 1);
        CHECK(g.cols() == 2);
        CHECK(g.cwiseAbs().maxCoeff() == 0.0);
    }
    SUBCASE("zero sample")
    {
        const CenterMixing a(mat({{0.3}, {0.7}}));
        CHECK(g_matrix(a, Vector::Zero(2)).cwiseAbs().maxCoeff() == 0.0);
    }
    SUBCASE("indicator mixing")
    {
        const CenterMixing a(mat({{1}, {0}}));
        const Matrix g = g_matrix(a, Vector((Vector(2) << 2, 3).finished()));
        CHECK(g(0, 0) == doctest::Approx(-4.0));
        CHECK(g(0, 1) == doctest::Approx(-8.0));
    }
    SUBCASE("dimension mismatch")
    {
        const CenterMixing a(mat({{1}, {0}}));
        CHECK_THROWS_AS(g_matrix(a, Vector::Zero(3)), InvalidInput);
    }
}

TEST_CASE("g_matrix agrees with the materialized outer product")
{
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 30; ++trial) {
        const Index r = 2 + trial % 6;
        const Index k = 1 + trial % 3;
        const Matrix b = oracle::random_row_stochastic(r, k, rng);
        const CenterMixing a(oracle::random_column_stochastic(b, rng));
        const Vector x = oracle::random_normal(r, 1, rng);
        const Matrix lit = oracle::literal_g(a.matrix(), x);
        CHECK((g_matrix(a, x) - lit).cwiseAbs().maxCoeff() <= 1e-12 * std::max(1.0, lit.cwiseAbs().maxCoeff()));
    }
}

TEST_CASE("structured quadratic form")
{
    SUBCASE("hand example")
    {
        const CenterMixing a(mat({{0.5}, {0.5}}));
        const BipartiteWeights b(mat({{1}, {1}}));
        const Vector x = (Vector(2) << 1, -1).finished();
        CHECK(structured_quad_form(x, a, b) == doctest::Approx(2.0).epsilon(1e-15));
        CHECK(oracle::dense_quad_form(x, a.matrix(), b.matrix()) == doctest::Approx(2.0));
    }
    SUBCASE("zero sample")
    {
        const CenterMixing a(mat({{0.5}, {0.5}}));
        const BipartiteWeights b(mat({{1}, {1}}));
        CHECK(structured_quad_form(Vector::Zero(2), a, b) == 0.0);
    }
    SUBCASE("random r=4, k=2 matches dense evaluation")
    {
        std::mt19937_64 rng(5);
        const Matrix bm = oracle::random_row_stochastic(4, 2, rng);
        const CenterMixing a(oracle::random_column_stochastic(bm, rng));
        const BipartiteWeights b(bm);
        const Vector x = oracle::random_normal(4, 1, rng);
        const double dense = oracle::dense_quad_form(x, a.matrix(), bm);
        CHECK(std::abs(structured_quad_form(x, a, b) - dense) <= 1e-12 * std::abs(dense));
    }
    SUBCASE("vectorized form matches per-sample form")
    {
        std::mt19937_64 rng(8);
        const Matrix bm = oracle::random_row_stochastic(6, 3, rng);
        const CenterMixing a(oracle::random_column_stochastic(bm, rng));
        const BipartiteWeights b(bm);
        const MemberData data(oracle::random_normal(6, 9, rng));
        const Vector all = quad_forms(data, a, b);
        for (Index i = 0; i < 9; ++i)
            CHECK(all[i] == doctest::Approx(structured_quad_form(data.samples().col(i), a, b)).epsilon(1e-12));
    }
}

TEST_CASE("quadratic form identity holds on random instances")
{
    std::mt19937_64 rng(2024);
    for (int trial = 0; trial < 300; ++trial) {
        const Index r = 2 + static_cast<Index>(rng() % 9);
        const Index k = 1 + static_cast<Index>(rng() % static_cast<std::uint64_t>(std::min<Index>(r, 4)));
        const Matrix bm = oracle::ensure_columns(oracle::random_row_stochastic(r, k, rng, 0.3));
        const CenterMixing a(oracle::random_column_stochastic(bm, rng), bm.array() > 0.0);
        const Vector x = oracle::random_normal(r, 1, rng);
        const double dense = oracle::dense_quad_form(x, a.matrix(), bm);
        const double fast = structured_quad_form(x, a, BipartiteWeights(bm));
        CHECK(fast >= 0.0);
        CHECK(std::abs(fast - dense) <= 1e-10 * std::max(std::abs(dense), 1e-300));
    }
}

TEST_CASE("domain type validation")
{
    CHECK_THROWS_AS(MemberData(Matrix::Zero(1, 5)), InvalidInput);
    CHECK_THROWS_AS(MemberData(Matrix::Zero(3, 0)), InvalidInput);
    Matrix bad = Matrix::Zero(3, 2);
    bad(1, 1) = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(MemberData{bad}, InvalidInput);

    const MemberData data(mat({{3, 0}, {4, 1}}));
    CHECK(data.energies()[0] == 25.0);
    CHECK(data.energies()[1] == 1.0);

    CHECK_THROWS_AS(BipartiteWeights(mat({{0.5, 0.4}})), InvalidInput);
    CHECK_THROWS_AS(BipartiteWeights(mat({{1.5, -0.5}})), InvalidInput);
    CHECK_THROWS_AS(CenterMixing(mat({{0.5}, {0.4}})), InvalidInput);

    Mask support(2, 1);
    support << true, false;
    CHECK_THROWS_AS(CenterMixing(mat({{0.5}, {0.5}}), support), InvalidInput);
    CHECK_NOTHROW(CenterMixing(mat({{1.0}, {0.0}}), support));

    CHECK_THROWS_AS(BlockLaplacian(Matrix::Identity(3, 2), Vector::Constant(2, -1.0)), NumericalError);
    CHECK_THROWS_AS(DualVariable(Matrix::Zero(2, 3)), InvalidInput);
}

TEST_CASE("block laplacian log pseudo-determinant")
{
    const BlockLaplacian l(Matrix::Identity(4, 2), (Vector(2) << 2.0, 3.0).finished());
    CHECK(l.log_pdet() == doctest::Approx(std::log(6.0)));
    CHECK(l.dense()(0, 0) == doctest::Approx(2.0));
    CHECK(l.dense()(3, 3) == 0.0);
}
