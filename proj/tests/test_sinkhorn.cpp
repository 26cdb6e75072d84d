#include "gwot/sinkhorn.hpp"

#include "oracles.hpp"

#include <gtest/gtest.h>

using namespace gwot;

namespace {

double l1_error(const Matrix& p, const Marginals& a, const Marginals& b)
{
    return (p.rowwise().sum() - a.weights()).lpNorm<1>() + (p.colwise().sum().transpose() - b.weights()).lpNorm<1>();
}

// Entropic OT on the 2x2 swap cost with uniform marginals: the plan is
// [[t, 1/2 - t], [1/2 - t, t]] with log(t / (1/2 - t)) = 1 / eps.
double two_by_two_t(double eps)
{
    return 0.5 / (1.0 + std::exp(-1.0 / eps));
}

} // namespace

TEST(Sinkhorn, ZeroCostGivesProduct)
{
    std::mt19937_64 rng(91);
    const Marginals a(oracle::random_simplex(rng, 4));
    const Marginals b(oracle::random_simplex(rng, 3));
    const Matrix p = sinkhorn(Matrix::Zero(4, 3), a, b, 0.3);
    EXPECT_LE((p - a.weights() * b.weights().transpose()).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(Sinkhorn, TwoByTwoClosedForm)
{
    Matrix cost(2, 2);
    cost << 0, 1, 1, 0;
    const Marginals u = Marginals::uniform(2);
    for (double eps : {1.0, 0.5, 0.1, 0.01, 1e-3}) {
        const Matrix p = sinkhorn(cost, u, u, eps);
        const double t = two_by_two_t(eps);
        Matrix ref(2, 2);
        ref << t, 0.5 - t, 0.5 - t, t;
        EXPECT_LE((p - ref).cwiseAbs().maxCoeff(), 1e-9) << "eps " << eps;
    }
    const Matrix p = sinkhorn(cost, u, u, 0.01);
    EXPECT_LE((p - 0.5 * Matrix::Identity(2, 2)).cwiseAbs().maxCoeff(), 1e-3);
}

TEST(Sinkhorn, MarginalsWithinTolerance)
{
    std::mt19937_64 rng(92);
    for (double eps : {1.0, 1e-1, 1e-2, 1e-3}) {
        const Marginals a(oracle::random_simplex(rng, 20));
        const Marginals b(oracle::random_simplex(rng, 15));
        const Matrix cost = oracle::random_matrix(rng, 20, 15);
        const SinkhornResult res = sinkhorn_solve(cost, a, b, eps, 100000, 1e-9);
        ASSERT_TRUE(res.converged) << "eps " << eps;
        EXPECT_LE(res.marginal_error, 2e-9 + 1e-12);
        EXPECT_LE((res.plan.rowwise().sum() - a.weights()).lpNorm<1>(), 1e-9);
        EXPECT_NEAR(res.marginal_error, l1_error(res.plan, a, b), 1e-15);
        // the plan is the Gibbs form of the returned potentials
        for (Index i = 0; i < 20; ++i) {
            for (Index j = 0; j < 15; ++j) {
                const double gibbs = std::exp((res.f[i] + res.g[j] - cost(i, j)) / eps);
                EXPECT_NEAR(res.plan(i, j), gibbs, 1e-9 * std::max(gibbs, 1e-300) + 1e-300);
            }
        }
    }
}

TEST(Sinkhorn, WarmStartReproducesSolution)
{
    std::mt19937_64 rng(93);
    const Marginals a(oracle::random_simplex(rng, 10));
    const Marginals b(oracle::random_simplex(rng, 10));
    const Matrix cost = oracle::random_matrix(rng, 10, 10);
    const SinkhornResult cold = sinkhorn_solve(cost, a, b, 0.05, 10000, 1e-12);
    const SinkhornResult warm = sinkhorn_solve(cost, a, b, 0.05, 10000, 1e-12, &cold.f, &cold.g);
    EXPECT_LE(warm.iterations, 2);
    EXPECT_LE((warm.plan - cold.plan).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Sinkhorn, ForbiddenCells)
{
    Matrix cost = Matrix::Zero(2, 2);
    cost(0, 1) = std::numeric_limits<double>::infinity();
    const Marginals u = Marginals::uniform(2);
    Vector b(2);
    b << 0.75, 0.25;
    const SinkhornResult res = sinkhorn_solve(cost, u, Marginals(b), 0.1, 10000, 1e-12);
    EXPECT_EQ(res.plan(0, 1), 0.0);
    EXPECT_NEAR(res.plan(0, 0), 0.5, 1e-12);
    EXPECT_NEAR(res.plan(1, 1), 0.25, 1e-12);
}

TEST(Sinkhorn, Errors)
{
    const Marginals u = Marginals::uniform(2);
    EXPECT_THROW(sinkhorn(Matrix::Zero(2, 2), u, u, 0.0), std::invalid_argument);
    EXPECT_THROW(sinkhorn(Matrix::Zero(3, 2), u, u, 1.0), DimensionError);
    Matrix nan = Matrix::Zero(2, 2);
    nan(0, 0) = std::nan("");
    EXPECT_THROW(sinkhorn(nan, u, u, 1.0), SolverFailure);
    // a whole row forbidden: no finite potential exists
    Matrix blocked = Matrix::Zero(2, 2);
    blocked.row(0).setConstant(std::numeric_limits<double>::infinity());
    EXPECT_THROW(sinkhorn(blocked, u, u, 1.0), SolverFailure);
}
