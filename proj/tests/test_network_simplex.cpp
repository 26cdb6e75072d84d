#include "gwot/graph_align.hpp"
#include "gwot/network_simplex.hpp"

#include "oracles.hpp"

#include <gtest/gtest.h>

using namespace gwot;

namespace {

void expect_basic_feasible(const OtPlan& sol, const Vector& a, const Vector& b, double tol = 1e-12)
{
    EXPECT_TRUE((sol.plan.array() >= 0.0).all());
    EXPECT_LE((sol.plan.rowwise().sum() - a).cwiseAbs().maxCoeff(), tol);
    EXPECT_LE((sol.plan.colwise().sum().transpose() - b).cwiseAbs().maxCoeff(), tol);
    EXPECT_LE((sol.plan.array() > 0.0).count(), a.size() + b.size() - 1);
    EXPECT_EQ(sol.basis_size, a.size() + b.size() - 1);
}

void expect_dual_feasible(const OtPlan& sol, const Matrix& cost)
{
    const double scale = std::max(1.0, cost.cwiseAbs().maxCoeff());
    for (Index i = 0; i < cost.rows(); ++i) {
        for (Index j = 0; j < cost.cols(); ++j) {
            EXPECT_GE(cost(i, j) - sol.u[i] - sol.v[j], -1e-9 * scale);
        }
    }
}

} // namespace

TEST(NetworkSimplex, ZeroCostMatching)
{
    Matrix cost(2, 2);
    cost << 0, 1, 1, 0;
    const Marginals u = Marginals::uniform(2);
    const OtPlan sol = ot_network_simplex(cost, u, u);
    EXPECT_NEAR(sol.objective, 0.0, 1e-15);
    EXPECT_LE((sol.plan - 0.5 * Matrix::Identity(2, 2)).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(NetworkSimplex, UniformSquareEqualsAssignment)
{
    std::mt19937_64 rng(81);
    for (int trial = 0; trial < 20; ++trial) {
        const Index n = 2 + trial % 6;
        const Matrix cost = oracle::random_matrix(rng, n, n);
        const Marginals u = Marginals::uniform(n);
        const OtPlan sol = ot_network_simplex(cost, u, u);
        const double ref = oracle::brute_force_assignment(cost, false).value / static_cast<double>(n);
        EXPECT_NEAR(sol.objective, ref, 1e-12);
        expect_basic_feasible(sol, u.weights(), u.weights());
        expect_dual_feasible(sol, cost);
    }
}

TEST(NetworkSimplex, VertexEnumeration3x3)
{
    std::mt19937_64 rng(82);
    std::uniform_int_distribution<int> w(1, 9);
    for (int trial = 0; trial < 30; ++trial) {
        Vector a(3);
        Vector b(3);
        for (Index i = 0; i < 3; ++i) {
            a[i] = w(rng);
            b[i] = w(rng);
        }
        a /= a.sum();
        b /= b.sum();
        const Matrix cost = oracle::random_matrix(rng, 3, 3);
        const OtPlan sol = ot_network_simplex(cost, a, b);
        EXPECT_NEAR(sol.objective, oracle::transport_vertex_enumeration(cost, a, b), 1e-12);
        expect_basic_feasible(sol, a, b);
        expect_dual_feasible(sol, cost);
    }
}

TEST(NetworkSimplex, RectangularAndDegenerate)
{
    std::mt19937_64 rng(83);
    for (int trial = 0; trial < 20; ++trial) {
        const Index n = 3 + trial % 5;
        const Index m = 2 + (trial * 3) % 7;
        const Vector a = oracle::random_simplex(rng, n);
        const Vector b = oracle::random_simplex(rng, m);
        // integer costs produce many ties and degenerate pivots
        Matrix cost = (oracle::random_matrix(rng, n, m) * 3.0).array().floor().matrix();
        const OtPlan sol = ot_network_simplex(cost, a, b);
        expect_basic_feasible(sol, a, b, 1e-12);
        expect_dual_feasible(sol, cost);
        EXPECT_NEAR(sol.objective, cost.cwiseProduct(sol.plan).sum(), 1e-12);
        // complementary slackness certifies optimality
        EXPECT_NEAR(sol.objective, a.dot(sol.u) + b.dot(sol.v), 1e-10);
    }
}

TEST(NetworkSimplex, ZeroMassRowsAndNegativeCosts)
{
    Vector a(3);
    a << 0.5, 0.0, 0.5;
    Vector b(2);
    b << 0.25, 0.75;
    Matrix cost(3, 2);
    cost << -1, 2, 0, -3, 4, -2;
    const OtPlan sol = ot_network_simplex(cost, a, b);
    expect_basic_feasible(sol, a, b);
    expect_dual_feasible(sol, cost);
    EXPECT_NEAR(sol.objective, a.dot(sol.u) + b.dot(sol.v), 1e-12);
}

TEST(NetworkSimplex, Errors)
{
    Vector a(2);
    a << 0.5, 0.5;
    Vector b(2);
    b << 0.5, 0.6;
    EXPECT_THROW(ot_network_simplex(Matrix::Zero(2, 2), a, b), std::invalid_argument);
    Matrix bad = Matrix::Zero(2, 2);
    bad(0, 0) = std::numeric_limits<double>::infinity();
    EXPECT_THROW(ot_network_simplex(bad, a, a), std::invalid_argument);
    EXPECT_THROW(ot_network_simplex(Matrix::Zero(3, 2), a, a), DimensionError);

    std::mt19937_64 rng(84);
    const Matrix cost = oracle::random_matrix(rng, 6, 6);
    const Marginals u = Marginals::uniform(6);
    NetworkSimplexOptions opts;
    opts.max_pivots = 1;
    EXPECT_THROW(ot_network_simplex(cost, u, u, opts), NetworkSimplexError);
}
