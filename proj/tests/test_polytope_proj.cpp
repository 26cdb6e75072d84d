#include "gwot/gw_core.hpp"
#include "gwot/polytope_proj.hpp"

#include "oracles.hpp"

#include <gtest/gtest.h>

using namespace gwot;

namespace {

Matrix mat2(double a, double b, double c, double d)
{
    Matrix m(2, 2);
    m << a, b, c, d;
    return m;
}

double l1_marginal_error(const Matrix& pi, const Marginals& a, const Marginals& b)
{
    return (a.weights() - pi.rowwise().sum()).lpNorm<1>() + (b.weights() - pi.colwise().sum().transpose()).lpNorm<1>();
}

// Closed-form projection of z onto U((1/2,1/2),(1/2,1/2)) = {[[t, 1/2-t],[1/2-t, t]]}.
Matrix two_by_two_projection(const Matrix& z)
{
    const double t = std::clamp((z(0, 0) + z(1, 1) - z(0, 1) - z(1, 0) + 1.0) / 4.0, 0.0, 0.5);
    return mat2(t, 0.5 - t, 0.5 - t, t);
}

} // namespace

TEST(PrimalFromDual, Examples)
{
    const Matrix z = mat2(0.1, 0.2, 0.3, 0.4);
    EXPECT_EQ(primal_from_dual(DualVector::zeros(2, 2), z), z);

    const DualVector y{(Vector(2) << 0.3, -0.2).finished(), (Vector(2) << 0.5, 0.1).finished()};
    EXPECT_EQ(primal_from_dual(y, -apply_A_adjoint(y)), Matrix::Zero(2, 2));

    const DualVector y2{(Vector(2) << 1, -1).finished(), Vector::Zero(2)};
    EXPECT_EQ(primal_from_dual(y2, mat2(-0.5, -0.5, 0.5, 0.5)), mat2(0.5, 0.5, 0, 0));
}

TEST(DualValue, Examples)
{
    const Marginals u = Marginals::uniform(2);
    EXPECT_EQ(dual_value(DualVector::zeros(2, 2), Matrix::Zero(2, 2), u, u), 0.0);
    const Matrix ab = u.weights() * u.weights().transpose();
    EXPECT_DOUBLE_EQ(dual_value(DualVector::zeros(2, 2), ab, u, u), 0.5 * ab.squaredNorm());
}

TEST(DualValue, DecreasesAlongNegativeGradient)
{
    std::mt19937_64 rng(12);
    for (int trial = 0; trial < 20; ++trial) {
        const Marginals a(oracle::random_simplex(rng, 4));
        const Marginals b(oracle::random_simplex(rng, 5));
        const Matrix z = oracle::random_matrix(rng, 4, 5, -0.5, 0.5);
        const Vector ys = oracle::random_matrix(rng, 9, 1, -0.2, 0.2);
        const DualVector y{ys.head(4), ys.tail(5)};
        const Vector g = dual_gradient(y, z, a, b);
        const Vector step = ys - 1e-3 * g;
        EXPECT_LT(dual_value({step.head(4), step.tail(5)}, z, a, b), dual_value(y, z, a, b));
    }
}

TEST(DualGradient, Examples)
{
    const Marginals u = Marginals::uniform(2);
    const Matrix ab = u.weights() * u.weights().transpose();
    EXPECT_LE(dual_gradient(DualVector::zeros(2, 2), ab, u, u).norm(), 1e-16);
    const Vector r = stack_marginals(u, u);
    const DualVector very_negative{Vector::Constant(2, -10.0), Vector::Constant(2, -10.0)};
    EXPECT_EQ(dual_gradient(very_negative, ab, u, u), -r);
}

TEST(DualGradient, FiniteDifferences)
{
    std::mt19937_64 rng(31);
    for (int trial = 0; trial < 20; ++trial) {
        const Marginals a(oracle::random_simplex(rng, 3));
        const Marginals b(oracle::random_simplex(rng, 4));
        const Matrix z = oracle::random_matrix(rng, 3, 4, -0.5, 0.5);
        const Vector ys = oracle::random_matrix(rng, 7, 1, -0.2, 0.2);
        const Vector g = dual_gradient({ys.head(3), ys.tail(4)}, z, a, b);
        Vector fd(7);
        const double h = 1e-7;
        for (Index k = 0; k < 7; ++k) {
            Vector p = ys;
            Vector m = ys;
            p[k] += h;
            m[k] -= h;
            fd[k] = (dual_value({p.head(3), p.tail(4)}, z, a, b) - dual_value({m.head(3), m.tail(4)}, z, a, b)) /
                    (2 * h);
        }
        EXPECT_LE((g - fd).norm() / std::max(1e-8, fd.norm()), 1e-6);
    }
}

TEST(DualGradient, LipschitzInDual)
{
    std::mt19937_64 rng(32);
    const Marginals a(oracle::random_simplex(rng, 6));
    const Marginals b(oracle::random_simplex(rng, 4));
    const Matrix z = oracle::random_matrix(rng, 6, 4, -0.5, 0.5);
    for (int trial = 0; trial < 100; ++trial) {
        const Vector y1 = oracle::random_matrix(rng, 10, 1, -1.0, 1.0);
        const Vector y2 = oracle::random_matrix(rng, 10, 1, -1.0, 1.0);
        const Vector g1 = dual_gradient({y1.head(6), y1.tail(4)}, z, a, b);
        const Vector g2 = dual_gradient({y2.head(6), y2.tail(4)}, z, a, b);
        EXPECT_LE((g1 - g2).norm(), 10.0 * (y1 - y2).norm() * (1 + 1e-12));
    }
}

TEST(InexactCondition, FloorSemantics)
{
    EXPECT_TRUE(inexact_condition_holds(0.1, 1.0, 0.2));
    EXPECT_FALSE(inexact_condition_holds(0.1, 1.5, 0.2));
    EXPECT_FALSE(inexact_condition_holds(1e-13, 0.0, 0.0));
    EXPECT_TRUE(inexact_condition_holds(1e-15, 100.0, 0.0));
}

TEST(ProjectInexact, FeasibleProductConvergesImmediately)
{
    const Marginals a(Vector((Vector(3) << 0.2, 0.3, 0.5).finished()));
    const Marginals b = Marginals::uniform(2);
    const Matrix z = a.weights() * b.weights().transpose();
    for (double eps : {1.0, 1e-6, 0.0}) {
        const ProjectionResult res = solve_projection_inexact(z, a, b, eps, DualVector::zeros(3, 2));
        EXPECT_TRUE(res.converged);
        EXPECT_EQ(res.inner_iterations, 0);
        EXPECT_EQ(res.dual.norm(), 0.0);
        EXPECT_LE(res.residual_l2, 1e-16);
    }
}

TEST(ProjectInexact, TwoByTwoClosedForm)
{
    const Marginals u = Marginals::uniform(2);
    const Matrix z = mat2(1, 0, 0, 1);
    const ProjectionResult res = solve_projection_inexact(z, u, u, 1e-10, DualVector::zeros(2, 2));
    ASSERT_TRUE(res.converged);
    EXPECT_LE((res.coupling - mat2(0.5, 0, 0, 0.5)).cwiseAbs().maxCoeff(), 1e-8);
    EXPECT_LE(res.residual_l2 * (1 + res.dual.norm()), 1e-10);
}

TEST(ProjectInexact, ConditionVerifiableFromFields)
{
    std::mt19937_64 rng(41);
    for (int trial = 0; trial < 30; ++trial) {
        const Index n = 2 + trial % 9;
        const Index m = 2 + (trial * 5) % 7;
        const Marginals a(oracle::random_simplex(rng, n));
        const Marginals b(oracle::random_simplex(rng, m));
        const Matrix z = oracle::random_matrix(rng, n, m, -0.3, 0.3);
        const double eps = std::pow(10.0, -(trial % 10));
        const ProjectionResult res = solve_projection_inexact(z, a, b, eps, DualVector::zeros(n, m));
        ASSERT_TRUE(res.converged);
        // recheck from the returned coupling and dual only
        EXPECT_EQ(res.coupling, primal_from_dual(res.dual, z));
        const double residual = feasibility_residual(res.coupling, a, b);
        EXPECT_NEAR(residual, res.residual_l2, 1e-15);
        EXPECT_LE(residual * (1.0 + res.dual.norm()), eps);
    }
}

TEST(ProjectInexact, CapReportsBestIterate)
{
    std::mt19937_64 rng(42);
    const Marginals a(oracle::random_simplex(rng, 8));
    const Marginals b(oracle::random_simplex(rng, 8));
    const Matrix z = oracle::random_matrix(rng, 8, 8, -1.0, 1.0);
    InnerSolverOptions opts;
    opts.max_iterations = 3;
    const ProjectionResult res = solve_projection_inexact(z, a, b, 0.0, DualVector::zeros(8, 8), opts);
    EXPECT_FALSE(res.converged);
    EXPECT_EQ(res.inner_iterations, 3);
    EXPECT_NEAR(feasibility_residual(res.coupling, a, b), res.residual_l2, 1e-15);
}

TEST(ProjectInexact, ShapeErrors)
{
    const Marginals u = Marginals::uniform(2);
    EXPECT_THROW(solve_projection_inexact(Matrix::Zero(3, 2), u, u, 1e-3, DualVector::zeros(3, 2)), DimensionError);
    EXPECT_THROW(solve_projection_inexact(Matrix::Zero(2, 2), u, u, 1e-3, DualVector::zeros(3, 2)), DimensionError);
}

TEST(ProjectExact, Examples)
{
    const Marginals one = Marginals::uniform(1);
    for (double v : {-3.0, 0.0, 7.5}) {
        const ProjectionResult res = solve_projection_exact(Matrix::Constant(1, 1, v), one, one);
        EXPECT_NEAR(res.coupling(0, 0), 1.0, 1e-14);
    }

    const Marginals u = Marginals::uniform(2);
    const ProjectionResult res = solve_projection_exact(mat2(1, 0, 0, 1), u, u);
    EXPECT_LE((res.coupling - mat2(0.5, 0, 0, 0.5)).cwiseAbs().maxCoeff(), 1e-12);

    std::mt19937_64 rng(51);
    for (int trial = 0; trial < 20; ++trial) {
        const Matrix z = oracle::random_matrix(rng, 2, 2, -1.0, 1.0);
        const ProjectionResult p = solve_projection_exact(z, u, u);
        EXPECT_LE((p.coupling - two_by_two_projection(z)).cwiseAbs().maxCoeff(), 1e-10);
    }
}

TEST(ProjectExact, Idempotent)
{
    std::mt19937_64 rng(52);
    const Marginals a(oracle::random_simplex(rng, 5));
    const Marginals b(oracle::random_simplex(rng, 6));
    const Matrix inside = round_to_polytope(oracle::random_matrix(rng, 5, 6), a, b);
    const ProjectionResult res = solve_projection_exact(inside, a, b, 1e-12);
    EXPECT_LE((res.coupling - inside).cwiseAbs().maxCoeff(), 1e-11);
}

TEST(ProjectExact, VariationalInequality)
{
    std::mt19937_64 rng(53);
    const Marginals a(oracle::random_simplex(rng, 6));
    const Marginals b(oracle::random_simplex(rng, 6));
    const Matrix z = oracle::random_matrix(rng, 6, 6, -0.2, 0.3);
    const ProjectionResult res = solve_projection_exact(z, a, b, 1e-12);
    EXPECT_LE(feasibility_residual(res.coupling, a, b), 1e-14);
    EXPECT_TRUE((res.coupling.array() >= 0.0).all());
    for (int trial = 0; trial < 100; ++trial) {
        const Matrix other = round_to_polytope(oracle::random_matrix(rng, 6, 6), a, b);
        EXPECT_LE((z - res.coupling).cwiseProduct(other - res.coupling).sum(), 1e-8);
    }
}

TEST(Rounding, Examples)
{
    const Marginals u = Marginals::uniform(2);
    const Matrix feasible = mat2(0.1, 0.4, 0.4, 0.1);
    EXPECT_EQ(round_to_polytope(feasible, u, u), feasible);
    EXPECT_EQ(round_to_polytope(Matrix::Zero(2, 2), u, u), Matrix::Constant(2, 2, 0.25));
}

TEST(Rounding, BoundAndFeasibility)
{
    std::mt19937_64 rng(61);
    for (int trial = 0; trial < 100; ++trial) {
        const Index n = 2 + trial % 6;
        const Index m = 2 + (trial * 7) % 5;
        const Marginals a(oracle::random_simplex(rng, n));
        const Marginals b(oracle::random_simplex(rng, m));
        // a feasible product plan with perturbed entries
        Matrix pi = a.weights() * b.weights().transpose();
        pi = (pi.array() * (1.0 + 0.5 * oracle::random_matrix(rng, n, m, -1.0, 1.0).array())).matrix();
        const Matrix out = round_to_polytope(pi, a, b);
        EXPECT_TRUE((out.array() >= 0.0).all());
        EXPECT_LE(feasibility_residual(out, a, b), 1e-14);
        const double l1_bound = 2.0 * l1_marginal_error(pi, a, b);
        EXPECT_LE((pi - out).cwiseAbs().sum(), l1_bound * (1 + 1e-12) + 1e-15);
        EXPECT_LE(l1_bound, 2.0 * std::sqrt(static_cast<double>(n + m)) * feasibility_residual(pi, a, b) + 1e-15);
    }
}

TEST(Rounding, ZeroRowsAndErrors)
{
    const Marginals u = Marginals::uniform(2);
    const Matrix with_zero_row = mat2(0, 0, 0.3, 0.9);
    const Matrix out = round_to_polytope(with_zero_row, u, u);
    EXPECT_LE(feasibility_residual(out, u, u), 1e-15);
    EXPECT_THROW(round_to_polytope(mat2(-0.1, 0, 0, 0), u, u), DimensionError);
    const Marginals three = Marginals::uniform(3);
    EXPECT_THROW(round_to_polytope(Matrix::Zero(2, 2), three, u), DimensionError);
}
