#pragma once

#include "gwot/types.hpp"

namespace gwot {

// Euclidean projection onto the transport polytope U(a, b), solved through
// its dual
//
//   g(y) = 1/2 ||max(0, A^* y + Z)||_F^2 - <r, y>,
//   grad g(y) = A max(0, A^* y + Z) - r,
//
// whose gradient is (n + m)-Lipschitz because ||A||_2^2 = n + m.

struct ProjectionResult {
    Coupling coupling;
    DualVector dual;
    double residual_l2 = 0.0;  // ||A coupling - r||_2
    long inner_iterations = 0;
    bool converged = false;
};

/// max(0, u_i + v_j + z_ij).
Coupling primal_from_dual(const DualVector& y, const Matrix& z);

double dual_value(const DualVector& y, const Matrix& z, const Marginals& a, const Marginals& b);

/// Stacked (rows, cols) gradient of the dual objective.
Vector dual_gradient(const DualVector& y, const Matrix& z, const Marginals& a, const Marginals& b);

struct InnerSolverOptions {
    long max_iterations = 100000;
};

/// Tolerances at or below this value are treated as "residual <= kExactResidualFloor".
inline constexpr double kExactResidualFloor = 1e-14;

/// True when (residual, ||y||) satisfies ||A Pi - r|| <= eps / (1 + ||y||).
bool inexact_condition_holds(double residual_l2, double dual_norm, double eps);

/// Accelerated gradient on the dual with function-value restart, warm
/// started at `y_warm`, stopped as soon as some evaluated dual point
/// satisfies the inexact condition for `eps`. When the iteration cap is hit
/// the point with the smallest residual is returned with converged = false.
ProjectionResult solve_projection_inexact(const Matrix& z, const Marginals& a, const Marginals& b,
                                          double eps, const DualVector& y_warm,
                                          const InnerSolverOptions& opts = {});

/// Reference projection: the dual is driven to ||grad g|| <= tol and the
/// resulting coupling is passed through round_to_polytope, so the returned
/// coupling is feasible up to rounding error.
ProjectionResult solve_projection_exact(const Matrix& z, const Marginals& a, const Marginals& b,
                                        double tol = 1e-12, const InnerSolverOptions& opts = {});

/// Feasibility repair for a nonnegative matrix: shrink rows that exceed a,
/// then columns that exceed b, then add the rank-one correction
/// err_a err_b^T / ||err_a||_1. The l1 movement is bounded by
/// 2 (||a - Pi 1||_1 + ||b - Pi^T 1||_1).
Coupling round_to_polytope(const Coupling& pi, const Marginals& a, const Marginals& b);

} // namespace gwot
