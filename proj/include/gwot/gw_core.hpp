#pragma once

#include "gwot/types.hpp"

namespace gwot {

/// Marginal operator A: Pi -> (Pi 1_m, Pi^T 1_n).
ConstraintImage apply_A(const Coupling& pi);

/// Adjoint of A. `y` is the stacked vector (u, v) of length n + m; the
/// result is the n x m matrix with entries u_i + v_j.
Matrix apply_A_adjoint(const Vector& y, Index n, Index m);
Matrix apply_A_adjoint(const DualVector& y);

/// Residual ||A pi - r||_2.
double feasibility_residual(const Coupling& pi, const Marginals& a, const Marginals& b);

/// f(Pi) = -<C1 Pi C2^T, Pi> (C2^T = C2 for metric costs).
double gw_quadratic(const Coupling& pi, const CostMatrix& c1, const CostMatrix& c2);

/// Squared-loss GW energy
///   sum_{ii'} C1_{ii'}^2 a_i a_i' + sum_{jj'} C2_{jj'}^2 b_j b_j' + 2 f(Pi).
/// Pi does not need to be feasible; the constant part always uses a and b.
double gw_energy(const Coupling& pi, const CostMatrix& c1, const CostMatrix& c2,
                 const Marginals& a, const Marginals& b);

/// The Pi-independent part of gw_energy.
double gw_energy_constant(const CostMatrix& c1, const CostMatrix& c2,
                          const Marginals& a, const Marginals& b);

/// Gradient of f: -(C1 Pi C2^T + C1^T Pi C2). Reduces to -2 C1 Pi C2 for
/// symmetric inputs, which is what gets evaluated in that case.
Matrix gw_gradient(const Coupling& pi, const CostMatrix& c1, const CostMatrix& c2);

struct SpectralNormEstimate {
    double value = 0.0;
    int iterations = 0;
    bool converged = false;
};

/// Largest singular value by power iteration on M^T M.
/// Not converged after `max_iter`: the best Rayleigh estimate inflated by 1%.
SpectralNormEstimate spectral_norm(const Matrix& m, double tol = 1e-10, int max_iter = 5000);

struct LipschitzBound {
    double value = 0.0;
    bool converged = true;  // false when either power iteration hit its cap
};

/// L_f = 2 ||C1||_2 ||C2||_2.
LipschitzBound lipschitz_bound(const CostMatrix& c1, const CostMatrix& c2);

} // namespace gwot
