#pragma once

#include "gwot/network_simplex.hpp"
#include "gwot/sinkhorn.hpp"
#include "gwot/trace.hpp"
#include "gwot/types.hpp"

namespace gwot {

// Comparison solvers for squared-loss GW. The entropic ones follow the
// update rules of the POT library (ot.gromov): the linearized cost they
// regularize is the gradient of the GW energy, i.e. 2 * gw_gradient, which
// agrees with POT's gwggrad up to row/column-separable terms that any
// projection onto U(a, b) ignores.

struct EntropicConfig {
    double epsilon = 1e-1;
    long max_iter = 5000;
    long sinkhorn_max_iter = 1000;
    double sinkhorn_tol = 1e-9;
    double outer_tol = 1e-9;  // ||Pi^{k+1} - Pi^k||_F / max(1, ||Pi^k||_F)

    void validate() const;
};

struct BaselineResult {
    Coupling coupling;
    SolverTrace trace;
};

/// Gradient of the GW energy: 2 * gw_gradient.
Matrix energy_gradient(const Coupling& pi, const CostMatrix& c1, const CostMatrix& c2);

/// Conditional gradient (Frank-Wolfe) with an exact network-simplex linear
/// minimization oracle and exact line search on the quadratic
/// t -> f(Pi) + t <grad f, D> + t^2 f(D). Stops when the Frank-Wolfe gap
/// <grad f(Pi), Pi - S> drops to `tol`.
BaselineResult cg_solve(const CostMatrix& c1, const CostMatrix& c2, const Marginals& a,
                        const Marginals& b, const Coupling& pi0, long max_iter = 5000,
                        double tol = 1e-9);

/// Closed-form step of the conditional gradient line search for
/// min_{t in [0,1]} q t^2 + l t.
double cg_step_length(double quadratic, double linear);

/// Entropic projected gradient: Pi <- sinkhorn(grad E(Pi), eps).
BaselineResult epgd_solve(const CostMatrix& c1, const CostMatrix& c2, const Marginals& a,
                          const Marginals& b, const Coupling& pi0, const EntropicConfig& config);

/// Entropic proximal point: Pi <- sinkhorn(grad E(Pi) - eps log Pi, eps),
/// i.e. the kernel is multiplied by the current plan before scaling.
BaselineResult ppa_solve(const CostMatrix& c1, const CostMatrix& c2, const Marginals& a,
                         const Marginals& b, const Coupling& pi0, const EntropicConfig& config);

/// Bregman alternating projected gradient (single loop):
///   Pi <- diag(a / rows) (Pi * exp(-grad E(Pi) / eps)),
///   Pi <- (Pi * exp(-grad E(Pi) / eps)) diag(b / cols).
/// Kernels are formed directly, without stabilization, so small eps
/// overflows and the run is reported with status failed.
BaselineResult bapg_solve(const CostMatrix& c1, const CostMatrix& c2, const Marginals& a,
                          const Marginals& b, const Coupling& pi0, const EntropicConfig& config);

} // namespace gwot
