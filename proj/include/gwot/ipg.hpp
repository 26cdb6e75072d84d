#pragma once

#include "gwot/polytope_proj.hpp"
#include "gwot/trace.hpp"
#include "gwot/types.hpp"

#include <optional>

namespace gwot {

struct IpgConfig {
    double gamma_factor = 1.01;  // gamma = gamma_factor * L_f, must exceed 1
    double alpha = 3.0;          // eps_k = eps_scale * (k + 1)^(-alpha), alpha > 1
    double eps_scale = 1.0;
    long max_iter = 5000;
    double rel_tol = 1e-9;       // ||Pi^{k+1} - Pi^k||_F / max(1, ||Pi^k||_F)
    bool record_shadow = false;
    InnerSolverOptions inner;

    void validate() const;
};

struct IpgResult {
    Coupling coupling;   // raw last iterate, feasible only up to its residual
    Coupling rounded;    // round_to_polytope(coupling)
    DualVector dual;     // multiplier of the last accepted projection
    SolverTrace trace;
};

/// eps_scale * (k + 1)^(-alpha). Throws for alpha <= 1 (the schedule must be summable).
double tolerance_schedule(long k, double alpha, double eps_scale);

/// Inexact projected gradient:
///   Pi^{k+1} = max(0, A^* y^{k+1} + Pi^k - grad f(Pi^k) / gamma)
/// with y^{k+1} accepted once ||A Pi^{k+1} - r|| (1 + ||y^{k+1}||) <= eps_k.
/// The dual of each inner solve is warm started from the previous one.
IpgResult ipg_solve(const CostMatrix& c1, const CostMatrix& c2, const Marginals& a,
                    const Marginals& b, const Coupling& pi0, const IpgConfig& config = {});

/// ||Pi - P_U(Pi - grad f(Pi) / gamma)||_F with the projection computed by
/// the reference solver at tolerance 1e-12.
double stationarity_measure(const Coupling& pi, const CostMatrix& c1, const CostMatrix& c2,
                            const Marginals& a, const Marginals& b, double gamma);

/// E = eps_{-1} + sum_{k>=0} eps_k for the power schedule, with
/// eps_{-1} = ||A Pi^0 - r||.
double tolerance_total(double initial_residual, double alpha, double eps_scale);

/// Slack of the approximate descent inequality for the rounded iterates:
///   4 gamma (m+n) (eps_{k-1}^2 + eps_k^2) + (6E + 4) 2 gamma (m+n) eps_k.
double descent_slack(double gamma, Index n, Index m, double eps_prev, double eps_k, double total);

} // namespace gwot
