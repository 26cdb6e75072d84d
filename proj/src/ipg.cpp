#include "gwot/ipg.hpp"

#include "gwot/gw_core.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <stdexcept>

namespace gwot {

void IpgConfig::validate() const
{
    if (!(gamma_factor > 1.0)) throw std::invalid_argument("IpgConfig: gamma_factor must exceed 1");
    if (!(alpha > 1.0)) throw std::invalid_argument("IpgConfig: alpha must exceed 1");
    if (!(eps_scale > 0.0)) throw std::invalid_argument("IpgConfig: eps_scale must be positive");
    if (max_iter < 1) throw std::invalid_argument("IpgConfig: max_iter must be at least 1");
    if (!(rel_tol >= 0.0)) throw std::invalid_argument("IpgConfig: rel_tol must be nonnegative");
}

double tolerance_schedule(long k, double alpha, double eps_scale)
{
    if (k < 0) throw std::invalid_argument("tolerance_schedule: k must be nonnegative");
    if (!(alpha > 1.0)) throw std::invalid_argument("tolerance_schedule: alpha must exceed 1");
    if (!(eps_scale > 0.0)) throw std::invalid_argument("tolerance_schedule: eps_scale must be positive");
    return eps_scale * std::pow(static_cast<double>(k + 1), -alpha);
}

double tolerance_total(double initial_residual, double alpha, double eps_scale)
{
    return initial_residual + eps_scale * std::riemann_zeta(alpha);
}

double descent_slack(double gamma, Index n, Index m, double eps_prev, double eps_k, double total)
{
    const double nm = static_cast<double>(n + m);
    return 4.0 * gamma * nm * (eps_prev * eps_prev + eps_k * eps_k) +
           (6.0 * total + 4.0) * 2.0 * gamma * nm * eps_k;
}

IpgResult ipg_solve(const CostMatrix& c1, const CostMatrix& c2, const Marginals& a,
                    const Marginals& b, const Coupling& pi0, const IpgConfig& config)
{
    using clock = std::chrono::steady_clock;
    config.validate();
    const Index n = c1.size();
    const Index m = c2.size();
    require(pi0.rows() == n && pi0.cols() == m, "ipg_solve: initial coupling has the wrong shape");
    require(a.size() == n && b.size() == m, "ipg_solve: marginal sizes do not match the costs");
    require((pi0.array() >= 0.0).all(), "ipg_solve: initial coupling must be nonnegative");

    const auto start = clock::now();
    IpgResult out;
    SolverTrace& trace = out.trace;

    const LipschitzBound lf = lipschitz_bound(c1, c2);
    // with both costs zero the gradient vanishes and any positive gamma works
    const double gamma = config.gamma_factor * (lf.value > 0.0 ? lf.value : 1.0);
    trace.lipschitz = lf.value;
    trace.gamma = gamma;
    trace.initial_residual = feasibility_residual(pi0, a, b);
    if (config.record_shadow) {
        trace.initial_shadow_f = gw_quadratic(round_to_polytope(pi0, a, b), c1, c2);
    }
    const double energy_constant = gw_energy_constant(c1, c2, a, b);

    Coupling pi = pi0;
    Matrix grad = gw_gradient(pi, c1, c2);
    DualVector y = DualVector::zeros(n, m);
    trace.status = SolverStatus::max_iter;

    for (long k = 0; k < config.max_iter; ++k) {
        const double eps = tolerance_schedule(k, config.alpha, config.eps_scale);
        const Matrix z = pi - grad / gamma;
        ProjectionResult proj = solve_projection_inexact(z, a, b, eps, y, config.inner);
        if (!proj.converged) {
            trace.status = SolverStatus::inner_failure;
            break;
        }

        IterationRecord rec;
        rec.k = k;
        rec.eps_k = eps;
        rec.residual_l2 = proj.residual_l2;
        rec.dual_norm = proj.dual.norm();
        rec.inner_iterations = proj.inner_iterations;
        rec.successive_change = (proj.coupling - pi).norm();
        const double scale = std::max(1.0, pi.norm());

        pi = std::move(proj.coupling);
        y = std::move(proj.dual);
        grad = gw_gradient(pi, c1, c2);
        // f is homogeneous of degree two, so <grad f(Pi), Pi> = 2 f(Pi)
        rec.f_value = 0.5 * grad.cwiseProduct(pi).sum();
        rec.energy = energy_constant + 2.0 * rec.f_value;
        if (config.record_shadow) {
            const Coupling shadow = round_to_polytope(pi, a, b);
            rec.shadow_f = gw_quadratic(shadow, c1, c2);
            rec.shadow_distance = (shadow - pi).norm();
        }
        rec.elapsed_s = std::chrono::duration<double>(clock::now() - start).count();
        trace.records.push_back(rec);

        if (rec.successive_change / scale <= config.rel_tol) {
            trace.status = SolverStatus::converged;
            break;
        }
    }

    out.rounded = round_to_polytope(pi, a, b);
    out.coupling = std::move(pi);
    out.dual = std::move(y);
    return out;
}

double stationarity_measure(const Coupling& pi, const CostMatrix& c1, const CostMatrix& c2,
                            const Marginals& a, const Marginals& b, double gamma)
{
    if (!(gamma > 0.0)) throw std::invalid_argument("stationarity_measure: gamma must be positive");
    const Matrix z = pi - gw_gradient(pi, c1, c2) / gamma;
    const ProjectionResult proj = solve_projection_exact(z, a, b, 1e-12);
    return (pi - proj.coupling).norm();
}

} // namespace gwot
