#include "gwot/baselines.hpp"

#include "gwot/gw_core.hpp"

#include "fp_env.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>

namespace gwot {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start)
{
    return std::chrono::duration<double>(Clock::now() - start).count();
}

void check_problem(const CostMatrix& c1, const CostMatrix& c2, const Marginals& a,
                   const Marginals& b, const Coupling& pi0, const char* who)
{
    const std::string name(who);
    require(a.size() == c1.size() && b.size() == c2.size(), name + ": marginal sizes do not match the costs");
    require(pi0.rows() == c1.size() && pi0.cols() == c2.size(), name + ": initial coupling has the wrong shape");
}

// One outer step maps (Pi, grad E(Pi)) to the next plan and reports the
// number of inner iterations it used.
template <class Step>
BaselineResult entropic_loop(const CostMatrix& c1, const CostMatrix& c2, const Marginals& a,
                             const Marginals& b, const Coupling& pi0, const EntropicConfig& config,
                             const char* who, Step&& step)
{
    config.validate();
    check_problem(c1, c2, a, b, pi0, who);
    require((pi0.array() > 0.0).all(), std::string(who) + ": initial coupling must be strictly positive");

    const detail::FlushDenormals ftz;
    const auto start = Clock::now();
    const double energy_constant = gw_energy_constant(c1, c2, a, b);
    BaselineResult out;
    SolverTrace& trace = out.trace;
    trace.initial_residual = feasibility_residual(pi0, a, b);
    trace.status = SolverStatus::max_iter;

    Coupling pi = pi0;
    Matrix grad = energy_gradient(pi, c1, c2);
    for (long k = 0; k < config.max_iter; ++k) {
        long inner = 0;
        Coupling next;
        try {
            next = step(pi, grad, inner);
        } catch (const SolverFailure&) {
            trace.status = SolverStatus::failed;
            break;
        }
        if (!next.allFinite()) {
            trace.status = SolverStatus::failed;
            break;
        }

        IterationRecord rec;
        rec.k = k;
        rec.inner_iterations = inner;
        rec.successive_change = (next - pi).norm();
        const double scale = std::max(1.0, pi.norm());
        pi = std::move(next);
        grad = energy_gradient(pi, c1, c2);
        // grad = 2 grad f and <grad f(Pi), Pi> = 2 f(Pi)
        rec.f_value = 0.25 * grad.cwiseProduct(pi).sum();
        rec.energy = energy_constant + 2.0 * rec.f_value;
        rec.residual_l2 = feasibility_residual(pi, a, b);
        rec.elapsed_s = seconds_since(start);
        trace.records.push_back(rec);

        if (!std::isfinite(rec.energy)) {
            trace.status = SolverStatus::failed;
            break;
        }
        if (rec.successive_change / scale <= config.outer_tol) {
            trace.status = SolverStatus::converged;
            break;
        }
    }
    out.coupling = std::move(pi);
    return out;
}

} // namespace

void EntropicConfig::validate() const
{
    if (!(epsilon > 0.0)) throw std::invalid_argument("EntropicConfig: epsilon must be positive");
    if (max_iter < 1 || sinkhorn_max_iter < 1) {
        throw std::invalid_argument("EntropicConfig: iteration limits must be positive");
    }
    if (!(sinkhorn_tol > 0.0) || !(outer_tol >= 0.0)) {
        throw std::invalid_argument("EntropicConfig: tolerances must be positive");
    }
}

Matrix energy_gradient(const Coupling& pi, const CostMatrix& c1, const CostMatrix& c2)
{
    return 2.0 * gw_gradient(pi, c1, c2);
}

double cg_step_length(double quadratic, double linear)
{
    if (quadratic > 0.0) return std::clamp(-linear / (2.0 * quadratic), 0.0, 1.0);
    return quadratic + linear < 0.0 ? 1.0 : 0.0;
}

BaselineResult cg_solve(const CostMatrix& c1, const CostMatrix& c2, const Marginals& a,
                        const Marginals& b, const Coupling& pi0, long max_iter, double tol)
{
    check_problem(c1, c2, a, b, pi0, "cg_solve");
    require((pi0.array() >= 0.0).all() && feasibility_residual(pi0, a, b) <= 1e-9,
            "cg_solve: initial coupling must be feasible");
    if (max_iter < 1) throw std::invalid_argument("cg_solve: max_iter must be positive");

    const auto start = Clock::now();
    const double energy_constant = gw_energy_constant(c1, c2, a, b);
    BaselineResult out;
    SolverTrace& trace = out.trace;
    trace.initial_residual = feasibility_residual(pi0, a, b);
    trace.status = SolverStatus::max_iter;

    Coupling pi = pi0;
    Matrix grad = gw_gradient(pi, c1, c2);
    for (long k = 0; k < max_iter; ++k) {
        const OtPlan vertex = ot_network_simplex(grad, a, b);
        const Matrix direction = vertex.plan - pi;
        const double linear = grad.cwiseProduct(direction).sum();

        IterationRecord rec;
        rec.k = k;
        rec.inner_iterations = vertex.pivots;
        const bool stop = -linear <= tol;
        if (!stop) {
            const Matrix grad_dir = gw_gradient(direction, c1, c2);
            const double quadratic = 0.5 * grad_dir.cwiseProduct(direction).sum();
            const double t = cg_step_length(quadratic, linear);
            pi += t * direction;
            // grad f is linear in Pi
            grad += t * grad_dir;
            rec.successive_change = t * direction.norm();
        }
        rec.f_value = 0.5 * grad.cwiseProduct(pi).sum();
        rec.energy = energy_constant + 2.0 * rec.f_value;
        rec.residual_l2 = feasibility_residual(pi, a, b);
        rec.elapsed_s = seconds_since(start);
        trace.records.push_back(rec);
        if (stop) {
            trace.status = SolverStatus::converged;
            break;
        }
    }
    out.coupling = std::move(pi);
    return out;
}

BaselineResult epgd_solve(const CostMatrix& c1, const CostMatrix& c2, const Marginals& a,
                          const Marginals& b, const Coupling& pi0, const EntropicConfig& config)
{
    Vector f;
    Vector g;
    return entropic_loop(c1, c2, a, b, pi0, config, "epgd_solve",
                         [&](const Coupling&, const Matrix& grad, long& inner) {
                             SinkhornResult s = sinkhorn_solve(grad, a, b, config.epsilon,
                                                               config.sinkhorn_max_iter,
                                                               config.sinkhorn_tol, &f, &g);
                             inner = s.iterations;
                             f = std::move(s.f);
                             g = std::move(s.g);
                             return std::move(s.plan);
                         });
}

BaselineResult ppa_solve(const CostMatrix& c1, const CostMatrix& c2, const Marginals& a,
                         const Marginals& b, const Coupling& pi0, const EntropicConfig& config)
{
    Vector f;
    Vector g;
    const double eps = config.epsilon;
    return entropic_loop(c1, c2, a, b, pi0, config, "ppa_solve",
                         [&](const Coupling& pi, const Matrix& grad, long& inner) {
                             // log 0 = -inf turns into a forbidden (+inf) cell
                             const Matrix cost = grad - eps * pi.array().log().matrix();
                             SinkhornResult s = sinkhorn_solve(cost, a, b, eps, config.sinkhorn_max_iter,
                                                               config.sinkhorn_tol, &f, &g);
                             inner = s.iterations;
                             f = std::move(s.f);
                             g = std::move(s.g);
                             return std::move(s.plan);
                         });
}

BaselineResult bapg_solve(const CostMatrix& c1, const CostMatrix& c2, const Marginals& a,
                          const Marginals& b, const Coupling& pi0, const EntropicConfig& config)
{
    const double eps = config.epsilon;
    return entropic_loop(c1, c2, a, b, pi0, config, "bapg_solve",
                         [&](const Coupling& pi, const Matrix& grad, long& inner) {
                             inner = 0;
                             Coupling t = pi.cwiseProduct((-grad / eps).array().exp().matrix());
                             const Vector rows = t.rowwise().sum();
                             t = (a.weights().array() / rows.array()).matrix().asDiagonal() * t;
                             const Matrix grad_half = energy_gradient(t, c1, c2);
                             t = t.cwiseProduct((-grad_half / eps).array().exp().matrix());
                             const Vector cols = t.colwise().sum().transpose();
                             t = t * (b.weights().array() / cols.array()).matrix().asDiagonal();
                             return t;
                         });
}

} // namespace gwot
