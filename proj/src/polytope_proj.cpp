#include "gwot/polytope_proj.hpp"

#include "gwot/gw_core.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

namespace gwot {

namespace {

// Everything the dual solver needs at one point y, from a single sweep over z.
struct DualPoint {
    Vector grad;        // (row sums - a, col sums - b)
    double value = 0.0; // g(y)
    double residual = 0.0;
};

class DualEvaluator {
public:
    DualEvaluator(const Matrix& z, const Marginals& a, const Marginals& b)
        : z_(z), r_(stack_marginals(a, b)), n_(z.rows()), m_(z.cols())
    {
        require(a.size() == n_ && b.size() == m_, "projection: marginal sizes do not match z");
        require(z.allFinite(), "projection: z must be finite");
    }

    Index n() const { return n_; }
    Index m() const { return m_; }

    void eval(const Vector& y, DualPoint& out) const
    {
        out.grad.resize(n_ + m_);
        auto cols = out.grad.tail(m_);
        cols.setZero();
        const auto v = y.tail(m_).transpose().array();
        double sq = 0.0;
        for (Index i = 0; i < n_; ++i) {
            row_ = (z_.row(i).array() + v + y[i]).max(0.0);
            out.grad[i] = row_.sum();
            cols += row_.matrix().transpose();
            sq += row_.matrix().squaredNorm();
        }
        out.value = 0.5 * sq - r_.dot(y);
        out.grad -= r_;
        out.residual = out.grad.norm();
    }

private:
    const Matrix& z_;
    Vector r_;
    Index n_;
    Index m_;
    mutable Eigen::Array<double, 1, Eigen::Dynamic> row_;
};

DualVector split(const Vector& y, Index n, Index m)
{
    return {y.head(n), y.tail(m)};
}

using StopRule = std::function<bool(double residual, double dual_norm)>;

// FISTA on g with step 1/(n+m). A step that increases g is rejected and the
// momentum reset, so the accepted sequence is monotone in g.
ProjectionResult accelerated_dual_solve(const DualEvaluator& ev, const Matrix& z, Vector y,
                                        const StopRule& stop, long max_iterations)
{
    const Index n = ev.n();
    const Index m = ev.m();
    const double step = 1.0 / static_cast<double>(n + m);

    ProjectionResult result;
    Vector best_y = y;
    double best_residual = std::numeric_limits<double>::infinity();

    auto finish = [&](const Vector& y_out, double residual, long iters, bool ok) {
        result.dual = split(y_out, n, m);
        result.coupling = primal_from_dual(result.dual, z);
        result.residual_l2 = residual;
        result.inner_iterations = iters;
        result.converged = ok;
        return result;
    };

    DualPoint at_y;
    DualPoint at_w;
    DualPoint at_next;
    ev.eval(y, at_y);
    if (stop(at_y.residual, y.norm())) return finish(y, at_y.residual, 0, true);
    best_residual = at_y.residual;

    Vector w = y;
    at_w = at_y;
    Vector next(n + m);
    double t = 1.0;
    bool restarted = false;

    for (long it = 1; it <= max_iterations; ++it) {
        next = w - step * at_w.grad;
        ev.eval(next, at_next);
        if (at_next.residual < best_residual) {
            best_residual = at_next.residual;
            best_y = next;
        }
        if (stop(at_next.residual, next.norm())) return finish(next, at_next.residual, it, true);

        if (at_next.value > at_y.value && !restarted) {
            // restart from the last accepted point with a plain gradient step;
            // that step is a descent step, so a repeated increase is rounding
            // noise and is accepted rather than retried forever
            t = 1.0;
            w = y;
            at_w = at_y;
            restarted = true;
            continue;
        }
        restarted = false;
        const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
        w = next + ((t - 1.0) / t_next) * (next - y);
        y.swap(next);
        std::swap(at_y, at_next);
        t = t_next;

        ev.eval(w, at_w);
        if (at_w.residual < best_residual) {
            best_residual = at_w.residual;
            best_y = w;
        }
        if (stop(at_w.residual, w.norm())) return finish(w, at_w.residual, it, true);
    }
    return finish(best_y, best_residual, max_iterations, false);
}

} // namespace

Coupling primal_from_dual(const DualVector& y, const Matrix& z)
{
    require(y.u.size() == z.rows() && y.v.size() == z.cols(), "primal_from_dual: shape mismatch");
    Coupling out(z.rows(), z.cols());
    for (Index i = 0; i < z.rows(); ++i) {
        out.row(i) = (z.row(i).array() + y.v.transpose().array() + y.u[i]).max(0.0);
    }
    return out;
}

double dual_value(const DualVector& y, const Matrix& z, const Marginals& a, const Marginals& b)
{
    const Coupling pi = primal_from_dual(y, z);
    return 0.5 * pi.squaredNorm() - a.weights().dot(y.u) - b.weights().dot(y.v);
}

Vector dual_gradient(const DualVector& y, const Matrix& z, const Marginals& a, const Marginals& b)
{
    require(a.size() == z.rows() && b.size() == z.cols(), "dual_gradient: marginal sizes do not match z");
    return apply_A(primal_from_dual(y, z)).stacked() - stack_marginals(a, b);
}

bool inexact_condition_holds(double residual_l2, double dual_norm, double eps)
{
    if (eps <= kExactResidualFloor) return residual_l2 <= kExactResidualFloor;
    return residual_l2 * (1.0 + dual_norm) <= eps;
}

ProjectionResult solve_projection_inexact(const Matrix& z, const Marginals& a, const Marginals& b,
                                          double eps, const DualVector& y_warm,
                                          const InnerSolverOptions& opts)
{
    require(eps >= 0.0, "solve_projection_inexact: eps must be nonnegative");
    require(y_warm.u.size() == z.rows() && y_warm.v.size() == z.cols(),
            "solve_projection_inexact: warm start has the wrong shape");
    const DualEvaluator ev(z, a, b);
    const StopRule stop = [eps](double residual, double dual_norm) {
        return inexact_condition_holds(residual, dual_norm, eps);
    };
    return accelerated_dual_solve(ev, z, y_warm.stacked(), stop, opts.max_iterations);
}

ProjectionResult solve_projection_exact(const Matrix& z, const Marginals& a, const Marginals& b,
                                        double tol, const InnerSolverOptions& opts)
{
    require(tol > 0.0, "solve_projection_exact: tol must be positive");
    const DualEvaluator ev(z, a, b);
    const StopRule stop = [tol](double residual, double) { return residual <= tol; };
    auto result = accelerated_dual_solve(ev, z, Vector::Zero(z.rows() + z.cols()), stop,
                                         opts.max_iterations);
    result.coupling = round_to_polytope(result.coupling, a, b);
    result.residual_l2 = feasibility_residual(result.coupling, a, b);
    return result;
}

Coupling round_to_polytope(const Coupling& pi, const Marginals& a, const Marginals& b)
{
    require(pi.rows() == a.size() && pi.cols() == b.size(), "round_to_polytope: shape mismatch");
    require((pi.array() >= 0.0).all(), "round_to_polytope: coupling must be nonnegative");
    if (std::abs(a.weights().sum() - b.weights().sum()) > 1e-10) {
        throw std::invalid_argument("round_to_polytope: marginals carry different total mass");
    }

    Coupling out = pi;
    const Vector rows = out.rowwise().sum();
    for (Index i = 0; i < out.rows(); ++i) {
        if (rows[i] > a[i]) out.row(i) *= a[i] / rows[i];
    }
    const Vector cols = out.colwise().sum().transpose();
    for (Index j = 0; j < out.cols(); ++j) {
        if (cols[j] > b[j]) out.col(j) *= b[j] / cols[j];
    }

    const Vector err_a = (a.weights() - out.rowwise().sum()).cwiseMax(0.0);
    const Vector err_b = (b.weights() - out.colwise().sum().transpose()).cwiseMax(0.0);
    const double mass = err_a.sum();
    if (mass > 0.0) {
        out.noalias() += err_a * err_b.transpose() / mass;
    }
    return out;
}

} // namespace gwot
