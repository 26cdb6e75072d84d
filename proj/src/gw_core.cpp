#include "gwot/gw_core.hpp"

#include <algorithm>
#include <cmath>

namespace gwot {

namespace {

void check_conformable(const Coupling& pi, const CostMatrix& c1, const CostMatrix& c2)
{
    require(pi.rows() == c1.size() && pi.cols() == c2.size(),
            "coupling is " + std::to_string(pi.rows()) + "x" + std::to_string(pi.cols()) +
                " but cost matrices are " + std::to_string(c1.size()) + " and " +
                std::to_string(c2.size()));
}

} // namespace

ConstraintImage apply_A(const Coupling& pi)
{
    return {pi.rowwise().sum(), pi.colwise().sum().transpose()};
}

Matrix apply_A_adjoint(const Vector& y, Index n, Index m)
{
    require(y.size() == n + m, "apply_A_adjoint: expected a vector of length " +
                                   std::to_string(n + m) + ", got " + std::to_string(y.size()));
    Matrix out(n, m);
    for (Index i = 0; i < n; ++i) {
        out.row(i) = y.tail(m).transpose().array() + y[i];
    }
    return out;
}

Matrix apply_A_adjoint(const DualVector& y)
{
    return apply_A_adjoint(y.stacked(), y.u.size(), y.v.size());
}

double feasibility_residual(const Coupling& pi, const Marginals& a, const Marginals& b)
{
    require(pi.rows() == a.size() && pi.cols() == b.size(), "feasibility_residual: shape mismatch");
    const Vector rows = pi.rowwise().sum() - a.weights();
    const Vector cols = pi.colwise().sum().transpose() - b.weights();
    return std::sqrt(rows.squaredNorm() + cols.squaredNorm());
}

double gw_quadratic(const Coupling& pi, const CostMatrix& c1, const CostMatrix& c2)
{
    check_conformable(pi, c1, c2);
    const Matrix left = c1.entries() * pi;
    // C2^T so that non-symmetric costs agree with the quadruple sum and the gradient
    const Matrix prod = c2.symmetric() ? Matrix(left * c2.entries()) : Matrix(left * c2.entries().transpose());
    return -prod.cwiseProduct(pi).sum();
}

double gw_energy_constant(const CostMatrix& c1, const CostMatrix& c2,
                          const Marginals& a, const Marginals& b)
{
    require(c1.size() == a.size() && c2.size() == b.size(), "gw_energy: marginal size mismatch");
    const Matrix sq1 = c1.entries().array().square().matrix();
    const Matrix sq2 = c2.entries().array().square().matrix();
    return a.weights().dot(sq1 * a.weights()) + b.weights().dot(sq2 * b.weights());
}

double gw_energy(const Coupling& pi, const CostMatrix& c1, const CostMatrix& c2,
                 const Marginals& a, const Marginals& b)
{
    return gw_energy_constant(c1, c2, a, b) + 2.0 * gw_quadratic(pi, c1, c2);
}

Matrix gw_gradient(const Coupling& pi, const CostMatrix& c1, const CostMatrix& c2)
{
    check_conformable(pi, c1, c2);
    const Matrix left = c1.entries() * pi;
    if (c1.symmetric() && c2.symmetric()) {
        return -2.0 * (left * c2.entries());
    }
    const Matrix right = c1.entries().transpose() * pi;
    return -(left * c2.entries().transpose() + right * c2.entries());
}

SpectralNormEstimate spectral_norm(const Matrix& m, double tol, int max_iter)
{
    SpectralNormEstimate est;
    const Index n = m.cols();
    if (n == 0 || m.cwiseAbs().maxCoeff() == 0.0) {
        est.converged = true;
        return est;
    }

    Vector x(n);
    for (Index i = 0; i < n; ++i) {
        x[i] = 1.0 + 1e-2 * static_cast<double>((i * 7919) % 13) / 13.0;
    }
    x.normalize();

    double lambda = 0.0;
    double best = 0.0;
    for (int it = 1; it <= max_iter; ++it) {
        const Vector mx = m * x;
        Vector next = m.transpose() * mx;
        // Rayleigh quotient of M^T M at the unit vector x
        const double rayleigh = mx.squaredNorm();
        best = std::max(best, rayleigh);
        est.iterations = it;
        const double nrm = next.norm();
        if (nrm == 0.0) {
            // start vector in the null space; the estimate so far is exact
            est.converged = true;
            break;
        }
        if (it > 1 && std::abs(rayleigh - lambda) <= tol * rayleigh) {
            lambda = rayleigh;
            est.converged = true;
            break;
        }
        lambda = rayleigh;
        x = next / nrm;
    }

    if (est.converged) {
        est.value = std::sqrt(std::max(lambda, best));
    } else {
        est.value = 1.01 * std::sqrt(best);
    }
    return est;
}

LipschitzBound lipschitz_bound(const CostMatrix& c1, const CostMatrix& c2)
{
    const auto s1 = spectral_norm(c1.entries());
    const auto s2 = spectral_norm(c2.entries());
    return {2.0 * s1.value * s2.value, s1.converged && s2.converged};
}

} // namespace gwot
