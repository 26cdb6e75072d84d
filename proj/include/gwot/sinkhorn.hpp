#pragma once

#include "gwot/types.hpp"

#include <stdexcept>

namespace gwot {

/// Raised when the entropic kernel cannot be represented even after
/// log-domain stabilization (non-finite costs or potentials).
class SolverFailure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct SinkhornResult {
    Coupling plan;
    Vector f;  // log-domain potentials: plan_ij = exp((f_i + g_j - cost_ij) / eps)
    Vector g;
    long iterations = 0;
    double marginal_error = 0.0;  // ||plan 1 - a||_1 + ||plan^T 1 - b||_1
    bool converged = false;
};

/// Entropic OT, min <cost, P> - eps H(P) over U(a, b).
///
/// Scaling iterations run on a kernel exp((f_i + g_j - cost_ij) / eps)
/// whose potentials are refreshed by an exact log-sum-exp sweep whenever the
/// scalings leave [1e-100, 1e100] or stop being finite. Cost entries may be
/// +inf (forbidden cells). `f0`/`g0` warm start the potentials.
SinkhornResult sinkhorn_solve(const Matrix& cost, const Marginals& a, const Marginals& b,
                              double epsilon, long max_iter, double tol,
                              const Vector* f0 = nullptr, const Vector* g0 = nullptr);

inline Coupling sinkhorn(const Matrix& cost, const Marginals& a, const Marginals& b,
                         double epsilon, long max_iter = 1000, double tol = 1e-9)
{
    return sinkhorn_solve(cost, a, b, epsilon, max_iter, tol).plan;
}

} // namespace gwot
