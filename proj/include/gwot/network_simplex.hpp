#pragma once

#include "gwot/types.hpp"

#include <stdexcept>

namespace gwot {

struct OtPlan {
    Coupling plan;        // basic feasible solution of U(a, b)
    double objective = 0.0;
    long basis_size = 0;  // basic cells, degenerate ones included (n + m - 1)
    Vector u;             // row potentials, u_i + v_j = cost_ij on basic cells
    Vector v;
    long pivots = 0;
};

struct NetworkSimplexOptions {
    long max_pivots = -1;           // <= 0 means 10 n m
    long bland_after_degenerate = 1000;
};

class NetworkSimplexError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Exact solution of min <cost, Pi> over U(a, b) by the transportation
/// simplex: northwest-corner start, spanning-tree basis, most negative
/// reduced cost entering, switching to Bland's rule after a run of
/// degenerate pivots. Throws on a total-mass mismatch beyond 1e-10 or when
/// the pivot cap is reached.
OtPlan ot_network_simplex(const Matrix& cost, const Vector& a, const Vector& b,
                          const NetworkSimplexOptions& opts = {});

inline OtPlan ot_network_simplex(const Matrix& cost, const Marginals& a, const Marginals& b,
                                 const NetworkSimplexOptions& opts = {})
{
    return ot_network_simplex(cost, a.weights(), b.weights(), opts);
}

} // namespace gwot
