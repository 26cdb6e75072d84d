#pragma once

#include <optional>
#include <string_view>
#include <vector>

namespace gwot {

enum class SolverStatus {
    converged,
    max_iter,
    inner_failure,  // the projection solve hit its cap (iPG only)
    failed,         // non-finite iterate or kernel (entropic baselines)
};

std::string_view to_string(SolverStatus status);

/// One outer iteration k, i.e. the step Pi^k -> Pi^{k+1}. Quantities that
/// describe a coupling refer to the new iterate Pi^{k+1}.
struct IterationRecord {
    long k = 0;
    double f_value = 0.0;       // gw_quadratic(Pi^{k+1})
    double energy = 0.0;        // gw_energy(Pi^{k+1})
    double residual_l2 = 0.0;   // ||A Pi^{k+1} - r||_2
    double eps_k = 0.0;         // tolerance used for this step (0 for baselines)
    double dual_norm = 0.0;     // ||y^{k+1}||_2 (iPG only)
    long inner_iterations = 0;
    double successive_change = 0.0;  // ||Pi^{k+1} - Pi^k||_F
    std::optional<double> shadow_f;  // f(round_to_polytope(Pi^{k+1}))
    std::optional<double> shadow_distance;  // ||round(Pi^{k+1}) - Pi^{k+1}||_F
    double elapsed_s = 0.0;
};

struct SolverTrace {
    std::vector<IterationRecord> records;
    SolverStatus status = SolverStatus::max_iter;

    // Values attached to the starting point Pi^0; the shadow entries are only
    // set when shadow recording is on.
    double initial_residual = 0.0;          // eps_{-1} = ||A Pi^0 - r||_2
    std::optional<double> initial_shadow_f; // f(round(Pi^0))
    double gamma = 0.0;                     // step parameter actually used (iPG)
    double lipschitz = 0.0;

    long iterations() const { return static_cast<long>(records.size()); }
};

} // namespace gwot
