#include "gwot/trace.hpp"

namespace gwot {

std::string_view to_string(SolverStatus status)
{
    switch (status) {
    case SolverStatus::converged: return "converged";
    case SolverStatus::max_iter: return "max_iter";
    case SolverStatus::inner_failure: return "inner_failure";
    case SolverStatus::failed: return "failed";
    }
    return "unknown";
}

} // namespace gwot
