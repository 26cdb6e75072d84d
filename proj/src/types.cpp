#include "gwot/types.hpp"

#include <utility>

namespace gwot {

CostMatrix::CostMatrix(Matrix entries) : entries_(std::move(entries))
{
    require(entries_.rows() == entries_.cols(), "CostMatrix: matrix must be square");
    require(entries_.allFinite(), "CostMatrix: entries must be finite");
    require((entries_.array() >= 0.0).all(), "CostMatrix: entries must be nonnegative");
    symmetric_ = (entries_ - entries_.transpose()).cwiseAbs().maxCoeff() == 0.0;
}

Marginals::Marginals(Vector weights) : weights_(std::move(weights))
{
    require(weights_.size() > 0, "Marginals: empty weight vector");
    require(weights_.allFinite(), "Marginals: weights must be finite");
    require((weights_.array() >= 0.0).all(), "Marginals: weights must be nonnegative");
    const double total = weights_.sum();
    if (std::abs(total - 1.0) > kSumTolerance) {
        throw DimensionError("Marginals: weights sum to " + std::to_string(total) +
                             ", expected 1 within 1e-12");
    }
}

Marginals Marginals::uniform(Index n)
{
    require(n > 0, "Marginals::uniform: n must be positive");
    return Marginals(Vector::Constant(n, 1.0 / static_cast<double>(n)));
}

Vector ConstraintImage::stacked() const
{
    Vector out(row_sums.size() + col_sums.size());
    out << row_sums, col_sums;
    return out;
}

Vector DualVector::stacked() const
{
    Vector out(u.size() + v.size());
    out << u, v;
    return out;
}

Vector stack_marginals(const Marginals& a, const Marginals& b)
{
    Vector r(a.size() + b.size());
    r << a.weights(), b.weights();
    return r;
}

} // namespace gwot
