#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>

namespace gwot {

using Index = Eigen::Index;
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;

// Transport matrices are plain dense matrices; iterates of the solvers are
// allowed to leave the transport polytope, so no feasibility is enforced.
using Coupling = Matrix;

class DimensionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Square nonnegative dissimilarity matrix (the C_X / C_Y role).
class CostMatrix {
public:
    CostMatrix() = default;

    /// Validates squareness, finiteness and nonnegativity. The symmetric flag
    /// is detected from the entries (exact equality with the transpose).
    explicit CostMatrix(Matrix entries);

    const Matrix& entries() const noexcept { return entries_; }
    Index size() const noexcept { return entries_.rows(); }
    bool symmetric() const noexcept { return symmetric_; }

    double operator()(Index i, Index j) const { return entries_(i, j); }

private:
    Matrix entries_;
    bool symmetric_ = true;
};

/// Probability vector. Weights are rejected, never renormalized, when their
/// sum is off by more than kSumTolerance.
class Marginals {
public:
    static constexpr double kSumTolerance = 1e-12;

    Marginals() = default;
    explicit Marginals(Vector weights);

    static Marginals uniform(Index n);

    const Vector& weights() const noexcept { return weights_; }
    Index size() const noexcept { return weights_.size(); }
    double operator[](Index i) const { return weights_[i]; }

private:
    Vector weights_;
};

/// Image of a coupling under the marginal operator: (Pi 1_m, Pi^T 1_n).
struct ConstraintImage {
    Vector row_sums;
    Vector col_sums;

    Vector stacked() const;
};

/// Multipliers of the row and column constraints.
struct DualVector {
    Vector u;
    Vector v;

    static DualVector zeros(Index n, Index m) { return {Vector::Zero(n), Vector::Zero(m)}; }
    double norm() const { return std::sqrt(u.squaredNorm() + v.squaredNorm()); }
    Vector stacked() const;
};

// r = [a; b]
Vector stack_marginals(const Marginals& a, const Marginals& b);

inline void require(bool cond, const std::string& what)
{
    if (!cond) throw DimensionError(what);
}

} // namespace gwot
