#include "gwot/sinkhorn.hpp"

#include "fp_env.hpp"

#include <cmath>
#include <limits>

namespace gwot {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kScalingBound = 1e100;

bool scaling_ok(const Vector& x, const Vector& marginal)
{
    for (Index i = 0; i < x.size(); ++i) {
        if (marginal[i] == 0.0) continue;
        const double s = x[i];
        if (!std::isfinite(s) || s > kScalingBound || s < 1.0 / kScalingBound) return false;
    }
    return true;
}

class LogDomainState {
public:
    LogDomainState(const Matrix& cost, const Vector& a, const Vector& b, double eps)
        : cost_(cost), a_(a), b_(b), eps_(eps), n_(cost.rows()), m_(cost.cols())
    {
    }

    // Exact row then column update of the potentials.
    void sweep(Vector& f, Vector& g) const
    {
        for (Index i = 0; i < n_; ++i) {
            f[i] = a_[i] == 0.0 ? kNegInf : update(a_[i], [&](Index j) { return g[j] - cost_(i, j); }, m_);
        }
        for (Index j = 0; j < m_; ++j) {
            g[j] = b_[j] == 0.0 ? kNegInf : update(b_[j], [&](Index i) { return f[i] - cost_(i, j); }, n_);
        }
        for (Index i = 0; i < n_; ++i) {
            if (std::isnan(f[i]) || f[i] == std::numeric_limits<double>::infinity()) fail();
        }
        for (Index j = 0; j < m_; ++j) {
            if (std::isnan(g[j]) || g[j] == std::numeric_limits<double>::infinity()) fail();
        }
    }

    void kernel(const Vector& f, const Vector& g, Matrix& k) const
    {
        k.resize(n_, m_);
        for (Index i = 0; i < n_; ++i) {
            for (Index j = 0; j < m_; ++j) {
                k(i, j) = std::exp((f[i] + g[j] - cost_(i, j)) / eps_);
            }
        }
        if (!k.allFinite()) fail();
    }

private:
    // eps log(mass) - eps LSE_l(x_l / eps)
    template <class Term>
    double update(double mass, Term term, Index count) const
    {
        double mx = kNegInf;
        for (Index l = 0; l < count; ++l) mx = std::max(mx, term(l));
        if (mx == kNegInf) fail();
        double s = 0.0;
        for (Index l = 0; l < count; ++l) s += std::exp((term(l) - mx) / eps_);
        return eps_ * std::log(mass) - mx - eps_ * std::log(s);
    }

    [[noreturn]] void fail() const
    {
        throw SolverFailure("sinkhorn: non-finite kernel at epsilon = " + std::to_string(eps_));
    }

    const Matrix& cost_;
    const Vector& a_;
    const Vector& b_;
    double eps_;
    Index n_;
    Index m_;
};

} // namespace

SinkhornResult sinkhorn_solve(const Matrix& cost, const Marginals& a, const Marginals& b,
                              double epsilon, long max_iter, double tol,
                              const Vector* f0, const Vector* g0)
{
    const Index n = cost.rows();
    const Index m = cost.cols();
    require(a.size() == n && b.size() == m, "sinkhorn: marginal sizes do not match the cost");
    if (!(epsilon > 0.0)) throw std::invalid_argument("sinkhorn: epsilon must be positive");
    for (Index i = 0; i < n; ++i) {
        for (Index j = 0; j < m; ++j) {
            const double c = cost(i, j);
            if (std::isnan(c) || c == kNegInf) {
                throw SolverFailure("sinkhorn: cost contains NaN or -inf");
            }
        }
    }

    const detail::FlushDenormals ftz;
    const LogDomainState state(cost, a.weights(), b.weights(), epsilon);
    Vector f = (f0 && f0->size() == n && f0->allFinite()) ? *f0 : Vector::Zero(n);
    Vector g = (g0 && g0->size() == m && g0->allFinite()) ? *g0 : Vector::Zero(m);

    Matrix kernel;
    state.sweep(f, g);
    state.kernel(f, g, kernel);
    Vector u = Vector::Ones(n);
    Vector v = Vector::Ones(m);
    Vector kv(n);
    Vector ktu(m);
    Vector u_next(n);
    Vector v_next(m);

    auto absorb = [&]() {
        for (Index i = 0; i < n; ++i) {
            if (a[i] > 0.0) f[i] += epsilon * std::log(u[i]);
        }
        for (Index j = 0; j < m; ++j) {
            if (b[j] > 0.0) g[j] += epsilon * std::log(v[j]);
        }
        u.setOnes();
        v.setOnes();
    };

    SinkhornResult out;
    long it = 1;
    for (; it <= max_iter; ++it) {
        kv.noalias() = kernel * v;
        const double row_error = (u.cwiseProduct(kv) - a.weights()).lpNorm<1>();
        if (row_error <= tol) {
            out.converged = true;
            break;
        }
        for (Index i = 0; i < n; ++i) u_next[i] = a[i] > 0.0 ? a[i] / kv[i] : 0.0;
        bool ok = scaling_ok(u_next, a.weights());
        if (ok) {
            ktu.noalias() = kernel.transpose() * u_next;
            for (Index j = 0; j < m; ++j) v_next[j] = b[j] > 0.0 ? b[j] / ktu[j] : 0.0;
            ok = scaling_ok(v_next, b.weights());
        }
        if (!ok) {
            absorb();
            state.sweep(f, g);
            state.kernel(f, g, kernel);
            continue;
        }
        u.swap(u_next);
        v.swap(v_next);
    }

    // final plan in Gibbs form, so entries the scaled kernel would underflow are kept
    absorb();
    state.kernel(f, g, out.plan);
    for (Index i = 0; i < n; ++i) {
        if (a[i] == 0.0) out.plan.row(i).setZero();
    }
    for (Index j = 0; j < m; ++j) {
        if (b[j] == 0.0) out.plan.col(j).setZero();
    }
    out.f = std::move(f);
    out.g = std::move(g);
    out.iterations = std::min(it, max_iter);
    out.marginal_error = (out.plan.rowwise().sum() - a.weights()).lpNorm<1>() +
                         (out.plan.colwise().sum().transpose() - b.weights()).lpNorm<1>();
    if (!out.plan.allFinite()) throw SolverFailure("sinkhorn: non-finite transport plan");
    return out;
}

} // namespace gwot
