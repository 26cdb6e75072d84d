#include "gwot/network_simplex.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

namespace gwot {

namespace {

// Basis of the transportation problem as a spanning tree over n row nodes
// followed by m column nodes; each basic cell (i, j) is the edge i -- n + j.
class TransportBasis {
public:
    TransportBasis(Index n, Index m) : n_(n), m_(m), adj_(static_cast<size_t>(n + m)) {}

    void add(Index cell)
    {
        adj_[static_cast<size_t>(row(cell))].push_back(cell);
        adj_[static_cast<size_t>(n_ + col(cell))].push_back(cell);
    }

    void remove(Index cell)
    {
        erase_from(adj_[static_cast<size_t>(row(cell))], cell);
        erase_from(adj_[static_cast<size_t>(n_ + col(cell))], cell);
    }

    Index row(Index cell) const { return cell / m_; }
    Index col(Index cell) const { return cell % m_; }

    // u_i + v_j = cost_ij on every basic cell, anchored at u_0 = 0.
    void potentials(const Matrix& cost, Vector& u, Vector& v)
    {
        stack_.clear();
        seen_.assign(static_cast<size_t>(n_ + m_), 0);
        u.setZero(n_);
        v.setZero(m_);
        stack_.push_back(0);
        seen_[0] = 1;
        while (!stack_.empty()) {
            const Index node = stack_.back();
            stack_.pop_back();
            for (Index cell : adj_[static_cast<size_t>(node)]) {
                const Index i = row(cell);
                const Index j = col(cell);
                const Index other = node < n_ ? n_ + j : i;
                if (seen_[static_cast<size_t>(other)]) continue;
                seen_[static_cast<size_t>(other)] = 1;
                if (node < n_) {
                    v[j] = cost(i, j) - u[i];
                } else {
                    u[i] = cost(i, j) - v[j];
                }
                stack_.push_back(other);
            }
        }
    }

    // Tree path from row node p to column node n + q, returned as the
    // sequence of cells starting at the column end.
    const std::vector<Index>& path(Index p, Index q)
    {
        const size_t total = static_cast<size_t>(n_ + m_);
        parent_cell_.assign(total, -1);
        parent_node_.assign(total, -1);
        seen_.assign(total, 0);
        stack_.clear();
        stack_.push_back(p);
        seen_[static_cast<size_t>(p)] = 1;
        const Index target = n_ + q;
        while (!stack_.empty()) {
            const Index node = stack_.back();
            stack_.pop_back();
            if (node == target) break;
            for (Index cell : adj_[static_cast<size_t>(node)]) {
                const Index other = node < n_ ? n_ + col(cell) : row(cell);
                if (seen_[static_cast<size_t>(other)]) continue;
                seen_[static_cast<size_t>(other)] = 1;
                parent_cell_[static_cast<size_t>(other)] = cell;
                parent_node_[static_cast<size_t>(other)] = node;
                stack_.push_back(other);
            }
        }
        path_.clear();
        for (Index node = target; node != p; node = parent_node_[static_cast<size_t>(node)]) {
            path_.push_back(parent_cell_[static_cast<size_t>(node)]);
        }
        return path_;
    }

private:
    static void erase_from(std::vector<Index>& list, Index cell)
    {
        list.erase(std::find(list.begin(), list.end(), cell));
    }

    Index n_;
    Index m_;
    std::vector<std::vector<Index>> adj_;
    std::vector<Index> stack_;
    std::vector<char> seen_;
    std::vector<Index> parent_cell_;
    std::vector<Index> parent_node_;
    std::vector<Index> path_;
};

} // namespace

OtPlan ot_network_simplex(const Matrix& cost, const Vector& a, const Vector& b,
                          const NetworkSimplexOptions& opts)
{
    const Index n = cost.rows();
    const Index m = cost.cols();
    require(n > 0 && m > 0, "ot_network_simplex: empty cost matrix");
    require(a.size() == n && b.size() == m, "ot_network_simplex: marginal sizes do not match the cost");
    require(cost.allFinite(), "ot_network_simplex: cost must be finite");
    require((a.array() >= 0.0).all() && (b.array() >= 0.0).all(),
            "ot_network_simplex: marginals must be nonnegative");
    if (std::abs(a.sum() - b.sum()) > 1e-10) {
        throw std::invalid_argument("ot_network_simplex: total masses differ (" +
                                    std::to_string(a.sum()) + " vs " + std::to_string(b.sum()) + ")");
    }

    const long max_pivots = opts.max_pivots > 0 ? opts.max_pivots : 10L * n * m;
    const double scale = cost.cwiseAbs().maxCoeff();
    const double tol = 1e-12 * scale;

    Matrix flow = Matrix::Zero(n, m);
    TransportBasis basis(n, m);

    // northwest corner
    {
        Vector supply = a;
        Vector demand = b;
        Index i = 0;
        Index j = 0;
        for (Index placed = 0; placed < n + m - 1; ++placed) {
            const double t = std::max(0.0, std::min(supply[i], demand[j]));
            flow(i, j) = t;
            supply[i] -= t;
            demand[j] -= t;
            basis.add(i * m + j);
            if (i == n - 1) {
                ++j;
            } else if (j == m - 1) {
                ++i;
            } else if (supply[i] <= demand[j]) {
                ++i;
            } else {
                ++j;
            }
        }
    }

    Vector u;
    Vector v;
    long pivots = 0;
    long degenerate_run = 0;
    for (;;) {
        basis.potentials(cost, u, v);

        const bool bland = degenerate_run >= opts.bland_after_degenerate;
        Index entering = -1;
        double best = -tol;
        for (Index i = 0; i < n && !(bland && entering >= 0); ++i) {
            const double ui = u[i];
            for (Index j = 0; j < m; ++j) {
                const double reduced = cost(i, j) - ui - v[j];
                if (reduced < best) {
                    entering = i * m + j;
                    if (bland) break;
                    best = reduced;
                }
            }
        }
        if (entering < 0) break;
        if (pivots >= max_pivots) {
            throw NetworkSimplexError("ot_network_simplex: pivot cap " + std::to_string(max_pivots) +
                                      " reached on a " + std::to_string(n) + "x" + std::to_string(m) +
                                      " problem (most negative reduced cost " + std::to_string(best) + ")");
        }

        const Index p = entering / m;
        const Index q = entering % m;
        const auto& cycle = basis.path(p, q);

        // cells alternate -, +, -, ... starting at the column end
        double theta = std::numeric_limits<double>::infinity();
        Index leaving = -1;
        for (size_t k = 0; k < cycle.size(); k += 2) {
            const Index cell = cycle[k];
            const double x = flow(cell / m, cell % m);
            if (x < theta || (x == theta && cell < leaving)) {
                theta = x;
                leaving = cell;
            }
        }

        flow(p, q) += theta;
        for (size_t k = 0; k < cycle.size(); ++k) {
            const Index cell = cycle[k];
            flow(cell / m, cell % m) += (k % 2 == 0) ? -theta : theta;
        }
        flow(leaving / m, leaving % m) = 0.0;
        basis.remove(leaving);
        basis.add(entering);

        degenerate_run = theta == 0.0 ? degenerate_run + 1 : 0;
        ++pivots;
    }

    OtPlan out;
    out.objective = cost.cwiseProduct(flow).sum();
    out.plan = std::move(flow);
    out.basis_size = n + m - 1;
    out.u = std::move(u);
    out.v = std::move(v);
    out.pivots = pivots;
    return out;
}

} // namespace gwot
