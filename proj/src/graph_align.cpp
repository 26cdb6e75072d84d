#include "gwot/graph_align.hpp"

#include "gwot/gw_core.hpp"

#include <algorithm>
#include <deque>
#include <limits>
#include <stdexcept>

namespace gwot {

namespace {

Adjacency sample_er(Index n, double p_edge, Rng& rng)
{
    Adjacency adj = Adjacency::Zero(n, n);
    for (Index i = 0; i < n; ++i) {
        for (Index j = i + 1; j < n; ++j) {
            if (rng.uniform() < p_edge) {
                adj(i, j) = 1;
                adj(j, i) = 1;
            }
        }
    }
    return adj;
}

// Hop distances from `source`; -1 marks unreachable nodes.
std::vector<long> bfs(const Adjacency& adj, Index source)
{
    const Index n = adj.rows();
    std::vector<long> dist(static_cast<size_t>(n), -1);
    std::deque<Index> queue{source};
    dist[static_cast<size_t>(source)] = 0;
    while (!queue.empty()) {
        const Index node = queue.front();
        queue.pop_front();
        for (Index other = 0; other < n; ++other) {
            if (adj(node, other) && dist[static_cast<size_t>(other)] < 0) {
                dist[static_cast<size_t>(other)] = dist[static_cast<size_t>(node)] + 1;
                queue.push_back(other);
            }
        }
    }
    return dist;
}

void check_permutation(const Permutation& perm, Index n)
{
    require(static_cast<Index>(perm.size()) == n, "permutation has the wrong length");
    std::vector<char> hit(static_cast<size_t>(n), 0);
    for (Index x : perm) {
        if (x < 0 || x >= n || hit[static_cast<size_t>(x)]) {
            throw std::invalid_argument("permutation is not a bijection on 0..n-1");
        }
        hit[static_cast<size_t>(x)] = 1;
    }
}

// Minimum-cost assignment (square cost) with shortest augmenting paths.
// Returns the row -> column assignment and dual potentials u, v with
// cost(i, j) - u_i - v_j >= 0, tight on the assignment.
struct Assignment {
    std::vector<Index> col_of_row;
    std::vector<double> u;
    std::vector<double> v;
};

Assignment solve_assignment(const Matrix& cost)
{
    const Index n = cost.rows();
    const double inf = std::numeric_limits<double>::infinity();
    // 1-based with column 0 as the virtual root
    std::vector<double> u(static_cast<size_t>(n + 1), 0.0);
    std::vector<double> v(static_cast<size_t>(n + 1), 0.0);
    std::vector<Index> row_of_col(static_cast<size_t>(n + 1), 0);
    std::vector<Index> way(static_cast<size_t>(n + 1), 0);

    for (Index i = 1; i <= n; ++i) {
        row_of_col[0] = i;
        Index j0 = 0;
        std::vector<double> minv(static_cast<size_t>(n + 1), inf);
        std::vector<char> used(static_cast<size_t>(n + 1), 0);
        do {
            used[static_cast<size_t>(j0)] = 1;
            const Index i0 = row_of_col[static_cast<size_t>(j0)];
            double delta = inf;
            Index j1 = 0;
            for (Index j = 1; j <= n; ++j) {
                if (used[static_cast<size_t>(j)]) continue;
                const double cur = cost(i0 - 1, j - 1) - u[static_cast<size_t>(i0)] - v[static_cast<size_t>(j)];
                if (cur < minv[static_cast<size_t>(j)]) {
                    minv[static_cast<size_t>(j)] = cur;
                    way[static_cast<size_t>(j)] = j0;
                }
                if (minv[static_cast<size_t>(j)] < delta) {
                    delta = minv[static_cast<size_t>(j)];
                    j1 = j;
                }
            }
            for (Index j = 0; j <= n; ++j) {
                if (used[static_cast<size_t>(j)]) {
                    u[static_cast<size_t>(row_of_col[static_cast<size_t>(j)])] += delta;
                    v[static_cast<size_t>(j)] -= delta;
                } else {
                    minv[static_cast<size_t>(j)] -= delta;
                }
            }
            j0 = j1;
        } while (row_of_col[static_cast<size_t>(j0)] != 0);
        do {
            const Index j1 = way[static_cast<size_t>(j0)];
            row_of_col[static_cast<size_t>(j0)] = row_of_col[static_cast<size_t>(j1)];
            j0 = j1;
        } while (j0 != 0);
    }

    Assignment out;
    out.col_of_row.assign(static_cast<size_t>(n), -1);
    for (Index j = 1; j <= n; ++j) {
        out.col_of_row[static_cast<size_t>(row_of_col[static_cast<size_t>(j)] - 1)] = j - 1;
    }
    out.u.assign(u.begin() + 1, u.end());
    out.v.assign(v.begin() + 1, v.end());
    return out;
}

// Every perfect matching inside the tight subgraph of an optimal dual is
// optimal. Walk rows in order and give each the smallest tight column that
// still admits a perfect matching of the remaining rows.
Permutation lexicographic_tight_matching(const std::vector<std::vector<char>>& tight, Permutation match)
{
    const Index n = static_cast<Index>(match.size());
    Permutation row_of(static_cast<size_t>(n));
    for (Index i = 0; i < n; ++i) row_of[static_cast<size_t>(match[static_cast<size_t>(i)])] = i;
    std::vector<char> fixed_col(static_cast<size_t>(n), 0);

    std::vector<Index> parent_row(static_cast<size_t>(n));
    std::vector<char> seen_col(static_cast<size_t>(n));

    for (Index i = 0; i < n; ++i) {
        for (Index j = 0; j < n; ++j) {
            if (fixed_col[static_cast<size_t>(j)] || !tight[static_cast<size_t>(i)][static_cast<size_t>(j)]) continue;
            const Index jj = match[static_cast<size_t>(i)];
            if (jj == j) {
                fixed_col[static_cast<size_t>(j)] = 1;
                break;
            }
            // move i to j; the displaced row needs a path to the freed column jj
            const Index displaced = row_of[static_cast<size_t>(j)];
            std::fill(seen_col.begin(), seen_col.end(), 0);
            std::deque<Index> queue{displaced};
            Index reached = -1;
            while (!queue.empty() && reached < 0) {
                const Index r = queue.front();
                queue.pop_front();
                for (Index c = 0; c < n; ++c) {
                    if (c == j || fixed_col[static_cast<size_t>(c)] || seen_col[static_cast<size_t>(c)] ||
                        !tight[static_cast<size_t>(r)][static_cast<size_t>(c)]) {
                        continue;
                    }
                    seen_col[static_cast<size_t>(c)] = 1;
                    parent_row[static_cast<size_t>(c)] = r;
                    if (c == jj) {
                        reached = c;
                        break;
                    }
                    queue.push_back(row_of[static_cast<size_t>(c)]);
                }
            }
            if (reached < 0) continue;

            // augment along the alternating path ending at jj
            Index c = reached;
            for (;;) {
                const Index r = parent_row[static_cast<size_t>(c)];
                const Index prev = match[static_cast<size_t>(r)];
                match[static_cast<size_t>(r)] = c;
                row_of[static_cast<size_t>(c)] = r;
                if (r == displaced) break;
                c = prev;
            }
            match[static_cast<size_t>(i)] = j;
            row_of[static_cast<size_t>(j)] = i;
            fixed_col[static_cast<size_t>(j)] = 1;
            break;
        }
    }
    return match;
}

} // namespace

bool is_connected(const Adjacency& adj)
{
    if (adj.rows() == 0) return true;
    const auto dist = bfs(adj, 0);
    return std::all_of(dist.begin(), dist.end(), [](long d) { return d >= 0; });
}

Adjacency gen_er_connected(Index n, double p_edge, Rng& rng)
{
    if (n < 2) throw std::invalid_argument("gen_er_connected: n must be at least 2");
    if (!(p_edge > 0.0 && p_edge < 1.0)) throw std::invalid_argument("gen_er_connected: p_edge must lie in (0, 1)");
    for (int attempt = 0; attempt < kMaxResample; ++attempt) {
        Adjacency adj = sample_er(n, p_edge, rng);
        if (is_connected(adj)) return adj;
    }
    throw std::runtime_error("gen_er_connected: no connected graph after " + std::to_string(kMaxResample) +
                             " samples (n = " + std::to_string(n) + ", p_edge = " + std::to_string(p_edge) + ")");
}

Adjacency gen_er_connected(Index n, double p_edge, std::uint64_t seed)
{
    Rng rng(seed);
    return gen_er_connected(n, p_edge, rng);
}

Adjacency permute_graph(const Adjacency& adj, const Permutation& perm)
{
    const Index n = adj.rows();
    check_permutation(perm, n);
    Adjacency out(n, n);
    for (Index i = 0; i < n; ++i) {
        for (Index j = 0; j < n; ++j) {
            out(perm[static_cast<size_t>(i)], perm[static_cast<size_t>(j)]) = adj(i, j);
        }
    }
    return out;
}

Permutation inverse_permutation(const Permutation& perm)
{
    const Index n = static_cast<Index>(perm.size());
    check_permutation(perm, n);
    Permutation inv(perm.size());
    for (Index i = 0; i < n; ++i) inv[static_cast<size_t>(perm[static_cast<size_t>(i)])] = i;
    return inv;
}

Adjacency flip_noise(const Adjacency& adj, double eta, Rng& rng)
{
    if (!(eta >= 0.0 && eta < 1.0)) throw std::invalid_argument("flip_noise: eta must lie in [0, 1)");
    const Index n = adj.rows();
    for (int attempt = 0; attempt < kMaxResample; ++attempt) {
        Adjacency out = adj;
        for (Index i = 0; i < n; ++i) {
            for (Index j = i + 1; j < n; ++j) {
                if (rng.uniform() < eta) {
                    const std::uint8_t flipped = out(i, j) ? 0 : 1;
                    out(i, j) = flipped;
                    out(j, i) = flipped;
                }
            }
        }
        if (is_connected(out)) return out;
    }
    throw std::runtime_error("flip_noise: no connected noisy graph after " + std::to_string(kMaxResample) +
                             " draws (eta = " + std::to_string(eta) + ")");
}

Adjacency flip_noise(const Adjacency& adj, double eta, std::uint64_t seed)
{
    Rng rng(seed);
    return flip_noise(adj, eta, rng);
}

CostMatrix apsp_normalized(const Adjacency& adj)
{
    const Index n = adj.rows();
    require(n >= 2 && adj.cols() == n, "apsp_normalized: need a square adjacency with n >= 2");
    Matrix dist(n, n);
    for (Index s = 0; s < n; ++s) {
        const auto d = bfs(adj, s);
        for (Index t = 0; t < n; ++t) {
            if (d[static_cast<size_t>(t)] < 0) {
                throw std::invalid_argument("apsp_normalized: graph is disconnected (" + std::to_string(s) +
                                            " cannot reach " + std::to_string(t) + ")");
            }
            dist(s, t) = static_cast<double>(d[static_cast<size_t>(t)]);
        }
    }
    dist /= dist.maxCoeff();
    return CostMatrix(std::move(dist));
}

AlignmentInstance make_instance(Index n, double p_edge, double eta, std::uint64_t seed)
{
    Rng rng(seed);
    AlignmentInstance inst;
    inst.adjacency_1 = gen_er_connected(n, p_edge, rng);
    inst.perm_true = rng.permutation<Index>(n);
    inst.adjacency_2 = flip_noise(permute_graph(inst.adjacency_1, inst.perm_true), eta, rng);
    inst.c1 = apsp_normalized(inst.adjacency_1);
    inst.c2 = apsp_normalized(inst.adjacency_2);
    inst.p = Marginals::uniform(n);
    inst.q = Marginals::uniform(n);
    inst.p_edge = p_edge;
    inst.eta = eta;
    inst.seed = seed;
    return inst;
}

Coupling permutation_coupling(const Permutation& perm)
{
    const Index n = static_cast<Index>(perm.size());
    check_permutation(perm, n);
    Coupling out = Coupling::Zero(n, n);
    for (Index i = 0; i < n; ++i) out(i, perm[static_cast<size_t>(i)]) = 1.0 / static_cast<double>(n);
    return out;
}

Permutation hungarian_round(const Coupling& pi)
{
    const Index n = pi.rows();
    require(pi.cols() == n, "hungarian_round: coupling must be square");
    if (n == 0) return {};
    const Matrix cost = -pi;
    const Assignment sol = solve_assignment(cost);

    const double tol = 1e-12 * std::max(1e-300, pi.cwiseAbs().maxCoeff());
    std::vector<std::vector<char>> tight(static_cast<size_t>(n), std::vector<char>(static_cast<size_t>(n), 0));
    for (Index i = 0; i < n; ++i) {
        for (Index j = 0; j < n; ++j) {
            const double reduced = cost(i, j) - sol.u[static_cast<size_t>(i)] - sol.v[static_cast<size_t>(j)];
            tight[static_cast<size_t>(i)][static_cast<size_t>(j)] = reduced <= tol;
        }
    }
    return lexicographic_tight_matching(tight, sol.col_of_row);
}

double accuracy(const Permutation& pred, const Permutation& truth)
{
    require(pred.size() == truth.size() && !pred.empty(), "accuracy: permutations differ in length");
    long hits = 0;
    for (size_t i = 0; i < pred.size(); ++i) hits += pred[i] == truth[i];
    return static_cast<double>(hits) / static_cast<double>(pred.size());
}

MetricsRecord evaluate(const Coupling& pi, const AlignmentInstance& instance, double elapsed_s,
                       long iters, const std::string& status, double zero_threshold)
{
    const Index n = instance.size();
    require(pi.rows() == n && pi.cols() == n, "evaluate: coupling does not match the instance");
    MetricsRecord rec;
    rec.loss = gw_energy(pi, instance.c1, instance.c2, instance.p, instance.q);
    const auto zeros = (pi.array().abs() <= zero_threshold).count();
    rec.sparsity = static_cast<double>(zeros) / static_cast<double>(pi.size());
    rec.feasibility = (pi.rowwise().sum() - instance.p.weights()).norm() +
                      (pi.colwise().sum().transpose() - instance.q.weights()).norm();
    rec.accuracy = accuracy(hungarian_round(pi), instance.perm_true);
    rec.time_s = elapsed_s;
    rec.iters = iters;
    rec.status = status;
    return rec;
}

} // namespace gwot
