#pragma once

#include "gwot/rng.hpp"
#include "gwot/types.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace gwot {

using Adjacency = Eigen::Matrix<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Permutation = std::vector<Index>;

/// Cap on resampling a graph (or its noise) until it is connected.
inline constexpr int kMaxResample = 1000;

struct AlignmentInstance {
    Adjacency adjacency_1;
    Adjacency adjacency_2;
    Permutation perm_true;  // node i of graph 1 is node perm_true[i] of graph 2
    CostMatrix c1;
    CostMatrix c2;
    Marginals p;
    Marginals q;

    // generation parameters
    double p_edge = 0.0;
    double eta = 0.0;
    std::uint64_t seed = 0;

    Index size() const { return c1.size(); }
};

struct MetricsRecord {
    double loss = 0.0;         // gw_energy
    double sparsity = 0.0;     // fraction of entries <= zero threshold (exact zeros by default)
    double feasibility = 0.0;  // ||Pi 1 - p||_2 + ||Pi^T 1 - q||_2
    double accuracy = 0.0;     // fraction of rows mapped to their true partner
    double time_s = 0.0;
    long iters = 0;
    std::string status = "ok";
};

bool is_connected(const Adjacency& adj);

/// G(n, p_edge) conditioned on connectivity by resampling.
Adjacency gen_er_connected(Index n, double p_edge, Rng& rng);
Adjacency gen_er_connected(Index n, double p_edge, std::uint64_t seed);

/// P^T A P for the permutation matrix with ones at (i, perm[i]):
/// out(perm[i], perm[j]) = adj(i, j).
Adjacency permute_graph(const Adjacency& adj, const Permutation& perm);

Permutation inverse_permutation(const Permutation& perm);

/// Complements each unordered pair independently with probability eta,
/// redrawing the noise until the graph is connected.
Adjacency flip_noise(const Adjacency& adj, double eta, Rng& rng);
Adjacency flip_noise(const Adjacency& adj, double eta, std::uint64_t seed);

/// Hop-count all-pairs shortest paths divided by the largest distance.
CostMatrix apsp_normalized(const Adjacency& adj);

/// ER graph -> random permutation -> edge-flip noise -> normalized shortest
/// paths, all drawn from one generator seeded with `seed`.
AlignmentInstance make_instance(Index n, double p_edge, double eta, std::uint64_t seed);

/// Permutation-supported coupling with mass 1/n on (i, perm[i]).
Coupling permutation_coupling(const Permutation& perm);

/// Assignment maximizing sum_i pi(i, sigma(i)). Among optimal assignments
/// the lexicographically smallest one is returned.
Permutation hungarian_round(const Coupling& pi);

/// Fraction of i with pred[i] == truth[i].
double accuracy(const Permutation& pred, const Permutation& truth);

MetricsRecord evaluate(const Coupling& pi, const AlignmentInstance& instance, double elapsed_s,
                       long iters, const std::string& status, double zero_threshold = 0.0);

} // namespace gwot
