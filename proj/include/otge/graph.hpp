#pragma once

#include "otge/tensor.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace otge {

/// Undirected graph held as a dense symmetric adjacency matrix with a
/// zero diagonal. Immutable after construction. Edge-list ingestion is
/// unweighted; the in-memory constructor accepts nonnegative weights.
class Graph {
 public:
  /// Validates: square, symmetric, nonnegative, zero diagonal.
  explicit Graph(Mat adjacency, std::optional<std::vector<int>> labels = std::nullopt);

  /// Parses "u v" pairs, one per line; lines starting with '#' are
  /// skipped. Node ids are remapped to 0..N-1 in first-appearance
  /// order; duplicate edges collapse and self-loops are dropped.
  static Graph from_edge_list(const std::string& text);

  int n() const { return static_cast<int>(adjacency_.rows()); }
  const Mat& adjacency() const { return adjacency_; }

  const std::optional<std::vector<int>>& labels() const { return labels_; }
  void set_labels(std::vector<int> labels);

  /// index -> id in the source edge list (identity for generated graphs).
  const std::vector<std::int64_t>& original_ids() const { return original_ids_; }
  /// Index of an original id, or -1.
  int index_of(std::int64_t original_id) const;

  /// Number of undirected edges (nonzero upper-triangle entries).
  std::int64_t edge_count() const;
  bool is_connected() const;

  /// Edge-list text in the same format from_edge_list reads.
  std::string to_edge_list() const;

 private:
  Mat adjacency_;
  std::optional<std::vector<int>> labels_;
  std::vector<std::int64_t> original_ids_;
};

/// d(i) = sum_j A(i, j).
Vec degree_vector(const Graph& g);

/// P(i, j) = A(i, j) / d(i). Errors on isolated nodes.
Mat markov_matrix(const Graph& g);

/// Random-walk quantities backing the transport ground cost: the
/// tau-step diffusion distance between transition profiles, weighted by
/// the stationary distribution.
struct DiffusionCost {
  int tau = 1;
  Mat cost;        // D_tau, symmetric, zero diagonal
  Mat markov;      // P
  Vec stationary;  // pi, sums to 1
};

/// cost(i,j) = sqrt( sum_u (P^tau(i,u) - P^tau(j,u))^2 / pi(u) ).
/// Requires a connected graph and tau >= 1.
DiffusionCost diffusion_cost(const Graph& g, int tau);

/// Row-normalized (A + alpha*I)^n with alpha = 0 for n == 1 and 1
/// otherwise. Row i is the n-hop connectivity profile of node i.
Mat connectivity_descriptors(const Graph& g, int n);

/// Planted-partition parameters. Block ids become node labels.
struct SbmParams {
  std::vector<int> block_sizes;
  double p_in = 0.0;
  double q_out = 0.0;
};

Graph generate_sbm(const SbmParams& params, std::uint64_t seed);
/// Equal-split convenience; n_nodes must be divisible by n_blocks.
Graph generate_sbm(int n_nodes, int n_blocks, double p_in, double q_out, std::uint64_t seed);

/// Fresh draw from the template's block structure with the
/// intra-community probability replaced by p_prime.
Graph perturb_intra_probability(const SbmParams& tmpl, double p_prime, std::uint64_t seed);

/// Adds floor(ratio * (N^2 - sum(A))) uniformly random absent edges.
/// The capacity convention counts ordered adjacency entries, so sum(A)
/// is twice the undirected edge count.
Graph perturb_add_edges(const Graph& g, double ratio, std::uint64_t seed);

/// Maximum number of edges the add-edge perturbation can reference.
std::int64_t max_addable_edges(const Graph& g);

struct DownsampleResult {
  Graph subgraph;
  std::vector<int> kept;  // subgraph index -> index in the source graph
};

/// Induced subgraph on floor(keep_ratio * N) uniformly random nodes,
/// resampled (bounded retries) until connected. keep_ratio in (0, 1].
DownsampleResult downsample(const Graph& g, double keep_ratio, std::uint64_t seed);

}  // namespace otge
