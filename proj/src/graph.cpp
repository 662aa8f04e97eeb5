#include "otge/graph.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

namespace otge {

namespace {

void require(bool cond, const std::string& message) {
  if (!cond) throw std::invalid_argument(message);
}

std::mt19937_64 make_rng(std::uint64_t seed) { return std::mt19937_64(seed); }

}  // namespace

Graph::Graph(Mat adjacency, std::optional<std::vector<int>> labels)
    : adjacency_(std::move(adjacency)), labels_(std::move(labels)) {
  const Eigen::Index n = adjacency_.rows();
  require(n > 0 && adjacency_.cols() == n, "adjacency must be square and nonempty");
  for (Eigen::Index i = 0; i < n; ++i) {
    require(adjacency_(i, i) == 0.0, "adjacency diagonal must be zero (node " +
                                         std::to_string(i) + ")");
    for (Eigen::Index j = i + 1; j < n; ++j) {
      require(adjacency_(i, j) >= 0.0, "adjacency must be nonnegative");
      require(adjacency_(i, j) == adjacency_(j, i),
              "adjacency must be symmetric (entries " + std::to_string(i) + "," +
                  std::to_string(j) + ")");
    }
  }
  if (labels_) {
    require(static_cast<Eigen::Index>(labels_->size()) == n,
            "labels must cover every node");
  }
  original_ids_.resize(static_cast<std::size_t>(n));
  std::iota(original_ids_.begin(), original_ids_.end(), 0);
}

Graph Graph::from_edge_list(const std::string& text) {
  std::vector<std::pair<int, int>> edges;
  std::unordered_map<std::int64_t, int> remap;
  std::vector<std::int64_t> ids;

  auto intern = [&](std::int64_t id) {
    auto [it, inserted] = remap.emplace(id, static_cast<int>(ids.size()));
    if (inserted) ids.push_back(id);
    return it->second;
  };

  std::istringstream lines(text);
  std::string line;
  int line_no = 0;
  while (std::getline(lines, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream tokens(line);
    std::int64_t u, v;
    std::string extra;
    if (!(tokens >> u >> v) || (tokens >> extra)) {
      throw std::invalid_argument("edge list parse error on line " +
                                  std::to_string(line_no) + ": '" + line + "'");
    }
    const int a = intern(u);  // sequenced: u is interned before v
    const int b = intern(v);
    edges.emplace_back(a, b);
  }
  require(!edges.empty(), "edge list is empty");

  const int n = static_cast<int>(ids.size());
  Mat adj = Mat::Zero(n, n);
  for (auto [a, b] : edges) {
    if (a == b) continue;  // self-loops dropped
    adj(a, b) = 1.0;
    adj(b, a) = 1.0;
  }
  Graph g(std::move(adj));
  g.original_ids_ = std::move(ids);
  return g;
}

void Graph::set_labels(std::vector<int> labels) {
  require(static_cast<int>(labels.size()) == n(), "labels must cover every node");
  labels_ = std::move(labels);
}

int Graph::index_of(std::int64_t original_id) const {
  for (std::size_t i = 0; i < original_ids_.size(); ++i) {
    if (original_ids_[i] == original_id) return static_cast<int>(i);
  }
  return -1;
}

std::int64_t Graph::edge_count() const {
  std::int64_t count = 0;
  for (Eigen::Index i = 0; i < adjacency_.rows(); ++i) {
    for (Eigen::Index j = i + 1; j < adjacency_.cols(); ++j) {
      if (adjacency_(i, j) != 0.0) ++count;
    }
  }
  return count;
}

bool Graph::is_connected() const {
  const int nn = n();
  std::vector<char> seen(static_cast<std::size_t>(nn), 0);
  std::vector<int> stack{0};
  seen[0] = 1;
  int reached = 1;
  while (!stack.empty()) {
    const int u = stack.back();
    stack.pop_back();
    for (int v = 0; v < nn; ++v) {
      if (!seen[static_cast<std::size_t>(v)] && adjacency_(u, v) != 0.0) {
        seen[static_cast<std::size_t>(v)] = 1;
        ++reached;
        stack.push_back(v);
      }
    }
  }
  return reached == nn;
}

std::string Graph::to_edge_list() const {
  std::ostringstream out;
  for (Eigen::Index i = 0; i < adjacency_.rows(); ++i) {
    for (Eigen::Index j = i + 1; j < adjacency_.cols(); ++j) {
      if (adjacency_(i, j) != 0.0) {
        out << original_ids_[static_cast<std::size_t>(i)] << ' '
            << original_ids_[static_cast<std::size_t>(j)] << '\n';
      }
    }
  }
  return out.str();
}

Vec degree_vector(const Graph& g) { return g.adjacency().rowwise().sum(); }

Mat markov_matrix(const Graph& g) {
  const Vec d = degree_vector(g);
  for (Eigen::Index i = 0; i < d.size(); ++i) {
    if (d(i) <= 0.0) {
      throw std::invalid_argument("markov_matrix: node " + std::to_string(i) +
                                  " is isolated");
    }
  }
  return d.cwiseInverse().asDiagonal() * g.adjacency();
}

DiffusionCost diffusion_cost(const Graph& g, int tau) {
  require(tau >= 1, "diffusion_cost: tau must be >= 1");
  require(g.is_connected(), "diffusion_cost: graph must be connected");

  DiffusionCost dc;
  dc.tau = tau;
  dc.markov = markov_matrix(g);

  const Vec d = degree_vector(g);
  dc.stationary = d / d.sum();

  Mat pt = dc.markov;
  for (int step = 1; step < tau; ++step) pt = pt * dc.markov;

  // D^2(i,j) = ||(P^tau(i,.) - P^tau(j,.)) / sqrt(pi)||^2, via the Gram matrix.
  Mat q = pt * dc.stationary.cwiseSqrt().cwiseInverse().asDiagonal();
  Mat gram = q * q.transpose();

  const Eigen::Index n = g.n();
  dc.cost.resize(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    dc.cost(i, i) = 0.0;
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double sq = gram(i, i) + gram(j, j) - 2.0 * gram(i, j);
      const double dist = std::sqrt(std::max(sq, 0.0));
      dc.cost(i, j) = dist;
      dc.cost(j, i) = dist;
    }
  }
  return dc;
}

Mat connectivity_descriptors(const Graph& g, int n) {
  require(n >= 1, "connectivity_descriptors: n must be >= 1");
  const double alpha = (n == 1) ? 0.0 : 1.0;
  const Eigen::Index nn = g.n();
  Mat at = g.adjacency() + alpha * Mat::Identity(nn, nn);
  Mat power = at;
  for (int step = 1; step < n; ++step) power = power * at;

  Mat z(nn, nn);
  for (Eigen::Index i = 0; i < nn; ++i) {
    const double total = power.row(i).sum();
    if (total <= 0.0) {
      throw std::invalid_argument("connectivity_descriptors: node " + std::to_string(i) +
                                  " has an empty " + std::to_string(n) + "-hop profile");
    }
    z.row(i) = power.row(i) / total;
  }
  return z;
}

Graph generate_sbm(const SbmParams& params, std::uint64_t seed) {
  require(!params.block_sizes.empty(), "generate_sbm: need at least one block");
  int n = 0;
  for (int b : params.block_sizes) {
    require(b >= 1, "generate_sbm: block sizes must be positive");
    n += b;
  }
  require(params.p_in >= 0.0 && params.p_in <= 1.0, "generate_sbm: p_in must be in [0,1]");
  require(params.q_out >= 0.0 && params.q_out <= 1.0, "generate_sbm: q_out must be in [0,1]");
  require(params.q_out <= params.p_in, "generate_sbm: expected q_out <= p_in");

  std::vector<int> block_of(static_cast<std::size_t>(n));
  int next = 0, block = 0;
  for (int size : params.block_sizes) {
    for (int i = 0; i < size; ++i) block_of[static_cast<std::size_t>(next++)] = block;
    ++block;
  }

  auto rng = make_rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Mat adj = Mat::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const double p = block_of[static_cast<std::size_t>(i)] ==
                               block_of[static_cast<std::size_t>(j)]
                           ? params.p_in
                           : params.q_out;
      if (unit(rng) < p) {
        adj(i, j) = 1.0;
        adj(j, i) = 1.0;
      }
    }
  }
  return Graph(std::move(adj), std::move(block_of));
}

Graph generate_sbm(int n_nodes, int n_blocks, double p_in, double q_out,
                   std::uint64_t seed) {
  require(n_blocks >= 1 && n_nodes >= n_blocks, "generate_sbm: bad block count");
  require(n_nodes % n_blocks == 0,
          "generate_sbm: " + std::to_string(n_nodes) + " nodes not divisible into " +
              std::to_string(n_blocks) + " equal blocks; pass explicit block sizes");
  SbmParams params;
  params.block_sizes.assign(static_cast<std::size_t>(n_blocks), n_nodes / n_blocks);
  params.p_in = p_in;
  params.q_out = q_out;
  return generate_sbm(params, seed);
}

Graph perturb_intra_probability(const SbmParams& tmpl, double p_prime,
                                std::uint64_t seed) {
  SbmParams perturbed = tmpl;
  perturbed.p_in = p_prime;
  return generate_sbm(perturbed, seed);
}

std::int64_t max_addable_edges(const Graph& g) {
  const auto n = static_cast<std::int64_t>(g.n());
  return n * n - static_cast<std::int64_t>(std::llround(g.adjacency().sum()));
}

Graph perturb_add_edges(const Graph& g, double ratio, std::uint64_t seed) {
  require(ratio > 0.0 && ratio <= 1.0, "perturb_add_edges: ratio must be in (0,1]");
  const auto to_add =
      static_cast<std::int64_t>(std::floor(ratio * static_cast<double>(max_addable_edges(g))));

  std::vector<std::pair<int, int>> absent;
  for (int i = 0; i < g.n(); ++i) {
    for (int j = i + 1; j < g.n(); ++j) {
      if (g.adjacency()(i, j) == 0.0) absent.emplace_back(i, j);
    }
  }
  if (to_add > static_cast<std::int64_t>(absent.size())) {
    throw std::invalid_argument("perturb_add_edges: " + std::to_string(to_add) +
                                " edges requested but only " +
                                std::to_string(absent.size()) + " pairs are absent");
  }

  auto rng = make_rng(seed);
  std::shuffle(absent.begin(), absent.end(), rng);

  Mat adj = g.adjacency();
  for (std::int64_t e = 0; e < to_add; ++e) {
    auto [i, j] = absent[static_cast<std::size_t>(e)];
    adj(i, j) = 1.0;
    adj(j, i) = 1.0;
  }
  return Graph(std::move(adj), g.labels());
}

DownsampleResult downsample(const Graph& g, double keep_ratio, std::uint64_t seed) {
  require(keep_ratio > 0.0 && keep_ratio <= 1.0,
          "downsample: keep_ratio must be in (0,1]");
  const int n = g.n();
  const int m = std::min<int>(n, static_cast<int>(std::floor(keep_ratio * n)));
  require(m >= 1, "downsample: keep_ratio keeps no nodes");

  auto rng = make_rng(seed);
  std::vector<int> all(static_cast<std::size_t>(n));
  std::iota(all.begin(), all.end(), 0);

  constexpr int kMaxRetries = 200;
  for (int attempt = 0; attempt < kMaxRetries; ++attempt) {
    std::shuffle(all.begin(), all.end(), rng);
    std::vector<int> kept(all.begin(), all.begin() + m);
    std::sort(kept.begin(), kept.end());

    Mat adj(m, m);
    for (int a = 0; a < m; ++a) {
      for (int b = 0; b < m; ++b) {
        adj(a, b) = g.adjacency()(kept[static_cast<std::size_t>(a)],
                                  kept[static_cast<std::size_t>(b)]);
      }
    }
    std::optional<std::vector<int>> labels;
    if (g.labels()) {
      labels.emplace();
      labels->reserve(kept.size());
      for (int idx : kept) labels->push_back((*g.labels())[static_cast<std::size_t>(idx)]);
    }
    Graph sub(std::move(adj), std::move(labels));
    if (sub.is_connected()) return {std::move(sub), std::move(kept)};
  }
  throw std::runtime_error("downsample: no connected subgraph found after " +
                           std::to_string(kMaxRetries) + " tries");
}

}  // namespace otge
