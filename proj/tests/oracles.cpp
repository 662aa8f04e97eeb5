#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>

namespace oracles {

using otge::Mat;
using otge::Vec;

namespace {

struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(int n) : parent(static_cast<std::size_t>(n)) {
    for (int i = 0; i < n; ++i) parent[static_cast<std::size_t>(i)] = i;
  }
  int find(int x) {
    while (parent[static_cast<std::size_t>(x)] != x) {
      parent[static_cast<std::size_t>(x)] =
          parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
      x = parent[static_cast<std::size_t>(x)];
    }
    return x;
  }
  bool unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    parent[static_cast<std::size_t>(a)] = b;
    return true;
  }
};

// Flows on a spanning tree of the bipartite supply/demand graph are
// uniquely determined; returns false if any flow would be negative.
bool tree_flow_cost(const std::vector<std::pair<int, int>>& edges, const Vec& supply,
                    const Vec& demand, const Mat& cost, double& total) {
  const int n = static_cast<int>(supply.size());
  const int vertices = 2 * n;
  std::vector<double> residual(static_cast<std::size_t>(vertices));
  for (int i = 0; i < n; ++i) residual[static_cast<std::size_t>(i)] = supply(i);
  for (int j = 0; j < n; ++j) residual[static_cast<std::size_t>(n + j)] = demand(j);

  std::vector<std::vector<int>> incident(static_cast<std::size_t>(vertices));
  for (std::size_t e = 0; e < edges.size(); ++e) {
    incident[static_cast<std::size_t>(edges[e].first)].push_back(static_cast<int>(e));
    incident[static_cast<std::size_t>(n + edges[e].second)].push_back(static_cast<int>(e));
  }
  std::vector<int> degree(static_cast<std::size_t>(vertices));
  for (int v = 0; v < vertices; ++v) {
    degree[static_cast<std::size_t>(v)] = static_cast<int>(incident[static_cast<std::size_t>(v)].size());
  }
  std::vector<char> edge_done(edges.size(), 0);
  std::vector<int> leaves;
  for (int v = 0; v < vertices; ++v) {
    if (degree[static_cast<std::size_t>(v)] == 1) leaves.push_back(v);
  }

  total = 0.0;
  std::size_t remaining = edges.size();
  while (remaining > 0) {
    if (leaves.empty()) return false;  // cannot happen on a spanning tree
    const int v = leaves.back();
    leaves.pop_back();
    int edge = -1;
    for (int e : incident[static_cast<std::size_t>(v)]) {
      if (!edge_done[static_cast<std::size_t>(e)]) {
        edge = e;
        break;
      }
    }
    if (edge < 0) continue;  // drained from the other endpoint already
    const auto [row, col] = edges[static_cast<std::size_t>(edge)];
    const int other = (v < n) ? n + col : row;
    const double flow = residual[static_cast<std::size_t>(v)];
    if (flow < -1e-12) return false;
    total += std::max(flow, 0.0) * cost(row, col);
    residual[static_cast<std::size_t>(v)] = 0.0;
    residual[static_cast<std::size_t>(other)] -= flow;
    edge_done[static_cast<std::size_t>(edge)] = 1;
    --remaining;
    if (--degree[static_cast<std::size_t>(other)] == 1) leaves.push_back(other);
    degree[static_cast<std::size_t>(v)] = 0;
  }
  for (double r : residual) {
    if (std::abs(r) > 1e-9) return false;  // balance must close on a spanning tree
  }
  return true;
}

}  // namespace

double lp_transport_min_cost(const Mat& cost, const Vec& row_marginal,
                             const Vec& col_marginal) {
  const int n = static_cast<int>(row_marginal.size());
  if (cost.rows() != n || cost.cols() != n || col_marginal.size() != n) {
    throw std::invalid_argument("lp oracle: shape mismatch");
  }
  if (std::abs(row_marginal.sum() - col_marginal.sum()) > 1e-9) {
    throw std::invalid_argument("lp oracle: marginal masses differ");
  }

  const int n_edges = n * n;
  const int tree_size = 2 * n - 1;
  std::vector<int> pick(static_cast<std::size_t>(tree_size));
  for (int i = 0; i < tree_size; ++i) pick[static_cast<std::size_t>(i)] = i;

  double best = std::numeric_limits<double>::infinity();
  std::vector<std::pair<int, int>> edges(static_cast<std::size_t>(tree_size));

  while (true) {
    // Spanning-tree check on 2n vertices.
    UnionFind uf(2 * n);
    bool acyclic = true;
    for (int i = 0; i < tree_size && acyclic; ++i) {
      const int e = pick[static_cast<std::size_t>(i)];
      const int row = e / n, col = e % n;
      edges[static_cast<std::size_t>(i)] = {row, col};
      acyclic = uf.unite(row, n + col);
    }
    if (acyclic) {
      double total = 0.0;
      if (tree_flow_cost(edges, row_marginal, col_marginal, cost, total)) {
        best = std::min(best, total);
      }
    }

    // next combination
    int i = tree_size - 1;
    while (i >= 0 && pick[static_cast<std::size_t>(i)] == n_edges - tree_size + i) --i;
    if (i < 0) break;
    ++pick[static_cast<std::size_t>(i)];
    for (int j = i + 1; j < tree_size; ++j) {
      pick[static_cast<std::size_t>(j)] = pick[static_cast<std::size_t>(j - 1)] + 1;
    }
  }
  return best;
}

MutualInfoOracle mutual_info(const std::vector<int>& pred, const std::vector<int>& truth) {
  if (pred.empty() || pred.size() != truth.size()) {
    throw std::invalid_argument("mi oracle: bad partitions");
  }
  const int n = static_cast<int>(pred.size());

  auto compact = [](const std::vector<int>& raw) {
    std::map<int, int> ids;
    for (int v : raw) ids.emplace(v, 0);
    int next = 0;
    for (auto& [k, v] : ids) v = next++;
    std::vector<int> out(raw.size());
    for (std::size_t i = 0; i < raw.size(); ++i) out[i] = ids.at(raw[i]);
    return std::pair{out, next};
  };
  auto [a, r] = compact(pred);
  auto [b, c] = compact(truth);

  std::vector<std::vector<int>> table(static_cast<std::size_t>(r),
                                      std::vector<int>(static_cast<std::size_t>(c), 0));
  std::vector<int> row_sum(static_cast<std::size_t>(r), 0);
  std::vector<int> col_sum(static_cast<std::size_t>(c), 0);
  for (int i = 0; i < n; ++i) {
    ++table[static_cast<std::size_t>(a[static_cast<std::size_t>(i)])]
           [static_cast<std::size_t>(b[static_cast<std::size_t>(i)])];
    ++row_sum[static_cast<std::size_t>(a[static_cast<std::size_t>(i)])];
    ++col_sum[static_cast<std::size_t>(b[static_cast<std::size_t>(i)])];
  }

  const double dn = n;
  MutualInfoOracle out;
  for (int i = 0; i < r; ++i) {
    for (int j = 0; j < c; ++j) {
      const int nij = table[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
      if (nij > 0) {
        out.mi += (nij / dn) * std::log(dn * nij /
                                        (static_cast<double>(row_sum[static_cast<std::size_t>(i)]) *
                                         col_sum[static_cast<std::size_t>(j)]));
      }
    }
  }
  for (int i = 0; i < r; ++i) {
    const double p = row_sum[static_cast<std::size_t>(i)] / dn;
    out.h_pred -= p * std::log(p);
  }
  for (int j = 0; j < c; ++j) {
    const double p = col_sum[static_cast<std::size_t>(j)] / dn;
    out.h_truth -= p * std::log(p);
  }

  // Exact binomials: values stay below 2^53 for the sizes used here.
  auto choose = [](int m, int k) -> double {
    if (k < 0 || k > m) return 0.0;
    double value = 1.0;
    for (int i = 1; i <= k; ++i) value = value * (m - k + i) / i;
    return std::round(value);
  };
  for (int i = 0; i < r; ++i) {
    for (int j = 0; j < c; ++j) {
      const int ai = row_sum[static_cast<std::size_t>(i)];
      const int bj = col_sum[static_cast<std::size_t>(j)];
      const int lo = std::max(1, ai + bj - n);
      const int hi = std::min(ai, bj);
      for (int nij = lo; nij <= hi; ++nij) {
        const double prob = choose(ai, nij) * choose(n - ai, bj - nij) / choose(n, bj);
        out.emi += prob * (nij / dn) * std::log(dn * nij / (static_cast<double>(ai) * bj));
      }
    }
  }

  if (r == 1 && c == 1) {
    out.ami = 1.0;
    out.nmi = 1.0;
    return out;
  }
  const double mean_h = 0.5 * (out.h_pred + out.h_truth);
  out.nmi = mean_h > 0.0 ? out.mi / mean_h : 0.0;
  const double denom = mean_h - out.emi;
  out.ami = std::abs(denom) < 1e-15 ? 0.0 : (out.mi - out.emi) / denom;
  return out;
}

std::vector<std::vector<int>> partitions_up_to(int n, int max_blocks) {
  std::vector<std::vector<int>> out;
  std::vector<int> labels(static_cast<std::size_t>(n), 0);
  std::function<void(int, int)> rec = [&](int i, int used) {
    if (i == n) {
      out.push_back(labels);
      return;
    }
    const int limit = std::min(used + 1, max_blocks);
    for (int b = 0; b < limit; ++b) {
      labels[static_cast<std::size_t>(i)] = b;
      rec(i + 1, std::max(used, b + 1));
    }
  };
  rec(0, 0);
  return out;
}

Mat finite_difference(const std::function<double(const Mat&)>& f, const Mat& at,
                      double step) {
  Mat grad(at.rows(), at.cols());
  Mat x = at;
  for (Eigen::Index i = 0; i < at.rows(); ++i) {
    for (Eigen::Index j = 0; j < at.cols(); ++j) {
      const double keep = x(i, j);
      x(i, j) = keep + step;
      const double up = f(x);
      x(i, j) = keep - step;
      const double down = f(x);
      x(i, j) = keep;
      grad(i, j) = (up - down) / (2.0 * step);
    }
  }
  return grad;
}

double relative_error(const Mat& a, const Mat& b) {
  return (a - b).norm() / std::max(b.norm(), 1e-300);
}

}  // namespace oracles
