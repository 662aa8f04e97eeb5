#include "otge/graph.hpp"

#include "otge/io.hpp"

#include <doctest.h>

#include <random>
#include <set>

using namespace otge;

namespace {

Graph path3() { return Graph::from_edge_list("0 1\n1 2\n"); }

Graph random_connected(int n, std::uint64_t seed) {
  // random spanning tree plus extra edges
  std::mt19937_64 rng(seed);
  Mat adj = Mat::Zero(n, n);
  for (int v = 1; v < n; ++v) {
    std::uniform_int_distribution<int> pick(0, v - 1);
    const int u = pick(rng);
    adj(u, v) = adj(v, u) = 1.0;
  }
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (unit(rng) < 0.2) adj(i, j) = adj(j, i) = 1.0;
    }
  }
  return Graph(std::move(adj));
}

}  // namespace

TEST_CASE("edge list parsing") {
  const Graph g = path3();
  CHECK(g.n() == 3);
  CHECK(g.edge_count() == 2);
  CHECK(g.adjacency()(0, 1) == 1.0);
  CHECK(g.adjacency()(0, 2) == 0.0);

  SUBCASE("duplicates collapse and ids remap by first appearance") {
    const Graph h = Graph::from_edge_list("1 2\n2 1\n");
    CHECK(h.n() == 2);
    CHECK(h.edge_count() == 1);
    CHECK(h.original_ids()[0] == 1);
    CHECK(h.original_ids()[1] == 2);
    CHECK(h.index_of(2) == 1);
  }

  SUBCASE("comments and blank lines are skipped") {
    const Graph h = Graph::from_edge_list("# header\n\n0 1\n  # indented comment\n1 2\n");
    CHECK(h.n() == 3);
  }

  SUBCASE("self-loops are dropped") {
    const Graph h = Graph::from_edge_list("0 0\n0 1\n");
    CHECK(h.edge_count() == 1);
    CHECK(h.adjacency()(0, 0) == 0.0);
  }

  SUBCASE("malformed lines carry the line number") {
    CHECK_THROWS_WITH_AS(Graph::from_edge_list("0 1\n2 x\n"),
                         doctest::Contains("line 2"), std::invalid_argument);
    CHECK_THROWS_WITH_AS(Graph::from_edge_list("0 1 2\n"), doctest::Contains("line 1"),
                         std::invalid_argument);
  }

  SUBCASE("empty input is an error") {
    CHECK_THROWS_AS(Graph::from_edge_list("# only comments\n"), std::invalid_argument);
  }
}

TEST_CASE("graph constructor validation") {
  Mat bad = Mat::Zero(2, 2);
  bad(0, 1) = 1.0;  // asymmetric
  CHECK_THROWS_AS(Graph{bad}, std::invalid_argument);

  Mat loop = Mat::Zero(2, 2);
  loop(0, 0) = 1.0;
  CHECK_THROWS_AS(Graph{loop}, std::invalid_argument);

  Mat weighted(2, 2);
  weighted << 0.0, 2.5, 2.5, 0.0;
  const Graph g{weighted};
  CHECK(g.adjacency()(1, 0) == 2.5);
}

TEST_CASE("karate data file") {
  Graph g = load_graph(std::string(OTGE_DATA_DIR) + "/karate.edges");
  CHECK(g.n() == 34);
  CHECK(g.edge_count() == 78);
  CHECK(degree_vector(g).sum() == doctest::Approx(156.0));

  load_labels(g, std::string(OTGE_DATA_DIR) + "/karate.labels");
  REQUIRE(g.labels().has_value());
  const auto& labels = *g.labels();
  CHECK(std::count(labels.begin(), labels.end(), 0) == 17);
  CHECK(std::count(labels.begin(), labels.end(), 1) == 17);
}

TEST_CASE("degree vector") {
  const Vec d = degree_vector(path3());
  CHECK(d(0) == 1.0);
  CHECK(d(1) == 2.0);
  CHECK(d(2) == 1.0);

  Mat isolated = Mat::Zero(1, 1);
  CHECK(degree_vector(Graph(isolated)).sum() == 0.0);
}

TEST_CASE("markov matrix") {
  const Mat p = markov_matrix(path3());
  CHECK(p(0, 1) == doctest::Approx(1.0));
  CHECK(p(1, 0) == doctest::Approx(0.5));
  CHECK(p(1, 2) == doctest::Approx(0.5));

  SUBCASE("complete graph K3") {
    const Graph k3 = Graph::from_edge_list("0 1\n0 2\n1 2\n");
    const Mat pk = markov_matrix(k3);
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) {
        CHECK(pk(i, j) == doctest::Approx(i == j ? 0.0 : 0.5));
      }
    }
  }

  SUBCASE("rows sum to one on random graphs") {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      const Mat p2 = markov_matrix(random_connected(17, seed));
      for (Eigen::Index i = 0; i < p2.rows(); ++i) {
        CHECK(std::abs(p2.row(i).sum() - 1.0) < 1e-12);
      }
    }
  }

  SUBCASE("isolated node is an error naming the node") {
    Mat adj = Mat::Zero(3, 3);
    adj(0, 1) = adj(1, 0) = 1.0;
    CHECK_THROWS_WITH_AS(markov_matrix(Graph(adj)), doctest::Contains("node 2"),
                         std::invalid_argument);
  }
}

TEST_CASE("diffusion cost") {
  SUBCASE("hand values on the path graph") {
    const DiffusionCost dc = diffusion_cost(path3(), 1);
    CHECK(dc.cost(0, 2) == doctest::Approx(0.0));  // identical transition rows
    CHECK(dc.cost(0, 1) == doctest::Approx(2.0));  // sqrt(1 + 2 + 1)
    CHECK(dc.stationary.sum() == doctest::Approx(1.0));
  }

  SUBCASE("zero diagonal, symmetry, nonnegativity") {
    for (std::uint64_t seed = 0; seed < 8; ++seed) {
      const Graph g = random_connected(23, seed + 100);
      const DiffusionCost dc = diffusion_cost(g, 1 + static_cast<int>(seed % 3));
      CHECK(dc.cost.diagonal().cwiseAbs().maxCoeff() == 0.0);
      CHECK((dc.cost - dc.cost.transpose()).cwiseAbs().maxCoeff() == 0.0);
      CHECK(dc.cost.minCoeff() >= 0.0);
    }
  }

  SUBCASE("matches the definition evaluated directly") {
    for (std::uint64_t seed = 0; seed < 6; ++seed) {
      const Graph g = random_connected(11, seed + 500);
      const int tau = 1 + static_cast<int>(seed % 3);
      const DiffusionCost dc = diffusion_cost(g, tau);

      const Mat p = markov_matrix(g);
      Mat pt = Mat::Identity(g.n(), g.n());
      for (int t = 0; t < tau; ++t) pt = pt * p;
      const Vec d = degree_vector(g);
      const Vec pi = d / d.sum();
      for (int i = 0; i < g.n(); ++i) {
        for (int j = 0; j < g.n(); ++j) {
          double sq = 0.0;
          for (int u = 0; u < g.n(); ++u) {
            const double diff = pt(i, u) - pt(j, u);
            sq += diff * diff / pi(u);
          }
          CHECK(dc.cost(i, j) == doctest::Approx(std::sqrt(sq)).epsilon(1e-10));
        }
      }
    }
  }

  SUBCASE("errors") {
    CHECK_THROWS_AS(diffusion_cost(path3(), 0), std::invalid_argument);
    Mat disconnected = Mat::Zero(4, 4);
    disconnected(0, 1) = disconnected(1, 0) = 1.0;
    disconnected(2, 3) = disconnected(3, 2) = 1.0;
    CHECK_THROWS_AS(diffusion_cost(Graph(disconnected), 1), std::invalid_argument);
  }
}

TEST_CASE("connectivity descriptors") {
  SUBCASE("n=1 normalizes adjacency rows, zero diagonal") {
    const Mat z = connectivity_descriptors(path3(), 1);
    CHECK(z(0, 1) == doctest::Approx(1.0));
    CHECK(z(1, 0) == doctest::Approx(0.5));
    CHECK(z.diagonal().cwiseAbs().maxCoeff() == 0.0);
  }

  SUBCASE("n=2 includes the self-loop") {
    const Mat z = connectivity_descriptors(path3(), 2);
    CHECK(z(0, 0) == doctest::Approx(0.4));
    CHECK(z(0, 1) == doctest::Approx(0.4));
    CHECK(z(0, 2) == doctest::Approx(0.2));
    CHECK(z.diagonal().minCoeff() > 0.0);
  }

  SUBCASE("rows sum to one; diagonal sign pattern") {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      const Graph g = random_connected(19, seed + 900);
      for (int n : {1, 2, 3}) {
        const Mat z = connectivity_descriptors(g, n);
        for (Eigen::Index i = 0; i < z.rows(); ++i) {
          CHECK(std::abs(z.row(i).sum() - 1.0) < 1e-12);
        }
        if (n == 1) {
          CHECK(z.diagonal().cwiseAbs().maxCoeff() == 0.0);
        } else {
          CHECK(z.diagonal().minCoeff() > 0.0);
        }
      }
    }
  }

  CHECK_THROWS_AS(connectivity_descriptors(path3(), 0), std::invalid_argument);
}

TEST_CASE("sbm generator") {
  SUBCASE("divisibility") {
    CHECK_THROWS_AS(generate_sbm(100, 3, 0.4, 0.01, 7), std::invalid_argument);
    const Graph g = generate_sbm(99, 3, 0.4, 0.01, 7);
    CHECK(g.n() == 99);
  }

  SUBCASE("degenerate probabilities give disjoint cliques") {
    const Graph g = generate_sbm(10, 2, 1.0, 0.0, 3);
    CHECK(g.edge_count() == 2 * 10);  // two K5s
    REQUIRE(g.labels().has_value());
    for (int i = 0; i < 5; ++i) {
      CHECK((*g.labels())[static_cast<std::size_t>(i)] == 0);
      CHECK((*g.labels())[static_cast<std::size_t>(i + 5)] == 1);
    }
    CHECK_FALSE(g.is_connected());
  }

  SUBCASE("expected edge count within three standard errors over 20 seeds") {
    SbmParams params{{34, 33, 33}, 0.4, 0.01};
    const double intra_pairs = 34.0 * 33 / 2 + 33.0 * 32 / 2 + 33.0 * 32 / 2;
    const double inter_pairs = 34.0 * 33 + 34.0 * 33 + 33.0 * 33;
    const double expected = params.p_in * intra_pairs + params.q_out * inter_pairs;
    const double variance = params.p_in * (1 - params.p_in) * intra_pairs +
                            params.q_out * (1 - params.q_out) * inter_pairs;
    double total = 0.0;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      total += static_cast<double>(generate_sbm(params, seed).edge_count());
    }
    const double mean = total / 20.0;
    const double se = std::sqrt(variance / 20.0);
    CHECK(std::abs(mean - expected) < 3.0 * se);
  }

  SUBCASE("deterministic per seed") {
    const Graph a = generate_sbm(30, 3, 0.5, 0.05, 11);
    const Graph b = generate_sbm(30, 3, 0.5, 0.05, 11);
    CHECK((a.adjacency() - b.adjacency()).norm() == 0.0);
  }

  SUBCASE("invalid probabilities") {
    CHECK_THROWS_AS(generate_sbm(10, 2, 1.5, 0.0, 1), std::invalid_argument);
    CHECK_THROWS_AS(generate_sbm(10, 2, 0.2, 0.5, 1), std::invalid_argument);
  }
}

TEST_CASE("perturb intra probability is a fresh seeded draw") {
  SbmParams params{{10, 10}, 0.6, 0.05};
  const Graph a = perturb_intra_probability(params, 0.3, 5);
  const Graph b = perturb_intra_probability(params, 0.3, 5);
  CHECK((a.adjacency() - b.adjacency()).norm() == 0.0);
  CHECK(a.n() == 20);
  REQUIRE(a.labels().has_value());

  // p' = p is distributionally the template itself
  const Graph c = perturb_intra_probability(params, params.p_in, 5);
  const Graph d = generate_sbm(params, 5);
  CHECK((c.adjacency() - d.adjacency()).norm() == 0.0);
}

TEST_CASE("perturb add edges") {
  const Graph g = random_connected(20, 77);
  const auto base_edges = g.edge_count();
  const std::int64_t capacity = max_addable_edges(g);
  CHECK(capacity == 20 * 20 - 2 * base_edges);

  SUBCASE("adds exactly the requested count, never removes") {
    const double ratio = 0.03;
    const Graph p = perturb_add_edges(g, ratio, 9);
    const auto added = static_cast<std::int64_t>(std::floor(ratio * capacity));
    CHECK(p.edge_count() == base_edges + added);
    for (int i = 0; i < g.n(); ++i) {
      for (int j = 0; j < g.n(); ++j) {
        if (g.adjacency()(i, j) != 0.0) CHECK(p.adjacency()(i, j) != 0.0);
      }
    }
  }

  SUBCASE("zero additions leave the graph unchanged") {
    const double tiny = 0.5 / static_cast<double>(capacity);
    const Graph p = perturb_add_edges(g, tiny, 9);
    CHECK((p.adjacency() - g.adjacency()).norm() == 0.0);
  }

  SUBCASE("requesting more than the absent pairs is an error") {
    // ratio 1.0 references N^2 - sum(A) ordered slots, more than the
    // C(N,2) - |E| actual absent pairs
    CHECK_THROWS_AS(perturb_add_edges(g, 1.0, 9), std::invalid_argument);
  }

  SUBCASE("deterministic per seed") {
    const Graph a = perturb_add_edges(g, 0.02, 13);
    const Graph b = perturb_add_edges(g, 0.02, 13);
    CHECK((a.adjacency() - b.adjacency()).norm() == 0.0);
  }
}

TEST_CASE("downsample") {
  SUBCASE("keep everything is the identity") {
    const Graph g = random_connected(12, 5);
    const DownsampleResult r = downsample(g, 1.0, 3);
    CHECK(r.subgraph.n() == 12);
    CHECK((r.subgraph.adjacency() - g.adjacency()).norm() == 0.0);
    for (int i = 0; i < 12; ++i) CHECK(r.kept[static_cast<std::size_t>(i)] == i);
  }

  SUBCASE("two of three path nodes") {
    // keeping {0,1} of 0-1-2 is the single edge; {0,2} is disconnected,
    // so retries must land on a connected pair
    const Graph g = path3();
    const DownsampleResult r = downsample(g, 0.67, 1);
    CHECK(r.subgraph.n() == 2);
    CHECK(r.subgraph.edge_count() == 1);
    CHECK(r.subgraph.is_connected());
  }

  SUBCASE("labels and connectivity preserved") {
    Graph g = generate_sbm(40, 2, 0.5, 0.1, 21);
    const DownsampleResult r = downsample(g, 0.5, 8);
    CHECK(r.subgraph.n() == 20);
    CHECK(r.subgraph.is_connected());
    REQUIRE(r.subgraph.labels().has_value());
    for (std::size_t i = 0; i < r.kept.size(); ++i) {
      CHECK((*r.subgraph.labels())[i] ==
            (*g.labels())[static_cast<std::size_t>(r.kept[i])]);
    }
  }

  SUBCASE("deterministic per seed") {
    const Graph g = random_connected(15, 2);
    const DownsampleResult a = downsample(g, 0.6, 4);
    const DownsampleResult b = downsample(g, 0.6, 4);
    CHECK(a.kept == b.kept);
  }
}
