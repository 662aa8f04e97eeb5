#include "otge/train.hpp"

#include "otge/eval.hpp"

#include <doctest.h>

using namespace otge;

namespace {

// two K4 cliques joined by a single edge
Graph two_cliques() {
  Mat adj = Mat::Zero(8, 8);
  auto link = [&](int a, int b) { adj(a, b) = adj(b, a) = 1.0; };
  for (int i = 0; i < 4; ++i) {
    for (int j = i + 1; j < 4; ++j) {
      link(i, j);
      link(i + 4, j + 4);
    }
  }
  link(3, 4);
  return Graph{adj};
}

TrainConfig small_config() {
  TrainConfig cfg;
  cfg.n = 1;
  cfg.s = 2;
  cfg.tau = 1;
  cfg.epsilon = 0.1;
  cfg.rho = 0.1;
  cfg.sinkhorn_iterations = 60;
  cfg.learning_rate = 0.2;
  cfg.batch_size = 4;
  cfg.epochs = 120;
  cfg.seed = 7;
  cfg.early_stop_patience = 0;
  return cfg;
}

}  // namespace

TEST_CASE("config validation") {
  TrainConfig cfg = small_config();
  cfg.validate(8);

  TrainConfig bad = cfg;
  bad.epsilon = 0.004;
  CHECK_THROWS_AS(bad.validate(8), std::invalid_argument);

  bad = cfg;
  bad.batch_size = 9;
  CHECK_THROWS_AS(bad.validate(8), std::invalid_argument);

  bad = cfg;
  bad.learning_rate = 0.0;
  CHECK_THROWS_AS(bad.validate(8), std::invalid_argument);

  bad = cfg;
  bad.epochs = -1;
  CHECK_THROWS_AS(bad.validate(8), std::invalid_argument);

  bad = cfg;
  bad.s = 8;
  CHECK_THROWS_AS(bad.validate(8), std::invalid_argument);
}

TEST_CASE("initialization is deterministic and bounded") {
  const ModelParams a = init_params(10, 4, 99);
  const ModelParams b = init_params(10, 4, 99);
  CHECK((a.encoder_weights - b.encoder_weights).norm() == 0.0);
  CHECK((a.decoder_logits - b.decoder_logits).norm() == 0.0);
  const double bound = 0.5 / std::sqrt(4.0);
  CHECK(a.encoder_weights.cwiseAbs().maxCoeff() <= bound);
  CHECK(a.decoder_logits.cwiseAbs().maxCoeff() <= bound);

  const ModelParams c = init_params(10, 4, 100);
  CHECK((a.encoder_weights - c.encoder_weights).norm() != 0.0);
}

TEST_CASE("zero epochs return the initialization unchanged") {
  const Graph g = two_cliques();
  TrainConfig cfg = small_config();
  cfg.epochs = 0;
  const FitResult run = fit(g, cfg);
  const ModelParams init = init_params(g.n(), cfg.s, cfg.seed);
  CHECK((run.params.encoder_weights - init.encoder_weights).norm() == 0.0);
  CHECK((run.params.decoder_logits - init.decoder_logits).norm() == 0.0);
  CHECK(run.embedding.loss_trace.empty());
}

TEST_CASE("training reduces the loss and is bitwise deterministic") {
  const Graph g = two_cliques();
  const TrainConfig cfg = small_config();

  const FitResult a = fit(g, cfg);
  REQUIRE(a.embedding.loss_trace.size() == 120);
  CHECK(a.embedding.loss_trace.back() < 0.8 * a.embedding.loss_trace.front());
  for (double v : a.embedding.loss_trace) CHECK(std::isfinite(v));

  const FitResult b = fit(g, cfg);
  REQUIRE(b.embedding.loss_trace.size() == a.embedding.loss_trace.size());
  for (std::size_t i = 0; i < a.embedding.loss_trace.size(); ++i) {
    CHECK(a.embedding.loss_trace[i] == b.embedding.loss_trace[i]);
  }
  CHECK((a.params.encoder_weights - b.params.encoder_weights).norm() == 0.0);
}

TEST_CASE("early stop cuts the trace short") {
  const Graph g = two_cliques();
  TrainConfig cfg = small_config();
  cfg.epochs = 400;
  cfg.early_stop_patience = 10;
  cfg.early_stop_improvement = 0.5;  // absurdly demanding, stops quickly
  const FitResult run = fit(g, cfg);
  CHECK(run.embedding.loss_trace.size() < 50);
}

TEST_CASE("fit rejects disconnected graphs") {
  Mat adj = Mat::Zero(4, 4);
  adj(0, 1) = adj(1, 0) = 1.0;
  adj(2, 3) = adj(3, 2) = 1.0;
  CHECK_THROWS_AS(fit(Graph{adj}, small_config()), std::invalid_argument);
}

TEST_CASE("embedding result invariants") {
  const Graph g = two_cliques();
  const FitResult run = fit(g, small_config());
  for (Eigen::Index j = 0; j < 2; ++j) {
    CHECK(run.embedding.patterns.col(j).sum() == doctest::Approx(1.0).epsilon(1e-10));
  }
  for (Eigen::Index i = 0; i < 8; ++i) {
    CHECK(run.embedding.coordinates.row(i).sum() == doctest::Approx(1.0).epsilon(1e-10));
  }
  CHECK(run.embedding.reconstructions.minCoeff() >= 0.0);
  CHECK(std::isfinite(run.embedding.final_loss));
}

TEST_CASE("coordinate-only transfer") {
  const Graph g = two_cliques();
  TrainConfig cfg = small_config();
  cfg.epochs = 250;
  const FitResult source = fit(g, cfg);

  SUBCASE("self-transfer recovers similar coordinates") {
    const Mat transferred = fit_coordinates(g, source.embedding.patterns, cfg);
    const double change =
        stability_relative_change(source.embedding.coordinates, transferred);
    CHECK(change <= 0.05);
  }

  SUBCASE("dimension mismatch is an error") {
    Mat wrong = source.embedding.patterns.topRows(6);
    CHECK_THROWS_AS(fit_coordinates(g, wrong, cfg), std::invalid_argument);
  }
}
