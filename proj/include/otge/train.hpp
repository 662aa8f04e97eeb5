#pragma once

#include "otge/model.hpp"

#include <cstdint>

namespace otge {

/// Run parameters. Field names mirror the CLI flags and the run-config
/// file keys.
struct TrainConfig {
  int n = 1;                    // descriptor hop count
  int s = 2;                    // latent dimension
  int tau = 1;                  // diffusion steps
  double epsilon = 0.03;        // entropy regularization
  double rho = 0.05;            // mass relaxation
  int sinkhorn_iterations = 500;
  double learning_rate = 0.01;
  int batch_size = 16;
  int epochs = 300;
  std::uint64_t seed = 0;

  // Stop when no epoch in the last `early_stop_patience` improved the
  // best loss by at least `early_stop_improvement`. Patience 0 disables.
  double early_stop_improvement = 1e-6;
  int early_stop_patience = 20;

  void validate(int n_nodes) const;
};

struct FitResult {
  ModelParams params;
  EmbeddingResult embedding;
};

/// Minimizes the normalized reconstruction loss over E and Delta with
/// plain SGD on shuffled node batches. Deterministic for a fixed seed.
FitResult fit(const Graph& g, const TrainConfig& cfg);

/// Transfer mode: the pattern matrix is frozen and only the decoder
/// logits are (re)trained against g_new's descriptors. Returns the new
/// coordinates.
Mat fit_coordinates(const Graph& g_new, const Mat& frozen_patterns,
                    const TrainConfig& cfg);

/// Uniform initialization on [-0.5/sqrt(S), 0.5/sqrt(S)], E then Delta,
/// row-major order. Exposed so transfer runs draw identically.
ModelParams init_params(int n_nodes, int s, std::uint64_t seed);

}  // namespace otge
