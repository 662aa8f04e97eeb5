#include "otge/train.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <limits>
#include <random>
#include <sstream>
#include <stdexcept>

namespace otge {

namespace {

void require(bool cond, const std::string& message) {
  if (!cond) throw std::invalid_argument(message);
}

std::string config_echo(const TrainConfig& c) {
  std::ostringstream out;
  out << "n=" << c.n << " s=" << c.s << " tau=" << c.tau << " epsilon=" << c.epsilon
      << " rho=" << c.rho << " sinkhorn_iterations=" << c.sinkhorn_iterations
      << " learning_rate=" << c.learning_rate << " batch_size=" << c.batch_size
      << " epochs=" << c.epochs << " seed=" << c.seed;
  return out.str();
}

struct SgdDriver {
  const Mat& descriptors;
  const TrainConfig& cfg;

  // One pass of epochs x ceil(N/J) steps. step() receives the batch row
  // indices and returns that step's loss.
  template <typename Step>
  std::vector<double> run(Step step) const {
    const int n = static_cast<int>(descriptors.rows());
    std::mt19937_64 shuffle_rng(cfg.seed + 1);
    std::vector<int> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);

    std::vector<double> trace;
    trace.reserve(static_cast<std::size_t>(cfg.epochs));
    double best = std::numeric_limits<double>::infinity();
    int stalled = 0;
    long step_index = 0;

    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
      std::shuffle(order.begin(), order.end(), shuffle_rng);
      double epoch_loss = 0.0;
      int steps = 0;
      for (int start = 0; start < n; start += cfg.batch_size) {
        const int count = std::min(cfg.batch_size, n - start);
        std::vector<int> batch(order.begin() + start, order.begin() + start + count);
        const double loss = step(batch);
        if (!std::isfinite(loss)) {
          throw std::runtime_error("training diverged: non-finite loss at step " +
                                   std::to_string(step_index) + " (" + config_echo(cfg) +
                                   ")");
        }
        epoch_loss += loss;
        ++steps;
        ++step_index;
      }
      trace.push_back(epoch_loss / steps);

      if (cfg.early_stop_patience > 0) {
        if (trace.back() < best - cfg.early_stop_improvement) {
          best = trace.back();
          stalled = 0;
        } else if (++stalled >= cfg.early_stop_patience) {
          break;
        }
      } else {
        best = std::min(best, trace.back());
      }
    }
    return trace;
  }
};

}  // namespace

void TrainConfig::validate(int n_nodes) const {
  require(n >= 1, "config: n must be >= 1");
  require(s >= 1, "config: s must be >= 1");
  require(tau >= 1, "config: tau must be >= 1");
  require(epsilon >= 0.005, "config: epsilon below the 0.005 numerical floor");
  require(rho > 0.0, "config: rho must be > 0");
  require(sinkhorn_iterations >= 1, "config: sinkhorn_iterations must be >= 1");
  require(learning_rate > 0.0, "config: learning_rate must be > 0");
  require(epochs >= 0, "config: epochs must be >= 0");
  require(batch_size >= 1, "config: batch_size must be >= 1");
  require(batch_size <= n_nodes, "config: batch_size " + std::to_string(batch_size) +
                                     " exceeds node count " + std::to_string(n_nodes));
  require(s < n_nodes, "config: latent dimension must be below the node count");
}

ModelParams init_params(int n_nodes, int s, std::uint64_t seed) {
  const double bound = 0.5 / std::sqrt(static_cast<double>(s));
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uniform(-bound, bound);
  ModelParams params;
  params.encoder_weights.resize(n_nodes, s);
  params.decoder_logits.resize(n_nodes, s);
  for (Eigen::Index i = 0; i < n_nodes; ++i) {
    for (Eigen::Index j = 0; j < s; ++j) params.encoder_weights(i, j) = uniform(rng);
  }
  for (Eigen::Index i = 0; i < n_nodes; ++i) {
    for (Eigen::Index j = 0; j < s; ++j) params.decoder_logits(i, j) = uniform(rng);
  }
  return params;
}

FitResult fit(const Graph& g, const TrainConfig& cfg) {
  cfg.validate(g.n());
  require(g.is_connected(), "fit: graph must be connected");

  const DiffusionCost dc = diffusion_cost(g, cfg.tau);
  const Mat descriptors = connectivity_descriptors(g, cfg.n);
  const GibbsKernel kernel(dc, cfg.epsilon, cfg.rho);

  ModelParams params = init_params(g.n(), cfg.s, cfg.seed);

  SgdDriver driver{descriptors, cfg};
  auto trace = driver.run([&](const std::vector<int>& batch) {
    Tape tape;
    Tensor weights = tape.leaf(params.encoder_weights);
    Tensor patterns = encode(weights, descriptors);
    DecodeOut dec = decode_rows(kernel, patterns, params.decoder_logits, batch,
                                cfg.sinkhorn_iterations, &tape);
    Mat targets(static_cast<Eigen::Index>(batch.size()), descriptors.cols());
    for (std::size_t r = 0; r < batch.size(); ++r) {
      targets.row(static_cast<Eigen::Index>(r)) = descriptors.row(batch[r]);
    }
    Tensor loss = reconstruction_loss(targets, dec.reconstruction);
    const double loss_value = loss.scalar();

    GradientMap grads = tape.backward(loss);
    if (auto it = grads.find(weights.node()); it != grads.end()) {
      params.encoder_weights -= cfg.learning_rate * it->second;
    }
    if (auto it = grads.find(dec.logit_rows.node()); it != grads.end()) {
      for (std::size_t r = 0; r < batch.size(); ++r) {
        params.decoder_logits.row(batch[r]) -=
            cfg.learning_rate * it->second.row(static_cast<Eigen::Index>(r));
      }
    }
    return loss_value;
  });

  FitResult result;
  result.embedding = evaluate_embedding(kernel, descriptors, params,
                                        cfg.sinkhorn_iterations, cfg.batch_size);
  result.embedding.loss_trace = std::move(trace);
  result.params = std::move(params);
  return result;
}

Mat fit_coordinates(const Graph& g_new, const Mat& frozen_patterns,
                    const TrainConfig& cfg) {
  cfg.validate(g_new.n());
  require(g_new.is_connected(), "fit_coordinates: graph must be connected");
  require(frozen_patterns.rows() == g_new.n(),
          "fit_coordinates: patterns have " + std::to_string(frozen_patterns.rows()) +
              " rows for a graph of " + std::to_string(g_new.n()) + " nodes");
  require((frozen_patterns.array() >= 0.0).all(),
          "fit_coordinates: negative pattern entry");

  const DiffusionCost dc = diffusion_cost(g_new, cfg.tau);
  const Mat descriptors = connectivity_descriptors(g_new, cfg.n);
  const GibbsKernel kernel(dc, cfg.epsilon, cfg.rho);
  const Tensor patterns(frozen_patterns);

  Mat logits = init_params(g_new.n(), static_cast<int>(frozen_patterns.cols()), cfg.seed)
                   .decoder_logits;

  SgdDriver driver{descriptors, cfg};
  driver.run([&](const std::vector<int>& batch) {
    Tape tape;
    DecodeOut dec = decode_rows(kernel, patterns, logits, batch,
                                cfg.sinkhorn_iterations, &tape);
    Mat targets(static_cast<Eigen::Index>(batch.size()), descriptors.cols());
    for (std::size_t r = 0; r < batch.size(); ++r) {
      targets.row(static_cast<Eigen::Index>(r)) = descriptors.row(batch[r]);
    }
    Tensor loss = reconstruction_loss(targets, dec.reconstruction);
    const double loss_value = loss.scalar();

    GradientMap grads = tape.backward(loss);
    if (auto it = grads.find(dec.logit_rows.node()); it != grads.end()) {
      for (std::size_t r = 0; r < batch.size(); ++r) {
        logits.row(batch[r]) -= cfg.learning_rate * it->second.row(static_cast<Eigen::Index>(r));
      }
    }
    return loss_value;
  });

  return softmax_rows_value(logits);
}

}  // namespace otge
