#pragma once

#include "otge/ot.hpp"

#include <vector>

namespace otge {

/// Trainable state: encoder weights E and decoder logits Delta, both
/// N x S and tied to one graph.
struct ModelParams {
  Mat encoder_weights;
  Mat decoder_logits;

  Eigen::Index n() const { return encoder_weights.rows(); }
  Eigen::Index s() const { return encoder_weights.cols(); }
  void check_shapes(Eigen::Index n_nodes) const;
};

/// Everything a finished run exposes: the learned pattern columns, the
/// per-node simplex coordinates, the barycentric reconstructions of the
/// connectivity descriptors, and the loss history.
struct EmbeddingResult {
  Mat patterns;         // N x S, columns sum to 1
  Mat coordinates;      // N x S, rows sum to 1
  Mat reconstructions;  // N x N
  double final_loss = 0.0;
  std::vector<double> loss_trace;  // one value per epoch
};

/// patterns = softmax over the node axis of descriptors * weights, so
/// each of the S columns is a histogram on the graph.
Tensor encode(const Tensor& encoder_weights, const Mat& descriptors);

struct DecodeOut {
  Tensor reconstruction;  // J x N
  Tensor coordinates;     // J x S, row-softmax of the logits
  Tensor logit_rows;      // the logits that were decoded (a leaf in decode_rows)
};

/// Reconstructs one descriptor row per logit row as a mass-relaxed
/// barycenter of the pattern columns.
DecodeOut decode(const GibbsKernel& kernel, const Tensor& patterns,
                 const Tensor& logit_rows, int iterations);

/// decode() on the given subset of nodes; validates the indices.
DecodeOut decode_rows(const GibbsKernel& kernel, const Tensor& patterns,
                      const Mat& all_logits, const std::vector<int>& rows,
                      int iterations, Tape* tape);

/// ||target - recon||_F^2 / ||target||_F^2 over the given rows.
Tensor reconstruction_loss(const Mat& target_rows, const Tensor& reconstruction);

/// Inference pass over the whole graph, decoding `chunk` rows at a time.
EmbeddingResult evaluate_embedding(const GibbsKernel& kernel, const Mat& descriptors,
                                   const ModelParams& params, int iterations,
                                   int chunk);

/// Rows of `train_patterns` placed at `kept` positions of an
/// n_full-row zero matrix; the padded columns stay valid histograms.
Mat upsample_patterns(const Mat& train_patterns, const std::vector<int>& kept,
                      int n_full);

}  // namespace otge
