#include "otge/model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace otge {

namespace {

void require(bool cond, const std::string& message) {
  if (!cond) throw std::invalid_argument(message);
}

}  // namespace

void ModelParams::check_shapes(Eigen::Index n_nodes) const {
  require(encoder_weights.rows() == n_nodes,
          "model: encoder weights have " + std::to_string(encoder_weights.rows()) +
              " rows for a graph of " + std::to_string(n_nodes) + " nodes");
  require(decoder_logits.rows() == encoder_weights.rows() &&
              decoder_logits.cols() == encoder_weights.cols(),
          "model: encoder and decoder shapes differ");
  require(encoder_weights.cols() >= 1, "model: latent dimension must be >= 1");
}

Tensor encode(const Tensor& encoder_weights, const Mat& descriptors) {
  require(descriptors.rows() == descriptors.cols(),
          "encode: descriptors must be square");
  require(encoder_weights.rows() == descriptors.rows(),
          "encode: weights are " + shape_string(encoder_weights) + " but descriptors are " +
              std::to_string(descriptors.rows()) + "x" + std::to_string(descriptors.cols()));
  for (Eigen::Index i = 0; i < descriptors.rows(); ++i) {
    require(std::abs(descriptors.row(i).sum() - 1.0) <= 1e-6,
            "encode: descriptor row " + std::to_string(i) + " is not a histogram");
  }
  return softmax_cols(matmul(Tensor(descriptors), encoder_weights));
}

DecodeOut decode(const GibbsKernel& kernel, const Tensor& patterns,
                 const Tensor& logit_rows, int iterations) {
  DecodeOut out;
  out.logit_rows = logit_rows;
  out.coordinates = softmax_rows(logit_rows);
  out.reconstruction =
      barycenter_batched(kernel, patterns, out.coordinates, iterations).result;
  return out;
}

DecodeOut decode_rows(const GibbsKernel& kernel, const Tensor& patterns,
                      const Mat& all_logits, const std::vector<int>& rows,
                      int iterations, Tape* tape) {
  require(!rows.empty(), "decode_rows: empty batch");
  Mat logits(static_cast<Eigen::Index>(rows.size()), all_logits.cols());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    require(rows[r] >= 0 && rows[r] < all_logits.rows(),
            "decode_rows: node index " + std::to_string(rows[r]) + " out of range");
    logits.row(static_cast<Eigen::Index>(r)) = all_logits.row(rows[r]);
  }
  Tensor logit_rows = tape ? tape->leaf(std::move(logits)) : Tensor(std::move(logits));
  return decode(kernel, patterns, logit_rows, iterations);
}

Tensor reconstruction_loss(const Mat& target_rows, const Tensor& reconstruction) {
  require(target_rows.rows() == reconstruction.rows() &&
              target_rows.cols() == reconstruction.cols(),
          "loss: target is " + std::to_string(target_rows.rows()) + "x" +
              std::to_string(target_rows.cols()) + " but reconstruction is " +
              shape_string(reconstruction));
  const double denom = target_rows.squaredNorm();
  require(denom > 0.0, "loss: zero-norm target");
  Tensor diff = sub(Tensor(target_rows), reconstruction);
  return mul_scalar(sum_all(mul(diff, diff)), 1.0 / denom);
}

EmbeddingResult evaluate_embedding(const GibbsKernel& kernel, const Mat& descriptors,
                                   const ModelParams& params, int iterations,
                                   int chunk) {
  params.check_shapes(descriptors.rows());
  require(chunk >= 1, "evaluate_embedding: chunk must be >= 1");
  const Eigen::Index n = descriptors.rows();

  EmbeddingResult result;
  result.patterns = encode(Tensor(params.encoder_weights), descriptors).value();
  result.coordinates = softmax_rows_value(params.decoder_logits);

  result.reconstructions.resize(n, n);
  const Tensor patterns(result.patterns);
  for (Eigen::Index start = 0; start < n; start += chunk) {
    const Eigen::Index count = std::min<Eigen::Index>(chunk, n - start);
    Tensor logits(Mat(params.decoder_logits.middleRows(start, count)));
    DecodeOut dec = decode(kernel, patterns, logits, iterations);
    result.reconstructions.middleRows(start, count) = dec.reconstruction.value();
  }
  result.final_loss =
      reconstruction_loss(descriptors, Tensor(result.reconstructions)).scalar();
  return result;
}

Mat upsample_patterns(const Mat& train_patterns, const std::vector<int>& kept,
                      int n_full) {
  require(static_cast<Eigen::Index>(kept.size()) == train_patterns.rows(),
          "upsample_patterns: index list does not match pattern rows");
  Mat full = Mat::Zero(n_full, train_patterns.cols());
  for (std::size_t r = 0; r < kept.size(); ++r) {
    require(kept[r] >= 0 && kept[r] < n_full,
            "upsample_patterns: kept index " + std::to_string(kept[r]) + " out of range");
    full.row(kept[r]) = train_patterns.row(static_cast<Eigen::Index>(r));
  }
  return full;
}

}  // namespace otge
