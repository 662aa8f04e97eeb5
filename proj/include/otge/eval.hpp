#pragma once

#include "otge/train.hpp"

#include <cstdint>
#include <utility>
#include <vector>

namespace otge {

std::vector<int> kmeans(const Mat& points, int k, std::uint64_t seed, int restarts = 10);

struct MutualInfo {
  double ami = 0.0;
  double nmi = 0.0;
};

/// Arithmetic-mean normalization for NMI; AMI adjusts by the expected
/// mutual information under the permutation model.
MutualInfo mutual_info_scores(const std::vector<int>& pred, const std::vector<int>& truth);

struct ClusteringReport {
  std::vector<int> assignments;
  double ami = 0.0;
  double nmi = 0.0;
};

ClusteringReport cluster_and_score(const Mat& points, int k, const std::vector<int>& truth,
                                   std::uint64_t seed, int restarts = 10);

/// One L2-regularized binary logistic model per class; prediction is
/// the argmax class score. The intercept is not penalized.
struct LogRegModel {
  Mat weights;               // n_classes x n_features
  Vec intercepts;            // n_classes
  std::vector<int> classes;  // class ids, ascending
  double l2_strength = 1.0;
};

LogRegModel logreg_ovr_fit(const Mat& features, const std::vector<int>& labels,
                           const std::vector<int>& train_idx, double l2_strength = 1.0);

std::vector<int> logreg_predict(const LogRegModel& model, const Mat& features);

struct ClassificationReport {
  std::vector<double> per_class_f1;  // one per class id in the model, percent
  double macro_f1 = 0.0;             // percent
  double accuracy = 0.0;             // percent
  double train_ratio = 0.0;
  std::uint64_t split_seed = 0;
};

/// Fits on train_idx, scores on test_idx. Classes with no true or
/// predicted members of the test set contribute an F1 of 0.
ClassificationReport logreg_evaluate(const Mat& features, const std::vector<int>& labels,
                                     const std::vector<int>& train_idx,
                                     const std::vector<int>& test_idx,
                                     double l2_strength = 1.0);

/// Per-class random split; roughly `ratio` of each class goes to train
/// (at least one member, and at least one held out when possible).
std::pair<std::vector<int>, std::vector<int>> stratified_split(
    const std::vector<int>& labels, double ratio, std::uint64_t seed);

struct SplitAverage {
  double macro_f1 = 0.0;
  double accuracy = 0.0;
};

/// Mean scores over `n_splits` stratified splits seeded seed, seed+1, ...
SplitAverage averaged_classification(const Mat& features, const std::vector<int>& labels,
                                     double train_ratio, int n_splits, std::uint64_t seed,
                                     double l2_strength = 1.0);

/// ||lambda_ref - lambda_new||_F / ||lambda_new||_F.
double stability_relative_change(const Mat& lambda_ref, const Mat& lambda_new);

/// Column order of `other` minimizing ||ref - other * P||_F, found
/// exhaustively (latent dimensions stay small). Returned vector maps
/// output column -> source column of `other`.
std::vector<int> best_column_permutation(const Mat& ref, const Mat& other);
Mat apply_column_permutation(const Mat& m, const std::vector<int>& perm);

struct SweepPoint {
  double epsilon = 0.0;
  double accuracy = 0.0;  // percent
  double macro_f1 = 0.0;  // percent
};

/// Trains once per epsilon (rho and everything else from `base`) and
/// classifies the learned coordinates. Cells run on worker threads.
std::vector<SweepPoint> epsilon_sensitivity_sweep(const Graph& g, const TrainConfig& base,
                                                  const std::vector<double>& epsilons,
                                                  double train_ratio = 0.8,
                                                  int n_splits = 10,
                                                  std::uint64_t split_seed = 9000);

}  // namespace otge
