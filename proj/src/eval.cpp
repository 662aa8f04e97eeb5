#include "otge/eval.hpp"

#include "otge/threads.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <stdexcept>

namespace otge {

namespace {

void require(bool cond, const std::string& message) {
  if (!cond) throw std::invalid_argument(message);
}

double lfact(int n) { return std::lgamma(static_cast<double>(n) + 1.0); }

std::vector<int> compact_labels(const std::vector<int>& raw, int& n_classes) {
  std::map<int, int> ids;
  for (int v : raw) ids.emplace(v, 0);
  int next = 0;
  for (auto& [key, value] : ids) value = next++;
  n_classes = next;
  std::vector<int> out(raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i) out[i] = ids.at(raw[i]);
  return out;
}

}  // namespace

std::vector<int> kmeans(const Mat& points, int k, std::uint64_t seed, int restarts) {
  const auto n = points.rows();
  require(k >= 1, "kmeans: k must be >= 1");
  require(k <= n, "kmeans: k exceeds the number of points");
  require(restarts >= 1, "kmeans: restarts must be >= 1");

  std::mt19937_64 rng(seed);
  std::vector<int> best_assign(static_cast<std::size_t>(n), 0);
  double best_inertia = std::numeric_limits<double>::infinity();

  for (int attempt = 0; attempt < restarts; ++attempt) {
    // k-means++ seeding
    Mat centers(k, points.cols());
    std::uniform_int_distribution<Eigen::Index> pick(0, n - 1);
    centers.row(0) = points.row(pick(rng));
    Vec dist2 = (points.rowwise() - centers.row(0)).rowwise().squaredNorm();
    for (int c = 1; c < k; ++c) {
      const double total = dist2.sum();
      Eigen::Index chosen = 0;
      if (total > 0.0) {
        std::uniform_real_distribution<double> unit(0.0, total);
        double target = unit(rng);
        for (Eigen::Index i = 0; i < n; ++i) {
          target -= dist2(i);
          if (target <= 0.0) {
            chosen = i;
            break;
          }
        }
      } else {
        chosen = pick(rng);
      }
      centers.row(c) = points.row(chosen);
      dist2 = dist2.cwiseMin(
          (points.rowwise() - centers.row(c)).rowwise().squaredNorm());
    }

    std::vector<int> assign(static_cast<std::size_t>(n), -1);
    for (int iter = 0; iter < 300; ++iter) {
      bool changed = false;
      for (Eigen::Index i = 0; i < n; ++i) {
        int arg = 0;
        double best = (points.row(i) - centers.row(0)).squaredNorm();
        for (int c = 1; c < k; ++c) {
          const double d = (points.row(i) - centers.row(c)).squaredNorm();
          if (d < best) {
            best = d;
            arg = c;
          }
        }
        if (assign[static_cast<std::size_t>(i)] != arg) {
          assign[static_cast<std::size_t>(i)] = arg;
          changed = true;
        }
      }
      if (!changed) break;

      Mat sums = Mat::Zero(k, points.cols());
      std::vector<int> counts(static_cast<std::size_t>(k), 0);
      for (Eigen::Index i = 0; i < n; ++i) {
        sums.row(assign[static_cast<std::size_t>(i)]) += points.row(i);
        ++counts[static_cast<std::size_t>(assign[static_cast<std::size_t>(i)])];
      }
      for (int c = 0; c < k; ++c) {
        if (counts[static_cast<std::size_t>(c)] > 0) {
          centers.row(c) = sums.row(c) / counts[static_cast<std::size_t>(c)];
        } else {
          // Re-seed an empty cluster on the farthest point.
          Eigen::Index far = 0;
          double far_d = -1.0;
          for (Eigen::Index i = 0; i < n; ++i) {
            const double d =
                (points.row(i) - centers.row(assign[static_cast<std::size_t>(i)]))
                    .squaredNorm();
            if (d > far_d) {
              far_d = d;
              far = i;
            }
          }
          centers.row(c) = points.row(far);
        }
      }
    }

    double inertia = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      inertia += (points.row(i) - centers.row(assign[static_cast<std::size_t>(i)]))
                     .squaredNorm();
    }
    if (inertia < best_inertia) {
      best_inertia = inertia;
      best_assign = assign;
    }
  }
  return best_assign;
}

MutualInfo mutual_info_scores(const std::vector<int>& pred, const std::vector<int>& truth) {
  require(!pred.empty(), "mutual_info: empty partitions");
  require(pred.size() == truth.size(), "mutual_info: partition lengths differ");
  const int n = static_cast<int>(pred.size());

  int r = 0, c = 0;
  const std::vector<int> a = compact_labels(pred, r);
  const std::vector<int> b = compact_labels(truth, c);

  Eigen::MatrixXi table = Eigen::MatrixXi::Zero(r, c);
  for (int i = 0; i < n; ++i) ++table(a[static_cast<std::size_t>(i)], b[static_cast<std::size_t>(i)]);
  Eigen::VectorXi row_sum = table.rowwise().sum();
  Eigen::VectorXi col_sum = table.colwise().sum();

  const double dn = static_cast<double>(n);
  double mi = 0.0;
  for (int i = 0; i < r; ++i) {
    for (int j = 0; j < c; ++j) {
      const int nij = table(i, j);
      if (nij == 0) continue;
      mi += (nij / dn) * std::log(dn * nij / (static_cast<double>(row_sum(i)) * col_sum(j)));
    }
  }
  auto entropy = [dn](const Eigen::VectorXi& sums) {
    double h = 0.0;
    for (Eigen::Index i = 0; i < sums.size(); ++i) {
      if (sums(i) > 0) {
        const double p = sums(i) / dn;
        h -= p * std::log(p);
      }
    }
    return h;
  };
  const double hu = entropy(row_sum);
  const double hv = entropy(col_sum);
  const double mean_h = 0.5 * (hu + hv);

  // Expected MI under the permutation model.
  double emi = 0.0;
  for (int i = 0; i < r; ++i) {
    for (int j = 0; j < c; ++j) {
      const int ai = row_sum(i), bj = col_sum(j);
      const int lo = std::max(1, ai + bj - n);
      const int hi = std::min(ai, bj);
      for (int nij = lo; nij <= hi; ++nij) {
        const double log_p = lfact(ai) + lfact(bj) + lfact(n - ai) + lfact(n - bj) -
                             lfact(n) - lfact(nij) - lfact(ai - nij) - lfact(bj - nij) -
                             lfact(n - ai - bj + nij);
        emi += (nij / dn) * std::log(dn * nij / (static_cast<double>(ai) * bj)) *
               std::exp(log_p);
      }
    }
  }

  MutualInfo out;
  if (r == 1 && c == 1) {
    out.ami = 1.0;
    out.nmi = 1.0;
    return out;
  }
  out.nmi = mean_h > 0.0 ? mi / mean_h : 0.0;
  const double denom = mean_h - emi;
  if (std::abs(denom) < 1e-15) {
    out.ami = 0.0;
  } else {
    out.ami = (mi - emi) / denom;
  }
  return out;
}

ClusteringReport cluster_and_score(const Mat& points, int k, const std::vector<int>& truth,
                                   std::uint64_t seed, int restarts) {
  ClusteringReport report;
  report.assignments = kmeans(points, k, seed, restarts);
  const MutualInfo scores = mutual_info_scores(report.assignments, truth);
  report.ami = scores.ami;
  report.nmi = scores.nmi;
  return report;
}

namespace {

// Binary L2 logistic regression by full-batch gradient descent with a
// Lipschitz step size, run to gradient-norm 1e-6.
void fit_binary(const Mat& x, const std::vector<double>& y, double l2,
                Eigen::Ref<Eigen::RowVectorXd> w_out, double& b_out) {
  const auto n = x.rows();
  const auto d = x.cols();
  Vec w = Vec::Zero(d);
  double b = 0.0;

  const double lipschitz = 0.25 * (x.squaredNorm() + n) + l2;
  const double step = 1.0 / lipschitz;

  for (int iter = 0; iter < 200000; ++iter) {
    Vec z = x * w + Vec::Constant(n, b);
    Vec p(n);
    for (Eigen::Index i = 0; i < n; ++i) p(i) = 1.0 / (1.0 + std::exp(-z(i)));
    Vec resid = p;
    for (Eigen::Index i = 0; i < n; ++i) resid(i) -= y[static_cast<std::size_t>(i)];
    Vec grad_w = x.transpose() * resid + l2 * w;
    const double grad_b = resid.sum();
    const double norm = std::sqrt(grad_w.squaredNorm() + grad_b * grad_b);
    if (norm < 1e-6) break;
    w -= step * grad_w;
    b -= step * grad_b;
  }
  w_out = w.transpose();
  b_out = b;
}

}  // namespace

LogRegModel logreg_ovr_fit(const Mat& features, const std::vector<int>& labels,
                           const std::vector<int>& train_idx, double l2_strength) {
  require(static_cast<Eigen::Index>(labels.size()) == features.rows(),
          "logreg: feature/label count mismatch");
  require(!train_idx.empty(), "logreg: empty training set");

  std::set<int> train_classes;
  for (int idx : train_idx) {
    require(idx >= 0 && idx < static_cast<int>(labels.size()),
            "logreg: train index out of range");
    train_classes.insert(labels[static_cast<std::size_t>(idx)]);
  }
  require(train_classes.size() >= 2, "logreg: training set has a single class");

  LogRegModel model;
  model.l2_strength = l2_strength;
  model.classes.assign(train_classes.begin(), train_classes.end());
  model.weights.resize(static_cast<Eigen::Index>(model.classes.size()), features.cols());
  model.intercepts.resize(static_cast<Eigen::Index>(model.classes.size()));

  Mat x(static_cast<Eigen::Index>(train_idx.size()), features.cols());
  for (std::size_t i = 0; i < train_idx.size(); ++i) {
    x.row(static_cast<Eigen::Index>(i)) = features.row(train_idx[i]);
  }
  for (std::size_t c = 0; c < model.classes.size(); ++c) {
    std::vector<double> y(train_idx.size());
    for (std::size_t i = 0; i < train_idx.size(); ++i) {
      y[i] = labels[static_cast<std::size_t>(train_idx[i])] == model.classes[c] ? 1.0 : 0.0;
    }
    double intercept = 0.0;
    fit_binary(x, y, l2_strength, model.weights.row(static_cast<Eigen::Index>(c)),
               intercept);
    model.intercepts(static_cast<Eigen::Index>(c)) = intercept;
  }
  return model;
}

std::vector<int> logreg_predict(const LogRegModel& model, const Mat& features) {
  require(features.cols() == model.weights.cols(), "logreg: feature dimension mismatch");
  std::vector<int> out(static_cast<std::size_t>(features.rows()));
  for (Eigen::Index i = 0; i < features.rows(); ++i) {
    Eigen::Index best = 0;
    (model.weights * features.row(i).transpose() + model.intercepts).maxCoeff(&best);
    out[static_cast<std::size_t>(i)] = model.classes[static_cast<std::size_t>(best)];
  }
  return out;
}

ClassificationReport logreg_evaluate(const Mat& features, const std::vector<int>& labels,
                                     const std::vector<int>& train_idx,
                                     const std::vector<int>& test_idx,
                                     double l2_strength) {
  require(!test_idx.empty(), "logreg: empty test set");
  const LogRegModel model = logreg_ovr_fit(features, labels, train_idx, l2_strength);

  Mat test_x(static_cast<Eigen::Index>(test_idx.size()), features.cols());
  for (std::size_t i = 0; i < test_idx.size(); ++i) {
    test_x.row(static_cast<Eigen::Index>(i)) = features.row(test_idx[i]);
  }
  const std::vector<int> pred = logreg_predict(model, test_x);

  // Class universe: everything seen in the labels.
  std::set<int> universe(labels.begin(), labels.end());

  ClassificationReport report;
  int correct = 0;
  for (int cls : universe) {
    int tp = 0, fp = 0, fn = 0;
    for (std::size_t i = 0; i < test_idx.size(); ++i) {
      const int truth = labels[static_cast<std::size_t>(test_idx[i])];
      const int guess = pred[i];
      if (guess == cls && truth == cls) ++tp;
      if (guess == cls && truth != cls) ++fp;
      if (guess != cls && truth == cls) ++fn;
    }
    const double f1 = (2 * tp + fp + fn) > 0
                          ? 100.0 * 2.0 * tp / static_cast<double>(2 * tp + fp + fn)
                          : 0.0;
    report.per_class_f1.push_back(f1);
  }
  for (std::size_t i = 0; i < test_idx.size(); ++i) {
    if (pred[i] == labels[static_cast<std::size_t>(test_idx[i])]) ++correct;
  }
  report.macro_f1 =
      std::accumulate(report.per_class_f1.begin(), report.per_class_f1.end(), 0.0) /
      static_cast<double>(report.per_class_f1.size());
  report.accuracy = 100.0 * correct / static_cast<double>(test_idx.size());
  return report;
}

std::pair<std::vector<int>, std::vector<int>> stratified_split(
    const std::vector<int>& labels, double ratio, std::uint64_t seed) {
  require(ratio > 0.0 && ratio < 1.0, "split: ratio must be in (0,1)");
  std::map<int, std::vector<int>> by_class;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    by_class[labels[i]].push_back(static_cast<int>(i));
  }

  std::mt19937_64 rng(seed);
  std::vector<int> train, test;
  for (auto& [cls, members] : by_class) {
    std::shuffle(members.begin(), members.end(), rng);
    const auto size = static_cast<int>(members.size());
    int take = static_cast<int>(std::llround(ratio * size));
    take = std::clamp(take, 1, std::max(1, size - 1));
    for (int i = 0; i < size; ++i) {
      (i < take ? train : test).push_back(members[static_cast<std::size_t>(i)]);
    }
  }
  std::sort(train.begin(), train.end());
  std::sort(test.begin(), test.end());
  return {std::move(train), std::move(test)};
}

SplitAverage averaged_classification(const Mat& features, const std::vector<int>& labels,
                                     double train_ratio, int n_splits, std::uint64_t seed,
                                     double l2_strength) {
  require(n_splits >= 1, "averaged_classification: need at least one split");
  SplitAverage avg;
  for (int s = 0; s < n_splits; ++s) {
    auto [train, test] = stratified_split(labels, train_ratio, seed + static_cast<std::uint64_t>(s));
    const ClassificationReport rep =
        logreg_evaluate(features, labels, train, test, l2_strength);
    avg.macro_f1 += rep.macro_f1;
    avg.accuracy += rep.accuracy;
  }
  avg.macro_f1 /= n_splits;
  avg.accuracy /= n_splits;
  return avg;
}

double stability_relative_change(const Mat& lambda_ref, const Mat& lambda_new) {
  require(lambda_ref.rows() == lambda_new.rows() && lambda_ref.cols() == lambda_new.cols(),
          "stability: shape mismatch");
  const double denom = lambda_new.norm();
  require(denom > 0.0, "stability: zero-norm reference");
  return (lambda_ref - lambda_new).norm() / denom;
}

std::vector<int> best_column_permutation(const Mat& ref, const Mat& other) {
  require(ref.rows() == other.rows() && ref.cols() == other.cols(),
          "column alignment: shape mismatch");
  const int s = static_cast<int>(ref.cols());
  std::vector<int> perm(static_cast<std::size_t>(s));
  std::iota(perm.begin(), perm.end(), 0);
  std::vector<int> best = perm;
  double best_err = std::numeric_limits<double>::infinity();
  do {
    double err = 0.0;
    for (int j = 0; j < s; ++j) {
      err += (ref.col(j) - other.col(perm[static_cast<std::size_t>(j)])).squaredNorm();
    }
    if (err < best_err) {
      best_err = err;
      best = perm;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

Mat apply_column_permutation(const Mat& m, const std::vector<int>& perm) {
  require(static_cast<Eigen::Index>(perm.size()) == m.cols(),
          "column alignment: permutation size mismatch");
  Mat out(m.rows(), m.cols());
  for (std::size_t j = 0; j < perm.size(); ++j) {
    out.col(static_cast<Eigen::Index>(j)) = m.col(perm[j]);
  }
  return out;
}

std::vector<SweepPoint> epsilon_sensitivity_sweep(const Graph& g, const TrainConfig& base,
                                                  const std::vector<double>& epsilons,
                                                  double train_ratio, int n_splits,
                                                  std::uint64_t split_seed) {
  require(!epsilons.empty(), "epsilon sweep: empty epsilon list");
  require(g.labels().has_value(), "epsilon sweep: graph has no labels");

  std::vector<SweepPoint> table(epsilons.size());
  parallel_for(static_cast<int>(epsilons.size()), [&](int cell) {
    TrainConfig cfg = base;
    cfg.epsilon = epsilons[static_cast<std::size_t>(cell)];
    const FitResult run = fit(g, cfg);
    const SplitAverage avg = averaged_classification(
        run.embedding.coordinates, *g.labels(), train_ratio, n_splits, split_seed);
    table[static_cast<std::size_t>(cell)] =
        SweepPoint{cfg.epsilon, avg.accuracy, avg.macro_f1};
  });
  return table;
}

}  // namespace otge
