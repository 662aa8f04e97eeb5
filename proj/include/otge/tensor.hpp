#pragma once

#include <Eigen/Dense>

#include <functional>
#include <memory>
#include <string>
#include <unordered_map>
#include <vector>

namespace otge {

// Dense row-major storage; everything in the library is 64-bit.
using Mat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Arr = Eigen::Array<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vec = Eigen::VectorXd;

// Floor applied to every elementwise division denominator. Keeps the
// scaling-vector updates finite when exp(-C/epsilon) underflows; values
// above the floor are untouched.
inline constexpr double kDivisionFloor = 1e-30;

class Tape;

/// A 2-D matrix of doubles, optionally recorded on a Tape so that
/// gradients can flow back through it. Copies share immutable storage;
/// a Tensor never mutates its values after construction.
class Tensor {
 public:
  Tensor() = default;
  Tensor(Mat values);  // NOLINT: implicit by design, detached constant
  explicit Tensor(double scalar);

  const Mat& value() const { return *value_; }
  const std::shared_ptr<const Mat>& value_ptr() const { return value_; }
  Eigen::Index rows() const { return value_->rows(); }
  Eigen::Index cols() const { return value_->cols(); }

  bool tracked() const { return tape_ != nullptr; }
  Tape* tape() const { return tape_; }
  /// Handle of the recorded node; -1 when detached.
  int node() const { return node_; }

  /// Value of a 1x1 tensor.
  double scalar() const;

  static Tensor detached(std::shared_ptr<const Mat> values) {
    return Tensor(std::move(values), nullptr, -1);
  }

 private:
  friend class Tape;
  Tensor(std::shared_ptr<const Mat> values, Tape* tape, int node)
      : value_(std::move(values)), tape_(tape), node_(node) {}

  std::shared_ptr<const Mat> value_ = std::make_shared<const Mat>();
  Tape* tape_ = nullptr;
  int node_ = -1;
};

/// Gradients keyed by leaf node handle. Leaves that did not participate
/// in the differentiated value have no entry.
using GradientMap = std::unordered_map<int, Mat>;

/// Records the forward pass of each tracked operation so that
/// backward() can replay it in reverse. One tape per training step;
/// single-threaded by construction.
class Tape {
 public:
  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  /// Registers a trainable leaf holding a copy of `initial`.
  Tensor leaf(Mat initial);

  /// Reverse-mode gradients of a scalar (1x1) tracked tensor with
  /// respect to every participating leaf. Pure: can be called twice on
  /// the same tape with bitwise-equal results.
  GradientMap backward(const Tensor& loss) const;

  std::size_t size() const { return nodes_.size(); }

  // Internal: used by the operation set to append a node.
  using Grads = std::vector<Mat>;
  using BackwardFn = std::function<void(const Mat& upstream, Grads& grads)>;
  Tensor record(std::shared_ptr<const Mat> value, BackwardFn fn);

  /// slot = expr on first touch, slot += expr afterwards; expression
  /// templates evaluate straight into the slot.
  template <typename Expr>
  static void accumulate(Grads& grads, int node, const Expr& g) {
    Mat& slot = grads[static_cast<std::size_t>(node)];
    if (slot.size() == 0) {
      slot = g;
    } else {
      slot += g;
    }
  }

 private:
  struct Node {
    BackwardFn back;  // empty for leaves
    bool is_leaf = false;
  };
  std::vector<Node> nodes_;
};

// ---------------------------------------------------------------------------
// Operation set. Each function computes the forward value and, when any
// input is tracked, records the exact gradient rule on that tape.
// Mixing tensors from two different tapes is an error.

Tensor matmul(const Tensor& a, const Tensor& b);
/// a^T * b without materializing the transpose.
Tensor matmul_tn(const Tensor& a, const Tensor& b);
Tensor transpose(const Tensor& a);

Tensor add(const Tensor& a, const Tensor& b);
Tensor sub(const Tensor& a, const Tensor& b);
Tensor mul(const Tensor& a, const Tensor& b);
/// Elementwise a / max(b, kDivisionFloor).
Tensor div(const Tensor& a, const Tensor& b);
Tensor mul_scalar(const Tensor& a, double s);
/// Elementwise a^e for scalar e. The derivative at a == 0 with e < 1 is
/// taken as 0 rather than +inf.
Tensor pow_scalar(const Tensor& a, double e);
Tensor exp(const Tensor& a);
Tensor log(const Tensor& a);

/// Column vector of row sums (n x 1).
Tensor sum_rows(const Tensor& a);
/// 1x1 total.
Tensor sum_all(const Tensor& a);

/// n x 1 column vector repeated `times` across columns.
Tensor broadcast_col(const Tensor& v, Eigen::Index times);
/// 1 x m row vector repeated `times` down rows.
Tensor broadcast_row(const Tensor& r, Eigen::Index times);
/// [a a ... a] repeated whole, `times` blocks.
Tensor tile_cols(const Tensor& a, Eigen::Index times);
/// Each column repeated `times` consecutively.
Tensor expand_cols(const Tensor& a, Eigen::Index times);
/// Sums consecutive groups of `block` columns; cols % block == 0.
Tensor sum_col_blocks(const Tensor& a, Eigen::Index block);
/// Same data, new shape, row-major order preserved.
Tensor reshape(const Tensor& a, Eigen::Index rows, Eigen::Index cols);

/// Each column becomes a probability vector (max-subtracted).
Tensor softmax_cols(const Tensor& a);
/// Each row becomes a probability vector.
Tensor softmax_rows(const Tensor& a);

// Fused kernels for the scaling-iteration hot loop. Each is equivalent
// to the corresponding primitive chain but materializes one node.

/// (a / max(b, floor))^e.
Tensor pow_div(const Tensor& a, const Tensor& b, double e);
/// (expand_cols(b, times) / max(kv, floor))^e.
Tensor pow_div_expand(const Tensor& b, const Tensor& kv, Eigen::Index times, double e);
/// (sum_col_blocks(lam_grid .* (u .* kv)^q, block))^r.
Tensor weighted_power_merge(const Tensor& u, const Tensor& kv, const Tensor& lam_grid,
                            Eigen::Index block, double q, double r);

// Untracked helpers shared with the non-differentiated solvers.
inline Mat clamped_div(const Mat& num, const Mat& den) {
  return (num.array() / den.array().max(kDivisionFloor)).matrix();
}
inline Vec clamped_div(const Vec& num, const Vec& den) {
  return (num.array() / den.array().max(kDivisionFloor)).matrix();
}

/// x^e as exp(e log x), which vectorizes where std::pow does not.
/// Exact at x == 0 for e > 0; callers guarantee x >= 0.
template <typename Derived>
typename Derived::PlainObject fast_pow(const Eigen::ArrayBase<Derived>& base, double e) {
  return (e * base.log()).exp();
}

Mat softmax_cols_value(const Mat& a);
Mat softmax_rows_value(const Mat& a);

std::string shape_string(const Tensor& t);

}  // namespace otge
