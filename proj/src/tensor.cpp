#include "otge/tensor.hpp"

#include <cmath>
#include <stdexcept>

namespace otge {

namespace {

std::string dims(Eigen::Index r, Eigen::Index c) {
  return std::to_string(r) + "x" + std::to_string(c);
}

[[noreturn]] void shape_error(const std::string& op, const Tensor& a, const Tensor& b) {
  throw std::invalid_argument(op + ": incompatible shapes " + shape_string(a) +
                              " and " + shape_string(b));
}

Tape* tape_of(const Tensor& a) { return a.tape(); }

Tape* tape_of(const Tensor& a, const Tensor& b) {
  if (a.tracked() && b.tracked() && a.tape() != b.tape()) {
    throw std::invalid_argument("operands recorded on different tapes");
  }
  return a.tracked() ? a.tape() : b.tape();
}

Tensor finish(std::shared_ptr<const Mat> out, Tape* tape, Tape::BackwardFn fn) {
  if (tape == nullptr) return Tensor::detached(std::move(out));
  return tape->record(std::move(out), std::move(fn));
}

}  // namespace

std::string shape_string(const Tensor& t) { return dims(t.rows(), t.cols()); }

Tensor::Tensor(Mat values) : value_(std::make_shared<const Mat>(std::move(values))) {}

Tensor::Tensor(double scalar) : value_(std::make_shared<const Mat>(Mat::Constant(1, 1, scalar))) {}

double Tensor::scalar() const {
  if (rows() != 1 || cols() != 1) {
    throw std::logic_error("scalar() on a " + shape_string(*this) + " tensor");
  }
  return (*value_)(0, 0);
}

Tensor Tape::leaf(Mat initial) {
  nodes_.push_back(Node{BackwardFn{}, true});
  return Tensor(std::make_shared<const Mat>(std::move(initial)), this,
                static_cast<int>(nodes_.size()) - 1);
}

Tensor Tape::record(std::shared_ptr<const Mat> value, BackwardFn fn) {
  nodes_.push_back(Node{std::move(fn), false});
  return Tensor(std::move(value), this, static_cast<int>(nodes_.size()) - 1);
}

GradientMap Tape::backward(const Tensor& loss) const {
  if (!loss.tracked() || loss.tape() != this) {
    throw std::invalid_argument("backward() needs a tensor tracked on this tape");
  }
  if (loss.rows() != 1 || loss.cols() != 1) {
    throw std::invalid_argument("backward() needs a 1x1 tensor, got " + shape_string(loss));
  }
  Grads grads(nodes_.size());
  grads[static_cast<std::size_t>(loss.node())] = Mat::Ones(1, 1);

  for (int i = loss.node(); i >= 0; --i) {
    const Mat& g = grads[static_cast<std::size_t>(i)];
    if (g.size() == 0) continue;  // node did not contribute to the loss
    const Node& node = nodes_[static_cast<std::size_t>(i)];
    if (node.back) node.back(g, grads);
  }

  GradientMap out;
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    if (nodes_[i].is_leaf && grads[i].size() != 0) {
      out.emplace(static_cast<int>(i), std::move(grads[i]));
    }
  }
  return out;
}

// ---------------------------------------------------------------------------

Tensor matmul(const Tensor& a, const Tensor& b) {
  if (a.cols() != b.rows()) shape_error("matmul", a, b);
  auto out = std::make_shared<Mat>(a.value() * b.value());
  Tape* tape = tape_of(a, b);
  const int an = a.tracked() ? a.node() : -1;
  const int bn = b.tracked() ? b.node() : -1;
  auto av = a.value_ptr(), bv = b.value_ptr();
  return finish(out, tape, [an, bn, av, bv](const Mat& g, Tape::Grads& grads) {
    if (an >= 0) Tape::accumulate(grads, an, g * bv->transpose());
    if (bn >= 0) Tape::accumulate(grads, bn, av->transpose() * g);
  });
}

Tensor matmul_tn(const Tensor& a, const Tensor& b) {
  if (a.rows() != b.rows()) shape_error("matmul_tn", a, b);
  auto out = std::make_shared<Mat>(a.value().transpose() * b.value());
  Tape* tape = tape_of(a, b);
  const int an = a.tracked() ? a.node() : -1;
  const int bn = b.tracked() ? b.node() : -1;
  auto av = a.value_ptr(), bv = b.value_ptr();
  return finish(out, tape, [an, bn, av, bv](const Mat& g, Tape::Grads& grads) {
    if (an >= 0) Tape::accumulate(grads, an, *bv * g.transpose());
    if (bn >= 0) Tape::accumulate(grads, bn, *av * g);
  });
}

Tensor transpose(const Tensor& a) {
  auto out = std::make_shared<Mat>(a.value().transpose());
  const int an = a.tracked() ? a.node() : -1;
  return finish(out, tape_of(a), [an](const Mat& g, Tape::Grads& grads) {
    Tape::accumulate(grads, an, g.transpose());
  });
}

namespace {

void check_same_shape(const char* name, const Tensor& a, const Tensor& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) shape_error(name, a, b);
}

}  // namespace

Tensor add(const Tensor& a, const Tensor& b) {
  check_same_shape("add", a, b);
  const int an = a.tracked() ? a.node() : -1;
  const int bn = b.tracked() ? b.node() : -1;
  return finish(std::make_shared<Mat>(a.value() + b.value()), tape_of(a, b),
                [an, bn](const Mat& g, Tape::Grads& grads) {
                  if (an >= 0) Tape::accumulate(grads, an, g);
                  if (bn >= 0) Tape::accumulate(grads, bn, g);
                });
}

Tensor sub(const Tensor& a, const Tensor& b) {
  check_same_shape("sub", a, b);
  const int an = a.tracked() ? a.node() : -1;
  const int bn = b.tracked() ? b.node() : -1;
  return finish(std::make_shared<Mat>(a.value() - b.value()), tape_of(a, b),
                [an, bn](const Mat& g, Tape::Grads& grads) {
                  if (an >= 0) Tape::accumulate(grads, an, g);
                  if (bn >= 0) Tape::accumulate(grads, bn, -g);
                });
}

Tensor mul(const Tensor& a, const Tensor& b) {
  check_same_shape("mul", a, b);
  const int an = a.tracked() ? a.node() : -1;
  const int bn = b.tracked() ? b.node() : -1;
  auto av = a.value_ptr(), bv = b.value_ptr();
  return finish(std::make_shared<Mat>(a.value().cwiseProduct(b.value())), tape_of(a, b),
                [an, bn, av, bv](const Mat& g, Tape::Grads& grads) {
                  if (an >= 0) Tape::accumulate(grads, an, g.cwiseProduct(*bv));
                  if (bn >= 0) Tape::accumulate(grads, bn, g.cwiseProduct(*av));
                });
}

Tensor div(const Tensor& a, const Tensor& b) {
  check_same_shape("div", a, b);
  const int an = a.tracked() ? a.node() : -1;
  const int bn = b.tracked() ? b.node() : -1;
  auto av = a.value_ptr(), bv = b.value_ptr();
  return finish(
      std::make_shared<Mat>(clamped_div(a.value(), b.value())), tape_of(a, b),
      [an, bn, av, bv](const Mat& g, Tape::Grads& grads) {
        Arr den = bv->array().max(kDivisionFloor);
        if (an >= 0) Tape::accumulate(grads, an, (g.array() / den).matrix());
        if (bn >= 0) {
          // Zero where the floor is active: the output no longer depends on b there.
          Arr gb = -g.array() * av->array() / (den * den);
          gb = (bv->array() >= kDivisionFloor).select(gb, 0.0);
          Tape::accumulate(grads, bn, gb.matrix());
        }
      });
}

Tensor mul_scalar(const Tensor& a, double s) {
  auto out = std::make_shared<Mat>(a.value() * s);
  const int an = a.tracked() ? a.node() : -1;
  return finish(out, tape_of(a), [an, s](const Mat& g, Tape::Grads& grads) {
    Tape::accumulate(grads, an, g * s);
  });
}

Tensor pow_scalar(const Tensor& a, double e) {
  auto out = std::make_shared<Mat>(a.value().array().pow(e).matrix());
  const int an = a.tracked() ? a.node() : -1;
  auto av = a.value_ptr();
  return finish(out, tape_of(a), [an, e, av](const Mat& g, Tape::Grads& grads) {
    Arr local = e * av->array().pow(e - 1.0);
    local = (av->array() != 0.0).select(local, 0.0);
    Tape::accumulate(grads, an, (g.array() * local).matrix());
  });
}

Tensor exp(const Tensor& a) {
  auto out = std::make_shared<Mat>(a.value().array().exp().matrix());
  const int an = a.tracked() ? a.node() : -1;
  auto ov = out;
  return finish(out, tape_of(a), [an, ov](const Mat& g, Tape::Grads& grads) {
    Tape::accumulate(grads, an, g.cwiseProduct(*ov));
  });
}

Tensor log(const Tensor& a) {
  auto out = std::make_shared<Mat>(a.value().array().log().matrix());
  const int an = a.tracked() ? a.node() : -1;
  auto av = a.value_ptr();
  return finish(out, tape_of(a), [an, av](const Mat& g, Tape::Grads& grads) {
    Tape::accumulate(grads, an, (g.array() / av->array()).matrix());
  });
}

Tensor sum_rows(const Tensor& a) {
  auto out = std::make_shared<Mat>(a.rows(), 1);
  out->col(0) = a.value().rowwise().sum();
  const int an = a.tracked() ? a.node() : -1;
  const Eigen::Index c = a.cols();
  return finish(out, tape_of(a), [an, c](const Mat& g, Tape::Grads& grads) {
    Tape::accumulate(grads, an, g.replicate(1, c));
  });
}

Tensor sum_all(const Tensor& a) {
  auto out = std::make_shared<Mat>(Mat::Constant(1, 1, a.value().sum()));
  const int an = a.tracked() ? a.node() : -1;
  const Eigen::Index r = a.rows(), c = a.cols();
  return finish(out, tape_of(a), [an, r, c](const Mat& g, Tape::Grads& grads) {
    Tape::accumulate(grads, an, Mat::Constant(r, c, g(0, 0)));
  });
}

Tensor broadcast_col(const Tensor& v, Eigen::Index times) {
  if (v.cols() != 1) {
    throw std::invalid_argument("broadcast_col: expected a column vector, got " +
                                shape_string(v));
  }
  auto out = std::make_shared<Mat>(v.value().replicate(1, times));
  const int an = v.tracked() ? v.node() : -1;
  return finish(out, tape_of(v), [an](const Mat& g, Tape::Grads& grads) {
    Tape::accumulate(grads, an, g.rowwise().sum());
  });
}

Tensor broadcast_row(const Tensor& r, Eigen::Index times) {
  if (r.rows() != 1) {
    throw std::invalid_argument("broadcast_row: expected a row vector, got " +
                                shape_string(r));
  }
  auto out = std::make_shared<Mat>(r.value().replicate(times, 1));
  const int an = r.tracked() ? r.node() : -1;
  return finish(out, tape_of(r), [an](const Mat& g, Tape::Grads& grads) {
    Tape::accumulate(grads, an, g.colwise().sum());
  });
}

Tensor tile_cols(const Tensor& a, Eigen::Index times) {
  auto out = std::make_shared<Mat>(a.value().replicate(1, times));
  const int an = a.tracked() ? a.node() : -1;
  const Eigen::Index m = a.cols();
  return finish(out, tape_of(a), [an, m, times](const Mat& g, Tape::Grads& grads) {
    Mat acc = g.middleCols(0, m);
    for (Eigen::Index t = 1; t < times; ++t) acc += g.middleCols(t * m, m);
    Tape::accumulate(grads, an, acc);
  });
}

Tensor expand_cols(const Tensor& a, Eigen::Index times) {
  auto out = std::make_shared<Mat>(a.rows(), a.cols() * times);
  for (Eigen::Index j = 0; j < a.cols(); ++j) {
    out->middleCols(j * times, times) = a.value().col(j).replicate(1, times);
  }
  const int an = a.tracked() ? a.node() : -1;
  const Eigen::Index m = a.cols();
  return finish(out, tape_of(a), [an, m, times](const Mat& g, Tape::Grads& grads) {
    Mat acc(g.rows(), m);
    for (Eigen::Index j = 0; j < m; ++j) {
      acc.col(j) = g.middleCols(j * times, times).rowwise().sum();
    }
    Tape::accumulate(grads, an, acc);
  });
}

Tensor sum_col_blocks(const Tensor& a, Eigen::Index block) {
  if (block <= 0 || a.cols() % block != 0) {
    throw std::invalid_argument("sum_col_blocks: " + shape_string(a) +
                                " not divisible into blocks of " + std::to_string(block));
  }
  const Eigen::Index out_cols = a.cols() / block;
  auto out = std::make_shared<Mat>(a.rows(), out_cols);
  for (Eigen::Index j = 0; j < out_cols; ++j) {
    out->col(j) = a.value().middleCols(j * block, block).rowwise().sum();
  }
  const int an = a.tracked() ? a.node() : -1;
  return finish(out, tape_of(a), [an, block, out_cols](const Mat& g, Tape::Grads& grads) {
    Mat acc(g.rows(), out_cols * block);
    for (Eigen::Index j = 0; j < out_cols; ++j) {
      acc.middleCols(j * block, block) = g.col(j).replicate(1, block);
    }
    Tape::accumulate(grads, an, acc);
  });
}

Tensor reshape(const Tensor& a, Eigen::Index rows, Eigen::Index cols) {
  if (rows * cols != a.rows() * a.cols()) {
    throw std::invalid_argument("reshape: cannot view " + shape_string(a) + " as " +
                                dims(rows, cols));
  }
  // Row-major storage, so a flat remap preserves element order.
  auto out = std::make_shared<Mat>(Eigen::Map<const Mat>(a.value().data(), rows, cols));
  const int an = a.tracked() ? a.node() : -1;
  const Eigen::Index ar = a.rows(), ac = a.cols();
  return finish(out, tape_of(a), [an, ar, ac](const Mat& g, Tape::Grads& grads) {
    Tape::accumulate(grads, an, Mat(Eigen::Map<const Mat>(g.data(), ar, ac)));
  });
}

Tensor pow_div(const Tensor& a, const Tensor& b, double e) {
  check_same_shape("pow_div", a, b);
  auto out = std::make_shared<Mat>(
      fast_pow(Arr(a.value().array() / b.value().array().max(kDivisionFloor)), e).matrix());
  const int an = a.tracked() ? a.node() : -1;
  const int bn = b.tracked() ? b.node() : -1;
  auto av = a.value_ptr(), bv = b.value_ptr();
  auto ov = out;
  return finish(out, tape_of(a, b), [an, bn, e, av, bv, ov](const Mat& g, Tape::Grads& grads) {
    // d/da (a/b)^e = e * out / a (a > 0); d/db = -e * out / b (floor inactive)
    if (an >= 0) {
      Tape::accumulate(
          grads, an,
          (av->array() > 0.0)
              .select(e * g.array() * ov->array() / av->array(), 0.0)
              .matrix());
    }
    if (bn >= 0) {
      Tape::accumulate(grads, bn,
                       (bv->array() >= kDivisionFloor)
                           .select(-e * g.array() * ov->array() / bv->array(), 0.0)
                           .matrix());
    }
  });
}

Tensor pow_div_expand(const Tensor& b, const Tensor& kv, Eigen::Index times, double e) {
  if (b.rows() != kv.rows() || b.cols() * times != kv.cols()) {
    throw std::invalid_argument("pow_div_expand: " + shape_string(b) + " by " +
                                std::to_string(times) + " against " + shape_string(kv));
  }
  auto out = std::make_shared<Mat>(b.rows(), kv.cols());
  for (Eigen::Index j = 0; j < b.cols(); ++j) {
    out->middleCols(j * times, times) =
        fast_pow(Arr(b.value().col(j).replicate(1, times).array() /
                     kv.value().middleCols(j * times, times).array().max(kDivisionFloor)),
                 e)
            .matrix();
  }
  const int bn = b.tracked() ? b.node() : -1;
  const int kn = kv.tracked() ? kv.node() : -1;
  auto bvp = b.value_ptr(), kvp = kv.value_ptr();
  auto ov = out;
  const Eigen::Index m = b.cols();
  return finish(out, tape_of(b, kv),
                [bn, kn, e, times, m, bvp, kvp, ov](const Mat& g, Tape::Grads& grads) {
                  if (bn >= 0) {
                    Mat gb(ov->rows(), m);
                    for (Eigen::Index j = 0; j < m; ++j) {
                      auto expanded = bvp->col(j).replicate(1, times).array();
                      gb.col(j) = (expanded > 0.0)
                                      .select(e * g.middleCols(j * times, times).array() *
                                                  ov->middleCols(j * times, times).array() /
                                                  expanded,
                                              0.0)
                                      .matrix()
                                      .rowwise()
                                      .sum();
                    }
                    Tape::accumulate(grads, bn, gb);
                  }
                  if (kn >= 0) {
                    Tape::accumulate(grads, kn,
                                     (kvp->array() >= kDivisionFloor)
                                         .select(-e * g.array() * ov->array() / kvp->array(), 0.0)
                                         .matrix());
                  }
                });
}

Tensor weighted_power_merge(const Tensor& u, const Tensor& kv, const Tensor& lam_grid,
                            Eigen::Index block, double q, double r) {
  check_same_shape("weighted_power_merge", u, kv);
  check_same_shape("weighted_power_merge", u, lam_grid);
  if (block <= 0 || u.cols() % block != 0) {
    throw std::invalid_argument("weighted_power_merge: bad block " + std::to_string(block));
  }
  const Eigen::Index out_cols = u.cols() / block;

  auto w = std::make_shared<Mat>(
      fast_pow(Arr(u.value().array() * kv.value().array()), q).matrix());
  auto out = std::make_shared<Mat>(u.rows(), out_cols);
  Mat weighted = lam_grid.value().cwiseProduct(*w);
  for (Eigen::Index j = 0; j < out_cols; ++j) {
    out->col(j) = weighted.middleCols(j * block, block).rowwise().sum();
  }
  *out = fast_pow(out->array(), r).matrix();

  Tape* tape = u.tracked() ? u.tape() : (kv.tracked() ? kv.tape() : lam_grid.tape());
  if (u.tracked() && kv.tracked() && u.tape() != kv.tape()) {
    throw std::invalid_argument("operands recorded on different tapes");
  }
  if (lam_grid.tracked() && tape != nullptr && lam_grid.tape() != tape) {
    throw std::invalid_argument("operands recorded on different tapes");
  }
  const int un = u.tracked() ? u.node() : -1;
  const int kn = kv.tracked() ? kv.node() : -1;
  const int ln = lam_grid.tracked() ? lam_grid.node() : -1;
  auto uv = u.value_ptr(), kvp = kv.value_ptr(), lv = lam_grid.value_ptr();
  auto ov = out;
  return finish(out, tape,
                [un, kn, ln, block, q, r, uv, kvp, lv, w, ov](const Mat& g, Tape::Grads& grads) {
                  // t = sum_blocks(lam .* w); out = t^r; gt = r * out / t
                  const Eigen::Index out_cols = ov->cols();
                  Mat gt(ov->rows(), out_cols);
                  {
                    Arr t = fast_pow(ov->array(), 1.0 / r);
                    gt = (t > 0.0).select(r * g.array() * ov->array() / t, 0.0).matrix();
                  }
                  Mat gt_expanded(ov->rows(), out_cols * block);
                  for (Eigen::Index j = 0; j < out_cols; ++j) {
                    gt_expanded.middleCols(j * block, block) = gt.col(j).replicate(1, block);
                  }
                  if (ln >= 0) {
                    Tape::accumulate(grads, ln, gt_expanded.cwiseProduct(*w));
                  }
                  if (un >= 0 || kn >= 0) {
                    // gp = (gt_expanded .* lam) .* q w / p with p = u .* kv
                    Arr gp = (uv->array() * kvp->array() > 0.0)
                                 .select(gt_expanded.array() * lv->array() * q * w->array() /
                                             (uv->array() * kvp->array()),
                                         0.0);
                    if (un >= 0) Tape::accumulate(grads, un, (gp * kvp->array()).matrix());
                    if (kn >= 0) Tape::accumulate(grads, kn, (gp * uv->array()).matrix());
                  }
                });
}

Mat softmax_cols_value(const Mat& a) {
  Mat out(a.rows(), a.cols());
  for (Eigen::Index j = 0; j < a.cols(); ++j) {
    Eigen::ArrayXd col = a.col(j).array();
    col -= col.maxCoeff();
    Eigen::ArrayXd e = col.exp();
    out.col(j) = (e / e.sum()).matrix();
  }
  return out;
}

Mat softmax_rows_value(const Mat& a) {
  Mat out(a.rows(), a.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    Eigen::ArrayXd row = a.row(i).transpose().array();
    row -= row.maxCoeff();
    Eigen::ArrayXd e = row.exp();
    out.row(i) = (e / e.sum()).matrix().transpose();
  }
  return out;
}

Tensor softmax_cols(const Tensor& a) {
  auto out = std::make_shared<Mat>(softmax_cols_value(a.value()));
  const int an = a.tracked() ? a.node() : -1;
  auto ov = out;
  return finish(out, tape_of(a), [an, ov](const Mat& g, Tape::Grads& grads) {
    Mat gx(ov->rows(), ov->cols());
    for (Eigen::Index j = 0; j < ov->cols(); ++j) {
      const double dot = ov->col(j).dot(g.col(j));
      gx.col(j) = ov->col(j).cwiseProduct(g.col(j) - Eigen::VectorXd::Constant(ov->rows(), dot));
    }
    Tape::accumulate(grads, an, gx);
  });
}

Tensor softmax_rows(const Tensor& a) {
  auto out = std::make_shared<Mat>(softmax_rows_value(a.value()));
  const int an = a.tracked() ? a.node() : -1;
  auto ov = out;
  return finish(out, tape_of(a), [an, ov](const Mat& g, Tape::Grads& grads) {
    Mat gx(ov->rows(), ov->cols());
    for (Eigen::Index i = 0; i < ov->rows(); ++i) {
      const double dot = ov->row(i).dot(g.row(i));
      gx.row(i) = ov->row(i).cwiseProduct(g.row(i) - Eigen::RowVectorXd::Constant(ov->cols(), dot));
    }
    Tape::accumulate(grads, an, gx);
  });
}

}  // namespace otge
