#include "otge/ot.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace otge {

namespace {

void require(bool cond, const std::string& message) {
  if (!cond) throw std::invalid_argument(message);
}

void check_histogram(const Vec& h, Eigen::Index n, const char* name, bool unit_mass) {
  require(h.size() == n, std::string(name) + ": expected length " + std::to_string(n) +
                             ", got " + std::to_string(h.size()));
  require((h.array() >= 0.0).all(), std::string(name) + ": negative entry");
  const double mass = h.sum();
  require(mass > 0.0, std::string(name) + ": zero total mass");
  if (unit_mass) {
    require(std::abs(mass - 1.0) <= 1e-8,
            std::string(name) + ": mass " + std::to_string(mass) + " is not 1");
  }
}

void check_simplex_row(const Eigen::RowVectorXd& row, Eigen::Index idx) {
  require((row.array() >= -1e-12).all(),
          "weights: negative entry in row " + std::to_string(idx));
  require(std::abs(row.sum() - 1.0) <= 1e-8,
          "weights: row " + std::to_string(idx) + " sums to " + std::to_string(row.sum()));
}

SinkhornResult run_scaling(const GibbsKernel& k, const Vec& i0, const Vec& i1,
                           int iterations, double early_stop_tol, bool unbalanced) {
  require(iterations >= 1, "sinkhorn: iterations must be >= 1");
  const Eigen::Index n = k.n();
  check_histogram(i0, n, "i0", !unbalanced);
  check_histogram(i1, n, "i1", !unbalanced);

  const double power = k.exponent_uv;
  Vec u = Vec::Ones(n);
  Vec v = Vec::Ones(n);
  int run = iterations;
  for (int l = 0; l < iterations; ++l) {
    v = clamped_div(i0, Vec(k.kernel.transpose() * u));
    if (unbalanced) v = fast_pow(v.array(), power).matrix();
    Vec u_next = clamped_div(i1, Vec(k.kernel * v));
    if (unbalanced) u_next = fast_pow(u_next.array(), power).matrix();
    const double delta = (u_next - u).cwiseAbs().maxCoeff();
    u = u_next;
    if (early_stop_tol > 0.0 && delta < early_stop_tol) {
      run = l + 1;
      break;
    }
  }

  SinkhornResult result;
  result.plan.coupling = u.asDiagonal() * k.kernel * v.asDiagonal();
  result.plan.scaling_u = std::move(u);
  result.plan.scaling_v = std::move(v);
  result.plan.iterations_run = run;
  result.distance = result.plan.coupling.cwiseProduct(k.cost).sum();
  return result;
}

}  // namespace

GibbsKernel::GibbsKernel(Mat cost_matrix, double eps, double rho_value)
    : cost(std::move(cost_matrix)), epsilon(eps), rho(rho_value) {
  require(epsilon > 0.0, "gibbs kernel: epsilon must be > 0");
  require(rho > 0.0, "gibbs kernel: rho must be > 0");
  require(cost.rows() == cost.cols(), "gibbs kernel: cost must be square");
  kernel = (-cost.array() / epsilon).exp().matrix();
  exponent_uv = rho / (rho + epsilon);
  exponent_in = epsilon / (epsilon + rho);
  exponent_out = (epsilon + rho) / epsilon;
}

GibbsKernel::GibbsKernel(const DiffusionCost& cost, double eps, double rho_value)
    : GibbsKernel(cost.cost, eps, rho_value) {}

SinkhornResult sinkhorn_distance(const GibbsKernel& k, const Vec& i0, const Vec& i1,
                                 int iterations, double early_stop_tol) {
  return run_scaling(k, i0, i1, iterations, early_stop_tol, false);
}

SinkhornResult sinkhorn_unbalanced_distance(const GibbsKernel& k, const Vec& i0,
                                            const Vec& i1, int iterations,
                                            double early_stop_tol) {
  return run_scaling(k, i0, i1, iterations, early_stop_tol, true);
}

Vec barycenter_serial(const GibbsKernel& k, const std::vector<Vec>& patterns,
                      const Vec& lambda, int iterations) {
  const auto s = static_cast<Eigen::Index>(patterns.size());
  require(s >= 1, "barycenter_serial: need at least one pattern");
  require(lambda.size() == s, "barycenter_serial: weight/pattern count mismatch");
  check_simplex_row(lambda.transpose(), 0);
  require(iterations >= 1, "barycenter_serial: iterations must be >= 1");
  const Eigen::Index n = k.n();
  for (const Vec& m : patterns) {
    require(m.size() == n, "barycenter_serial: pattern length mismatch");
    require((m.array() >= 0.0).all(), "barycenter_serial: negative pattern entry");
  }

  std::vector<Vec> u(patterns.size(), Vec::Ones(n));
  std::vector<Vec> v(patterns.size());
  Vec b = Vec::Zero(n);
  for (int l = 0; l < iterations; ++l) {
    for (Eigen::Index i = 0; i < s; ++i) {
      v[i] = fast_pow(clamped_div(patterns[i], Vec(k.kernel.transpose() * u[i])).array(),
                      k.exponent_uv)
                 .matrix();
    }
    Eigen::ArrayXd acc = Eigen::ArrayXd::Zero(n);
    for (Eigen::Index i = 0; i < s; ++i) {
      acc += lambda(i) *
             fast_pow(Eigen::ArrayXd(u[i].array() * (k.kernel * v[i]).array()),
                      k.exponent_in);
    }
    b = fast_pow(acc, k.exponent_out).matrix();
    for (Eigen::Index i = 0; i < s; ++i) {
      u[i] = fast_pow(clamped_div(b, Vec(k.kernel * v[i])).array(), k.exponent_uv).matrix();
    }
  }
  return b;
}

Mat BarycenterBatch::scaling_u_block(Eigen::Index j, Eigen::Index s) const {
  return scaling_u.value().middleCols(j * s, s);
}

Mat BarycenterBatch::scaling_v_block(Eigen::Index j, Eigen::Index s) const {
  return scaling_v.value().middleCols(j * s, s);
}

BarycenterBatch barycenter_batched(const GibbsKernel& k, const Tensor& patterns,
                                   const Tensor& weights, int iterations) {
  const Eigen::Index n = k.n();
  const Eigen::Index s = patterns.cols();
  const Eigen::Index j = weights.rows();
  require(iterations >= 1, "barycenter_batched: iterations must be >= 1");
  require(patterns.rows() == n,
          "barycenter_batched: patterns are " + shape_string(patterns) +
              " but the kernel is " + std::to_string(n) + "x" + std::to_string(n));
  require(weights.cols() == s, "barycenter_batched: weights are " +
                                   shape_string(weights) + ", expected columns " +
                                   std::to_string(s));
  require((patterns.value().array() >= 0.0).all(),
          "barycenter_batched: negative pattern entry");
  for (Eigen::Index r = 0; r < j; ++r) check_simplex_row(weights.value().row(r), r);

  const Tensor kernel(k.kernel);
  // Per-barycenter problems stacked side by side: barycenter r uses
  // columns [r*S, (r+1)*S) of every N x (J*S) matrix below.
  Tensor targets = tile_cols(patterns, j);
  Tensor weight_grid = broadcast_row(reshape(weights, 1, j * s), n);

  Tensor u(Mat::Ones(n, j * s));
  Tensor v, barycenters;
  for (int l = 0; l < iterations; ++l) {
    v = pow_div(targets, matmul_tn(kernel, u), k.exponent_uv);
    Tensor kv = matmul(kernel, v);
    barycenters = weighted_power_merge(u, kv, weight_grid, s, k.exponent_in,
                                       k.exponent_out);
    if (l + 1 < iterations) {
      u = pow_div_expand(barycenters, kv, s, k.exponent_uv);
    }
  }

  BarycenterBatch out;
  out.result = transpose(barycenters);
  out.scaling_u = u;
  out.scaling_v = v;
  return out;
}

}  // namespace otge
