#pragma once

#include "otge/graph.hpp"
#include "otge/tensor.hpp"

#include <vector>

namespace otge {

/// Precomputed scaling kernel K = exp(-C/epsilon) together with the
/// exponents used by the mass-relaxed updates.
struct GibbsKernel {
  Mat cost;
  double epsilon = 0.0;
  double rho = 0.0;
  Mat kernel;
  double exponent_uv = 0.0;   // rho / (rho + epsilon)
  double exponent_in = 0.0;   // epsilon / (epsilon + rho)
  double exponent_out = 0.0;  // (epsilon + rho) / epsilon

  GibbsKernel(Mat cost_matrix, double epsilon, double rho);
  GibbsKernel(const DiffusionCost& cost, double epsilon, double rho);

  Eigen::Index n() const { return kernel.rows(); }
};

/// Fixed-point scaling state. coupling = diag(u) K diag(v); after
/// convergence the row sums match the second histogram argument and the
/// column sums the first.
struct TransportPlan {
  Mat coupling;
  Vec scaling_u;
  Vec scaling_v;
  int iterations_run = 0;
};

struct SinkhornResult {
  double distance = 0.0;  // <C, coupling>, no entropic terms
  TransportPlan plan;
};

/// Balanced scaling iterations: u starts at ones, then v = i0 / (K^T u)
/// and u = i1 / (K v) alternate for `iterations` rounds. Histograms
/// must each sum to 1. `early_stop_tol`, when positive, stops once
/// ||u - u_prev||_inf falls below it (inference only; keeps the
/// differentiated path at fixed depth).
SinkhornResult sinkhorn_distance(const GibbsKernel& k, const Vec& i0, const Vec& i1,
                                 int iterations, double early_stop_tol = 0.0);

/// Mass-relaxed variant: both scaling updates are raised elementwise to
/// rho/(rho+epsilon); histogram masses may differ.
SinkhornResult sinkhorn_unbalanced_distance(const GibbsKernel& k, const Vec& i0,
                                            const Vec& i1, int iterations,
                                            double early_stop_tol = 0.0);

/// Reference mass-relaxed barycenter of S histograms with simplex
/// weights, one scaling-vector pair per histogram, updated serially.
Vec barycenter_serial(const GibbsKernel& k, const std::vector<Vec>& patterns,
                      const Vec& lambda, int iterations);

/// J barycenters of the S pattern columns computed in one fused matrix
/// pipeline. Scaling matrices are stacked N x (J*S), barycenter j
/// occupying columns [j*S, (j+1)*S).
struct BarycenterBatch {
  Tensor result;     // J x N, row j = barycenter for weight row j
  Tensor scaling_u;  // N x (J*S)
  Tensor scaling_v;  // N x (J*S)

  Mat scaling_u_block(Eigen::Index j, Eigen::Index s) const;
  Mat scaling_v_block(Eigen::Index j, Eigen::Index s) const;
};

/// patterns: N x S with nonnegative columns; weights: J x S with rows
/// on the simplex. Differentiable with respect to both whenever they
/// are tape-tracked.
BarycenterBatch barycenter_batched(const GibbsKernel& k, const Tensor& patterns,
                                   const Tensor& weights, int iterations);

}  // namespace otge
