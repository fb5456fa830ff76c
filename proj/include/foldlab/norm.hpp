#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "foldlab/operator.hpp"

namespace foldlab {

struct NormOptions {
  double tol = 1e-9;
  int max_iter = 5000;
  std::uint64_t seed = 1;
  int block = 4;
  ApplyPath path = ApplyPath::Auto;
  // Optional starting block in symmetrized theta coordinates.
  const CMatrix* warm_start = nullptr;
  // Relative change accepted once successive changes shrink by less than 1%.
  double flat_tol = 1e-7;
};

struct RefinementStep {
  std::vector<std::size_t> counts;
  double sigma_max = 0.0;
  int iterations = 0;
  bool converged = false;
};

struct NormEstimate {
  double sigma_max = 0.0;
  int iterations = 0;
  double residual = 0.0;  // relative change of the top Ritz value at stop
  bool converged = false;
  bool stable = false;    // set by refine_until_stable
  std::size_t grid_x = 0;
  std::size_t grid_theta = 0;
  std::vector<std::size_t> counts;
  std::vector<RefinementStep> history;
  CVector top_right;  // top right singular function on the theta grid
  CMatrix basis;      // final Ritz block, symmetrized theta coordinates
};

// Block subspace iteration with Rayleigh-Ritz on M^H M, M = W_x^{1/2} K W_t^{1/2}.
NormEstimate operator_norm(const DiscreteOperator& op, const NormOptions& opts = {});

// All singular values of M, descending; dense-eligible operators only.
Eigen::VectorXd dense_oracle(const DiscreteOperator& op);
Eigen::VectorXd dense_singular_values(const CMatrix& m);

// sqrt(sum |K_ij|^2 w_x w_t) >= sigma_max.
double hilbert_schmidt_bound(const DiscreteOperator& op);

struct RefineOptions {
  DiscretizationPolicy policy;
  double stability_tol = 1e-3;
  NormOptions norm;
};

// Per-axis starting counts: one eighth of the policy demand, clamped to
// [min_count, max(min_count, max_count / 4)].
std::vector<std::size_t> refinement_start(const AxisDemand& demand, const DiscretizationPolicy& policy);

// Doubles the per-axis counts until the last two estimates agree to
// stability_tol or every axis is at max_count.
NormEstimate refine_until_stable(const PolynomialPhase& phase, const Amplitude& amplitude, double lambda,
                                 const RefineOptions& opts = {});

// Piecewise-constant transfer of grid functions to a finer grid on the same box.
CMatrix prolong(const Grid& coarse, const Grid& fine, const CMatrix& values);

}  // namespace foldlab
