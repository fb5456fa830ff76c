#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "foldlab/norm.hpp"
#include "foldlab/phase.hpp"

namespace foldlab {

// X_mu(x)_j = mu^{n-j+1} x_j, Theta_mu(t)_j = mu^{2k+j-n} t_j (j < n), mu^k t_n
// (1-based j), under which the morin(k, n) phase is homogeneous of degree 2k+1.
struct ScalingMaps {
  int k = 2;
  int n = 1;
  double mu = 1.0;
  std::vector<int> x_exps;
  std::vector<int> theta_exps;

  int degree() const { return 2 * k + 1; }
  // Exponent of mu in det dX_mu * det dTheta_mu; equals n(2k+1) - k.
  int jacobian_exponent() const;
  double jacobian_product() const;
  // (X_mu(x), Theta_mu(t)) for p = (x, t).
  std::vector<double> apply(std::span<const double> p) const;
  // Exponent of mu on coordinate a of (x, t).
  int exponent(std::size_t a) const { return a < x_exps.size() ? x_exps[a] : theta_exps[a - x_exps.size()]; }
};

ScalingMaps scaling_maps(int k, int n, double mu);
// cusp12 uses the morin(2, 1) maps (mu x, mu^2 t); other non-morin models are rejected.
ScalingMaps scaling_maps(const ModelSpec& spec, double mu);

// max over seeded samples in [-1,1]^{2n} of
// |S(X x, Theta t) - mu^{2k+1} S(x, t)| / (mu^{2k+1} sum_terms |c x^a t^b|).
double homogeneity_check(const PolynomialPhase& phase, const ScalingMaps& maps, std::size_t samples,
                         std::uint64_t seed);
double homogeneity_check(const ModelSpec& spec, double mu, std::size_t samples, std::uint64_t seed);

// psi(X_{1/R} x, Theta_{1/R} t): the base tensor bump dilated by R^{exponent}.
TensorBump truncated_bump(const ScalingMaps& maps_R, const TensorBump& base);

// T_{lambda,R}; rejected when the dilated support leaves max_box.
DiscreteOperator truncated_operator(const ModelSpec& spec, double lambda, double R, const TensorBump& base,
                                    const DiscretizationPolicy& policy = {},
                                    const std::optional<Box>& max_box = std::nullopt);

struct ScalingRow {
  double R = 1.0;
  double norm = 0.0;
  double bound = 0.0;  // R^{(n(2k+1)-k)/2 - (2k+1)d} lambda^{-d}
  bool stable = false;
  // Largest per-axis ratio of requested to max_count nodes; rows above the
  // limit are not computed (norm NaN, unstable).
  double undersampling = 0.0;
  NormEstimate estimate;
};

struct ScalingBoundResult {
  std::vector<ScalingRow> rows;
  double bound_exponent = 0.0;  // exponent of R in the bound
  bool non_increasing = false;  // over stable rows, within the tolerance
  bool all_stable = false;
};

double scaling_bound_exponent(int k, int n, double d);

ScalingBoundResult scaling_bound_check(const ModelSpec& spec, double lambda, const std::vector<double>& Rs, double d,
                                       const TensorBump& base, const RefineOptions& opts = {},
                                       double tolerance = 0.10, double max_undersampling = 64.0);

struct LowerBoundProbe {
  double ratio = 0.0;  // |T u| / (lambda^{-d} |u|), weighted norms
  double sigma_max = 0.0;
  double u_norm = 0.0;
  double tu_norm = 0.0;
};

// Uses the top right singular function of a converged estimate as the witness.
LowerBoundProbe lower_bound_probe(const DiscreteOperator& op, const NormEstimate& est, double d);

}  // namespace foldlab
