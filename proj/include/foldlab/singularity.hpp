#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>

#include <Eigen/Dense>

#include "foldlab/grid.hpp"
#include "foldlab/phase.hpp"

namespace foldlab {

// pi_L : (x, t) -> (x, S_x),  pi_R : (x, t) -> (t, S_t)
enum class ProjectionSide { Left, Right };

std::string side_name(ProjectionSide side);

// Distinguished pair (x_n, t_n) in 0-based indices; the primed block is
// S_xt with row x_index and column theta_index removed.
struct CoordinateSplit {
  int x_index = 0;
  int theta_index = 0;
  double primed_det = 1.0;

  bool operator==(const CoordinateSplit& o) const { return x_index == o.x_index && theta_index == o.theta_index; }
};

constexpr double kDefaultRankTol = 1e-8;

// Number of singular values of m at or below tol_rank * sigma_max.
int corank(const Eigen::MatrixXd& m, double tol_rank = kDefaultRankTol);

// Corank of the full 2n x 2n differential of the projection at a point.
int projection_corank(const PhaseCalculus& calc, std::span<const double> point, ProjectionSide side,
                      double tol_rank = kDefaultRankTol);

// S_xt with row x_index and column theta_index removed.
Eigen::MatrixXd primed_block(const Eigen::MatrixXd& mixed, int x_index, int theta_index);
double primed_determinant(const Eigen::MatrixXd& mixed, int x_index, int theta_index);

// Split maximizing |det S_x't'| over all n^2 pairings. Throws
// DegenerateCoordinatesError when the corank of S_xt is 2 or more.
CoordinateSplit adapt_coordinates(const PhaseCalculus& calc, std::span<const double> point,
                                  double tol_rank = kDefaultRankTol);

// Tangent vector in (x, t)-space generating ker d(pi) on the critical variety.
//   right: K_R = d/dx_n - S_{x_n t'} (S_{x't'})^{-1} d/dx'
//   left:  K_L = d/dt_n - (S_{x't'})^{-1} S_{x' t_n} d/dt'
Eigen::VectorXd kernel_field(const PhaseCalculus& calc, std::span<const double> point, ProjectionSide side,
                             const CoordinateSplit& split);
Eigen::VectorXd kernel_field(const PhaseCalculus& calc, std::span<const double> point, ProjectionSide side);

// Optional positive multiplier applied to the kernel field (V -> phi V).
using FieldScale = std::function<double(std::span<const double>)>;

struct KernelDerivativeOptions {
  std::optional<CoordinateSplit> split;  // adapted at the point when empty
  double length_scale = 1.0;             // region size; scales the difference step
  FieldScale field_scale;                // identity when empty
};

// K^j h at the point: j = 1 uses the exact gradient of h; higher orders nest
// central differences of p -> grad h(p) . V(p) along V.
double iterated_kernel_derivative(const PhaseCalculus& calc, std::span<const double> point, ProjectionSide side,
                                  int j, const KernelDerivativeOptions& opts = {});

struct ClassifyOptions {
  double crit_tol = 1e-9;  // |h| at or below this counts as critical
  double rel_tol = 1e-6;   // K^j h is nonzero above rel_tol * local derivative scale
  int j_max = 6;
  KernelDerivativeOptions derivative;
};

// 0 off the critical variety, otherwise the smallest j <= j_max with
// K^j h != 0. Throws UnclassifiedSingularityError when none is found.
int classify_type(const PhaseCalculus& calc, std::span<const double> point, ProjectionSide side,
                  const ClassifyOptions& opts = {});

struct SingularityReport {
  ProjectionSide side = ProjectionSide::Right;
  std::size_t samples = 0;
  std::size_t critical_samples = 0;
  int max_corank = 0;
  int type_k = 0;
  double kappa = 0.0;
  bool rank_drops_simply = true;
  Box region;

  // Diagnostics not part of the serialized report.
  std::size_t unclassified_samples = 0;
  std::optional<CoordinateSplit> split;
  double crit_tol = 0.0;
  double min_grad_h = 0.0;
};

struct ScanOptions {
  double crit_rel_tol = 1e-9;  // crit_tol = crit_rel_tol * sup |h| over the samples
  double rel_tol = 1e-6;
  int j_max = 6;
  double tol_rank = kDefaultRankTol;
  bool project_onto_critical = true;  // Newton-project samples onto {h = 0}
};

SingularityReport scan_region(const PhaseCalculus& calc, ProjectionSide side, const Box& region,
                              std::size_t samples_per_axis, const ScanOptions& opts = {});

}  // namespace foldlab
