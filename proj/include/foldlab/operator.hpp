#pragma once

#include <memory>
#include <vector>

#include <Eigen/Dense>

#include "foldlab/amplitude.hpp"
#include "foldlab/grid.hpp"
#include "foldlab/kernels.hpp"
#include "foldlab/polynomial.hpp"

namespace foldlab {

using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;

// Node-count product up to which the kernel may be held densely.
constexpr std::size_t kDenseThreshold = std::size_t{1} << 22;
// Node-count product up to which a non-separable amplitude is cached.
constexpr std::size_t kAmplitudeCacheLimit = std::size_t{1} << 26;

enum class ApplyPath { Auto, Dense, MatrixFree, Reference };

struct DiscretizationPolicy {
  double points_per_wavelength = 8.0;
  std::size_t max_count = 8192;
  std::size_t min_count = 64;
};

// T u(x_i) = sum_j e^{i lambda S(x_i, t_j)} A(x_i, t_j) u_j w_t on tensor
// midpoint grids. Copies share the lazily built dense kernel and amplitude
// cache; all public members are safe to call concurrently.
class DiscreteOperator {
 public:
  DiscreteOperator(double lambda, PolynomialPhase phase, Amplitude amplitude, Grid grid_x, Grid grid_theta);

  double lambda() const { return lambda_; }
  const PolynomialPhase& phase() const { return *phase_; }
  const Amplitude& amplitude() const { return *amplitude_; }
  const Grid& grid_x() const { return gx_; }
  const Grid& grid_theta() const { return gt_; }
  std::size_t rows() const { return gx_.size(); }
  std::size_t cols() const { return gt_.size(); }
  double weight_x() const { return gx_.weight(); }
  double weight_theta() const { return gt_.weight(); }
  bool dense_eligible() const { return rows() * cols() <= kDenseThreshold; }

  // Unweighted kernel entry e^{i lambda S} A.
  Complex entry(std::size_t i, std::size_t j) const;

  CVector apply(const CVector& u, ApplyPath path = ApplyPath::Auto) const;
  CVector apply_adjoint(const CVector& v, ApplyPath path = ApplyPath::Auto) const;
  // Column-wise application to a block of vectors.
  CMatrix apply(const CMatrix& u, ApplyPath path = ApplyPath::Auto) const;
  CMatrix apply_adjoint(const CMatrix& v, ApplyPath path = ApplyPath::Auto) const;

  // Dense unweighted kernel (rows x cols); throws ConfigError above the threshold.
  const CMatrix& dense_kernel() const;
  // sqrt(w_x w_t) K, whose singular values approximate those of T.
  CMatrix symmetrized_dense() const;

  DiscreteOperator with_grids(Grid grid_x, Grid grid_theta) const;
  DiscreteOperator with_amplitude(Amplitude amplitude) const;
  DiscreteOperator refined() const { return with_grids(gx_.refined(), gt_.refined()); }

  kernels::KernelView view() const;

 private:
  struct Cache;
  ApplyPath resolve(ApplyPath path) const;
  CMatrix run(const CMatrix& in, ApplyPath path, bool adjoint) const;

  double lambda_;
  std::shared_ptr<const PolynomialPhase> phase_;
  std::shared_ptr<const Amplitude> amplitude_;
  Grid gx_, gt_;
  std::shared_ptr<Cache> cache_;
};

// Per-axis counts (x axes then theta axes) before and after clamping:
// next power of two >= p lambda G_a L_a / (2 pi), G_a the sampled sup of
// |dS/dp_a| over the box, clamped to [min_count, max_count].
struct AxisDemand {
  std::vector<std::size_t> requested;  // unclamped power of two
  std::vector<std::size_t> counts;
};
AxisDemand axis_demand(const PolynomialPhase& phase, const Box& box, double lambda, const DiscretizationPolicy& policy);

// Grids over the amplitude support with counts from axis_demand.
DiscreteOperator discretize(const PolynomialPhase& phase, const Amplitude& amplitude, double lambda,
                            const DiscretizationPolicy& policy = {});
// Same, with an explicit box (must contain the amplitude support).
DiscreteOperator discretize(const PolynomialPhase& phase, const Amplitude& amplitude, double lambda,
                            const DiscretizationPolicy& policy, const Box& box);
// Explicit per-axis counts over the amplitude support.
DiscreteOperator discretize_with_counts(const PolynomialPhase& phase, const Amplitude& amplitude, double lambda,
                                        std::span<const std::size_t> counts);

std::size_t next_pow2(double v);

}  // namespace foldlab
