#include "foldlab/operator.hpp"

#include <cmath>
#include <mutex>
#include <numbers>

#include "foldlab/errors.hpp"

namespace foldlab {

using RowBlock = Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

struct DiscreteOperator::Cache {
  std::vector<double> row_profile, col_profile;
  std::once_flag amp_once;
  std::vector<double> amp;
  std::vector<std::uint8_t> mask;
  std::once_flag dense_once;
  CMatrix dense;
};

namespace {

Grid sub_grid(const Box& box, std::span<const std::size_t> counts, std::size_t first, std::size_t n) {
  std::vector<GridAxis> axes;
  for (std::size_t a = first; a < first + n; ++a) axes.push_back({box.lo[a], box.hi[a], counts[a]});
  return Grid(std::move(axes));
}

}  // namespace

DiscreteOperator::DiscreteOperator(double lambda, PolynomialPhase phase, Amplitude amplitude, Grid grid_x,
                                   Grid grid_theta)
    : lambda_(lambda),
      phase_(std::make_shared<const PolynomialPhase>(std::move(phase))),
      amplitude_(std::make_shared<const Amplitude>(std::move(amplitude))),
      gx_(std::move(grid_x)),
      gt_(std::move(grid_theta)),
      cache_(std::make_shared<Cache>()) {
  const auto n = static_cast<std::size_t>(phase_->dim());
  if (!(lambda_ >= 0.0) || !std::isfinite(lambda_)) throw ConfigError("lambda must be finite and >= 0");
  if (gx_.dims() != n || gt_.dims() != n) throw ConfigError("grid dimensions must equal the phase dimension");
  amplitude_->base.validate();
  if (amplitude_->base.dims() != 2 * n) throw ConfigError("amplitude dimension must be 2n");
  Box box = gx_.box();
  const Box bt = gt_.box();
  box.lo.insert(box.lo.end(), bt.lo.begin(), bt.lo.end());
  box.hi.insert(box.hi.end(), bt.hi.begin(), bt.hi.end());
  if (!box.contains(amplitude_->base.support())) throw ConfigError("amplitude support exceeds the grid box");
  if (amplitude_->separable()) {
    cache_->row_profile = kernels::axis_profile_product(amplitude_->base, gx_, 0);
    cache_->col_profile = kernels::axis_profile_product(amplitude_->base, gt_, n);
  }
}

kernels::KernelView DiscreteOperator::view() const {
  kernels::KernelView kv;
  kv.phase = phase_.get();
  kv.lambda = lambda_;
  kv.gx = &gx_;
  kv.gt = &gt_;
  kv.amplitude = amplitude_.get();
  if (amplitude_->separable()) {
    kv.mode = kernels::AmplitudeMode::Separable;
    kv.row_profile = &cache_->row_profile;
    kv.col_profile = &cache_->col_profile;
  } else if (rows() * cols() <= kAmplitudeCacheLimit) {
    kernels::KernelView generic = kv;
    std::call_once(cache_->amp_once, [&] { kernels::materialize_amplitude(generic, cache_->amp, cache_->mask); });
    kv.mode = kernels::AmplitudeMode::Cached;
    kv.amp_cache = &cache_->amp;
    kv.block_mask = &cache_->mask;
  } else {
    kv.mode = kernels::AmplitudeMode::Generic;
  }
  return kv;
}

Complex DiscreteOperator::entry(std::size_t i, std::size_t j) const {
  kernels::KernelView kv;
  kv.phase = phase_.get();
  kv.lambda = lambda_;
  kv.gx = &gx_;
  kv.gt = &gt_;
  kv.amplitude = amplitude_.get();
  return kernels::entry(kv, i, j);
}

const CMatrix& DiscreteOperator::dense_kernel() const {
  if (!dense_eligible()) throw ConfigError("operator exceeds the dense threshold");
  std::call_once(cache_->dense_once, [&] {
    kernels::KernelView kv;
    kv.phase = phase_.get();
    kv.lambda = lambda_;
    kv.gx = &gx_;
    kv.gt = &gt_;
    kv.amplitude = amplitude_.get();
    const auto k = kernels::materialize_kernel(kv);
    cache_->dense = Eigen::Map<const RowBlock>(k.data(), static_cast<Eigen::Index>(rows()),
                                               static_cast<Eigen::Index>(cols()));
  });
  return cache_->dense;
}

CMatrix DiscreteOperator::symmetrized_dense() const {
  return dense_kernel() * std::sqrt(weight_x() * weight_theta());
}

ApplyPath DiscreteOperator::resolve(ApplyPath path) const {
  if (path == ApplyPath::Auto) return dense_eligible() ? ApplyPath::Dense : ApplyPath::MatrixFree;
  return path;
}

CMatrix DiscreteOperator::run(const CMatrix& in, ApplyPath path, bool adjoint) const {
  const std::size_t expect = adjoint ? rows() : cols();
  if (static_cast<std::size_t>(in.rows()) != expect)
    throw ShapeError("vector length " + std::to_string(in.rows()) + " does not match grid node count " +
                     std::to_string(expect));
  path = resolve(path);
  if (path == ApplyPath::Dense) {
    const CMatrix& k = dense_kernel();
    if (adjoint) return weight_x() * (k.adjoint() * in);
    return weight_theta() * (k * in);
  }
  const auto b = static_cast<std::size_t>(in.cols());
  const RowBlock src = in;
  RowBlock dst(static_cast<Eigen::Index>(adjoint ? cols() : rows()), in.cols());
  if (path == ApplyPath::Reference) {
    kernels::KernelView kv;
    kv.phase = phase_.get();
    kv.lambda = lambda_;
    kv.gx = &gx_;
    kv.gt = &gt_;
    kv.amplitude = amplitude_.get();
    if (adjoint)
      kernels::adjoint_reference(kv, src.data(), b, dst.data());
    else
      kernels::forward_reference(kv, src.data(), b, dst.data());
  } else {
    const auto kv = view();
    if (adjoint)
      kernels::adjoint(kv, src.data(), b, dst.data());
    else
      kernels::forward(kv, src.data(), b, dst.data());
  }
  return CMatrix(dst) * (adjoint ? weight_x() : weight_theta());
}

CVector DiscreteOperator::apply(const CVector& u, ApplyPath path) const { return run(u, path, false); }
CVector DiscreteOperator::apply_adjoint(const CVector& v, ApplyPath path) const { return run(v, path, true); }
CMatrix DiscreteOperator::apply(const CMatrix& u, ApplyPath path) const { return run(u, path, false); }
CMatrix DiscreteOperator::apply_adjoint(const CMatrix& v, ApplyPath path) const { return run(v, path, true); }

DiscreteOperator DiscreteOperator::with_grids(Grid grid_x, Grid grid_theta) const {
  return DiscreteOperator(lambda_, *phase_, *amplitude_, std::move(grid_x), std::move(grid_theta));
}

DiscreteOperator DiscreteOperator::with_amplitude(Amplitude amplitude) const {
  return DiscreteOperator(lambda_, *phase_, std::move(amplitude), gx_, gt_);
}

std::size_t next_pow2(double v) {
  std::size_t p = 1;
  while (static_cast<double>(p) < v) p <<= 1;
  return p;
}

AxisDemand axis_demand(const PolynomialPhase& phase, const Box& box, double lambda,
                       const DiscretizationPolicy& policy) {
  const int nv = phase.num_vars();
  if (box.dims() != static_cast<std::size_t>(nv)) throw ConfigError("box dimension must be 2n");
  if (!(policy.points_per_wavelength > 0.0)) throw ConfigError("points per wavelength must be positive");
  std::vector<PolynomialPhase> grads;
  for (int v = 0; v < nv; ++v) grads.push_back(phase.derivative(v));
  const std::size_t m = std::clamp<std::size_t>(
      static_cast<std::size_t>(std::pow(2.0e5, 1.0 / nv)), 3, 33);
  std::size_t total = 1;
  for (int v = 0; v < nv; ++v) total *= m;
  std::vector<double> gsup(nv, 0.0), p(nv);
  for (std::size_t idx = 0; idx < total; ++idx) {
    std::size_t rem = idx;
    for (int v = nv; v-- > 0;) {
      const double t = static_cast<double>(rem % m) / static_cast<double>(m - 1);
      rem /= m;
      p[v] = box.lo[v] + t * (box.hi[v] - box.lo[v]);
    }
    for (int v = 0; v < nv; ++v) gsup[v] = std::max(gsup[v], std::abs(grads[v].evaluate(p)));
  }
  AxisDemand d;
  for (int v = 0; v < nv; ++v) {
    const double want = policy.points_per_wavelength * lambda * gsup[v] * (box.hi[v] - box.lo[v]) /
                        (2.0 * std::numbers::pi);
    d.requested.push_back(next_pow2(want));
    d.counts.push_back(std::max(policy.min_count, std::min(policy.max_count, d.requested.back())));
  }
  return d;
}

DiscreteOperator discretize_with_counts(const PolynomialPhase& phase, const Amplitude& amplitude, double lambda,
                                        std::span<const std::size_t> counts) {
  const auto n = static_cast<std::size_t>(phase.dim());
  if (counts.size() != 2 * n) throw ConfigError("need one count per coordinate");
  const Box box = amplitude.base.support();
  return DiscreteOperator(lambda, phase, amplitude, sub_grid(box, counts, 0, n), sub_grid(box, counts, n, n));
}

DiscreteOperator discretize(const PolynomialPhase& phase, const Amplitude& amplitude, double lambda,
                            const DiscretizationPolicy& policy, const Box& box) {
  const auto n = static_cast<std::size_t>(phase.dim());
  if (box.dims() != 2 * n) throw ConfigError("box dimension must be 2n");
  if (!box.contains(amplitude.base.support())) throw ConfigError("amplitude support exceeds the grid box");
  const auto d = axis_demand(phase, box, lambda, policy);
  return DiscreteOperator(lambda, phase, amplitude, sub_grid(box, d.counts, 0, n), sub_grid(box, d.counts, n, n));
}

DiscreteOperator discretize(const PolynomialPhase& phase, const Amplitude& amplitude, double lambda,
                            const DiscretizationPolicy& policy) {
  amplitude.base.validate();
  return discretize(phase, amplitude, lambda, policy, amplitude.base.support());
}

}  // namespace foldlab
