#include "foldlab/scaling.hpp"

#include <cmath>
#include <limits>
#include <random>

#include "foldlab/errors.hpp"

namespace foldlab {

int ScalingMaps::jacobian_exponent() const {
  int e = 0;
  for (int v : x_exps) e += v;
  for (int v : theta_exps) e += v;
  return e;
}

double ScalingMaps::jacobian_product() const { return std::pow(mu, jacobian_exponent()); }

std::vector<double> ScalingMaps::apply(std::span<const double> p) const {
  std::vector<double> out(p.begin(), p.end());
  for (std::size_t a = 0; a < out.size(); ++a) out[a] *= std::pow(mu, exponent(a));
  return out;
}

ScalingMaps scaling_maps(int k, int n, double mu) {
  if (k < 1 || n < 1) throw ConfigError("scaling maps need k >= 1 and n >= 1");
  if (n < k - 1) throw ConfigError("scaling maps need n >= k - 1");
  if (!(mu > 0.0)) throw ConfigError("scaling parameter must be positive");
  ScalingMaps m{k, n, mu, {}, {}};
  for (int j = 1; j <= n; ++j) m.x_exps.push_back(n - j + 1);
  for (int j = 1; j < n; ++j) m.theta_exps.push_back(2 * k + j - n);
  m.theta_exps.push_back(k);
  return m;
}

ScalingMaps scaling_maps(const ModelSpec& spec, double mu) {
  check_model(spec);
  switch (spec.kind) {
    case ModelKind::Cusp12: return scaling_maps(2, 1, mu);
    case ModelKind::Morin: return scaling_maps(spec.k, spec.n, mu);
    default: throw ConfigError(spec.name() + " is not a homogeneous model phase");
  }
}

double homogeneity_check(const PolynomialPhase& phase, const ScalingMaps& maps, std::size_t samples,
                         std::uint64_t seed) {
  if (phase.dim() != maps.n) throw ConfigError("phase and scaling maps disagree on n");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const double scale = std::pow(maps.mu, maps.degree());
  double worst = 0.0;
  std::vector<double> p(static_cast<std::size_t>(2 * maps.n));
  for (std::size_t s = 0; s < samples; ++s) {
    for (auto& v : p) v = u(rng);
    const double lhs = phase.evaluate(maps.apply(p));
    const double rhs = scale * phase.evaluate(p);
    double mag = 0.0;
    for (const auto& t : phase.terms()) {
      double m = std::abs(t.coeff);
      for (std::size_t a = 0; a < p.size(); ++a) m *= std::pow(std::abs(p[a]), t.exps[a]);
      mag += m;
    }
    mag *= scale;
    if (mag > 0.0) worst = std::max(worst, std::abs(lhs - rhs) / mag);
  }
  return worst;
}

double homogeneity_check(const ModelSpec& spec, double mu, std::size_t samples, std::uint64_t seed) {
  return homogeneity_check(make_model_phase(spec), scaling_maps(spec, mu), samples, seed);
}

TensorBump truncated_bump(const ScalingMaps& maps_R, const TensorBump& base) {
  base.validate();
  if (base.dims() != static_cast<std::size_t>(2 * maps_R.n)) throw ConfigError("bump dimension must be 2n");
  TensorBump b = base;
  for (std::size_t a = 0; a < b.dims(); ++a) {
    const double s = std::pow(maps_R.mu, maps_R.exponent(a));
    b.center[a] *= s;
    b.inner[a] *= s;
    b.outer[a] *= s;
  }
  return b;
}

DiscreteOperator truncated_operator(const ModelSpec& spec, double lambda, double R, const TensorBump& base,
                                    const DiscretizationPolicy& policy, const std::optional<Box>& max_box) {
  if (!(R >= 1.0)) throw ConfigError("truncation radius R must be >= 1");
  const Amplitude amp{truncated_bump(scaling_maps(spec, R), base), {}};
  if (max_box && !max_box->contains(amp.base.support()))
    throw ConfigError("dilated support exceeds the configured maximum box");
  return discretize(make_model_phase(spec), amp, lambda, policy);
}

double scaling_bound_exponent(int k, int n, double d) {
  return 0.5 * (n * (2 * k + 1) - k) - (2 * k + 1) * d;
}

ScalingBoundResult scaling_bound_check(const ModelSpec& spec, double lambda, const std::vector<double>& Rs, double d,
                                       const TensorBump& base, const RefineOptions& opts, double tolerance,
                                       double max_undersampling) {
  const auto m1 = scaling_maps(spec, 1.0);
  if (!(d > 0.0) || d > 0.5 * m1.n) throw ConfigError("d must lie in (0, n/2]");
  ScalingBoundResult res;
  res.bound_exponent = scaling_bound_exponent(m1.k, m1.n, d);
  const PolynomialPhase phase = make_model_phase(spec);
  for (double R : Rs) {
    if (!(R >= 1.0)) throw ConfigError("truncation radius R must be >= 1");
    const Amplitude amp{truncated_bump(scaling_maps(spec, R), base), {}};
    ScalingRow row;
    row.R = R;
    const auto demand = axis_demand(phase, amp.base.support(), lambda, opts.policy);
    for (std::size_t r : demand.requested)
      row.undersampling = std::max(row.undersampling, static_cast<double>(r) / static_cast<double>(opts.policy.max_count));
    if (row.undersampling <= max_undersampling) {
      row.estimate = refine_until_stable(phase, amp, lambda, opts);
      row.norm = row.estimate.sigma_max;
      row.stable = row.estimate.stable;
    } else {
      row.norm = std::numeric_limits<double>::quiet_NaN();
    }
    row.bound = std::pow(R, res.bound_exponent) * std::pow(lambda, -d);
    res.rows.push_back(std::move(row));
  }
  res.all_stable = !res.rows.empty();
  for (const auto& r : res.rows) res.all_stable = res.all_stable && r.stable;
  res.non_increasing = res.all_stable;
  for (std::size_t i = 1; i < res.rows.size(); ++i)
    if (res.rows[i].norm > (1.0 + tolerance) * res.rows[i - 1].norm) res.non_increasing = false;
  return res;
}

LowerBoundProbe lower_bound_probe(const DiscreteOperator& op, const NormEstimate& est, double d) {
  if (!est.converged) throw ConfigError("lower-bound probe needs a converged norm estimate");
  if (static_cast<std::size_t>(est.top_right.size()) != op.cols())
    throw ShapeError("top singular function does not live on this operator's theta grid");
  const CVector tu = op.apply(est.top_right);
  LowerBoundProbe p;
  p.sigma_max = est.sigma_max;
  p.u_norm = std::sqrt(op.weight_theta()) * est.top_right.norm();
  p.tu_norm = std::sqrt(op.weight_x()) * tu.norm();
  p.ratio = (p.tu_norm / p.u_norm) / std::pow(op.lambda(), -d);
  return p;
}

}  // namespace foldlab
