#include "foldlab/amplitude.hpp"

#include <cmath>

#include "foldlab/cutoffs.hpp"
#include "foldlab/errors.hpp"

namespace foldlab {

TensorBump TensorBump::uniform(int n, double inner_radius, double outer_radius, std::vector<double> center) {
  const auto dims = static_cast<std::size_t>(2 * n);
  if (center.empty()) center.assign(dims, 0.0);
  TensorBump b{std::move(center), std::vector<double>(dims, inner_radius), std::vector<double>(dims, outer_radius)};
  b.validate();
  return b;
}

void TensorBump::validate() const {
  if (center.empty()) throw ConfigError("amplitude has no coordinates");
  if (inner.size() != center.size() || outer.size() != center.size())
    throw ConfigError("amplitude center/radius dimensions disagree");
  for (std::size_t a = 0; a < center.size(); ++a) {
    if (!(inner[a] >= 0.0)) throw ConfigError("amplitude inner radius must be >= 0");
    if (!(outer[a] > inner[a])) throw ConfigError("amplitude inner radius must be below the outer radius");
  }
}

double TensorBump::profile(std::size_t axis, double v) const {
  const double r = std::abs(v - center[axis]);
  if (r <= inner[axis]) return 1.0;
  if (r >= outer[axis]) return 0.0;
  return 1.0 - smooth01((r - inner[axis]) / (outer[axis] - inner[axis]));
}

double TensorBump::operator()(std::span<const double> p) const {
  double v = 1.0;
  for (std::size_t a = 0; a < center.size() && v != 0.0; ++a) v *= profile(a, p[a]);
  return v;
}

Box TensorBump::support() const {
  Box b;
  for (std::size_t a = 0; a < center.size(); ++a) {
    b.lo.push_back(center[a] - outer[a]);
    b.hi.push_back(center[a] + outer[a]);
  }
  return b;
}

double Amplitude::factor_product(std::span<const double> p) const {
  double v = 1.0;
  for (const auto& f : factors) {
    v *= f.eval(p);
    if (v == 0.0) break;
  }
  return v;
}

double Amplitude::operator()(std::span<const double> p) const {
  const double b = base(p);
  return b == 0.0 ? 0.0 : b * factor_product(p);
}

Amplitude Amplitude::with_factor(AmplitudeFactor f) const {
  Amplitude a = *this;
  a.factors.push_back(std::move(f));
  return a;
}

}  // namespace foldlab
