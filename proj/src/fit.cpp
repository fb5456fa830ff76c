#include "foldlab/fit.hpp"

#include <cmath>
#include <random>

#include "foldlab/errors.hpp"

namespace foldlab {

LinearFit linear_fit(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw ShapeError("fit inputs differ in length");
  if (x.size() < 2) throw ConfigError("fit needs at least two points");
  const double m = static_cast<double>(x.size());
  double sx = 0.0, sy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
  }
  const double mx = sx / m, my = sy / m;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (!(sxx > 0.0)) throw ConfigError("fit abscissae are all equal");
  LinearFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  f.points = x.size();
  double ss = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - (f.intercept + f.slope * x[i]);
    ss += r * r;
  }
  f.rms = std::sqrt(ss / m);
  return f;
}

PowerLawFit power_law_fit(const std::vector<double>& lambda, const std::vector<double>& norm) {
  if (lambda.size() != norm.size()) throw ShapeError("fit inputs differ in length");
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < lambda.size(); ++i) {
    if (!(lambda[i] > 0.0) || !(norm[i] > 0.0)) throw ConfigError("power-law fit needs positive data");
    lx.push_back(std::log(lambda[i]));
    ly.push_back(std::log(norm[i]));
  }
  const LinearFit f = linear_fit(lx, ly);
  return {-f.slope, f.intercept, f.rms, f.points};
}

std::vector<double> synthetic_power_law(const std::vector<double>& lambda, double c, double d0, double noise,
                                        std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  std::vector<double> out;
  out.reserve(lambda.size());
  for (double l : lambda) out.push_back(c * std::pow(l, -d0) * (1.0 + noise * g(rng)));
  return out;
}

}  // namespace foldlab
