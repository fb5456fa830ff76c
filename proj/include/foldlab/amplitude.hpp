#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "foldlab/grid.hpp"

namespace foldlab {

// psi(x, t) = prod_a b_a(p_a) over the 2n coordinates, where each profile
// b_a is 1 for |p_a - c_a| <= inner_a and 0 for |p_a - c_a| >= outer_a.
struct TensorBump {
  std::vector<double> center;
  std::vector<double> inner;
  std::vector<double> outer;

  // Same radii on every coordinate.
  static TensorBump uniform(int n, double inner_radius = 0.5, double outer_radius = 1.0,
                            std::vector<double> center = {});

  std::size_t dims() const { return center.size(); }
  double profile(std::size_t axis, double v) const;
  double operator()(std::span<const double> p) const;
  // Closed support box.
  Box support() const;
  void validate() const;
};

// One multiplicative cutoff in the amplitude stack; values in [0, 1].
struct AmplitudeFactor {
  std::string label;
  std::function<double(std::span<const double>)> eval;
};

// Base bump times an ordered product of component factors.
struct Amplitude {
  TensorBump base;
  std::vector<AmplitudeFactor> factors;

  bool separable() const { return factors.empty(); }
  double factor_product(std::span<const double> p) const;
  double operator()(std::span<const double> p) const;
  Amplitude with_factor(AmplitudeFactor f) const;
};

}  // namespace foldlab
