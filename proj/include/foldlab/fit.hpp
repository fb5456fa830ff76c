#pragma once

#include <cstdint>
#include <vector>

namespace foldlab {

// Least squares y = intercept + slope x.
struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double rms = 0.0;  // root mean square residual
  std::size_t points = 0;
};

LinearFit linear_fit(const std::vector<double>& x, const std::vector<double>& y);

// norm ~ c lambda^{-d}: fit of log norm against log lambda.
struct PowerLawFit {
  double d = 0.0;
  double log_c = 0.0;
  double rms = 0.0;
  std::size_t points = 0;
};

PowerLawFit power_law_fit(const std::vector<double>& lambda, const std::vector<double>& norm);

// Synthetic data c lambda^{-d0} with multiplicative noise (1 + noise N(0,1)).
std::vector<double> synthetic_power_law(const std::vector<double>& lambda, double c, double d0, double noise,
                                        std::uint64_t seed);

}  // namespace foldlab
