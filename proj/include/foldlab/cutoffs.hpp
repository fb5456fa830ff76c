#pragma once

namespace foldlab {

// exp(-1/t) for t > 0, else 0.
double flat_exp(double t);

// C-infinity transition from 0 (u <= 0) to 1 (u >= 1).
double smooth01(double u);

// Dyadic cutoff calculus built from one smooth step s:
//   s(t)  = 0 for t <= 1.2, 1 for t >= 1.8
//   beta(t)     = s(2t) - s(t)   supported in [0.6, 1.8], == 1 on [0.9, 1.2]
//   beta_bar(t) = 1 - s(|t|)     == 1 on [-1.2, 1.2], supported in [-1.8, 1.8]
//   rho_plus(t) = 0 for t <= -1, 1 for t >= 1;  rho_minus = 1 - rho_plus
// so that sum_{N < No} beta(2^N t) + beta_bar(2^No t) telescopes to exactly 1.
class CutoffFamily {
 public:
  static constexpr double kStepLo = 1.2;
  static constexpr double kStepHi = 1.8;

  double step(double t) const { return smooth01((t - kStepLo) / (kStepHi - kStepLo)); }
  double beta(double t) const { return step(2.0 * t) - step(t); }
  // beta_+(t) = beta(t), beta_-(t) = beta(-t)
  double beta_signed(double t, int sign) const { return beta(sign > 0 ? t : -t); }
  double beta_bar(double t) const { return 1.0 - step(t < 0.0 ? -t : t); }
  double rho_plus(double t) const { return smooth01(0.5 * (t + 1.0)); }
  double rho_minus(double t) const { return 1.0 - rho_plus(t); }
  double rho(int sign, double t) const { return sign > 0 ? rho_plus(t) : rho_minus(t); }
};

CutoffFamily build_cutoffs();

// 1D lattice bump: == 1 on |u| <= 3/8, zero for |u| >= 5/8. Integer
// translates overlap by a quarter cell and sum to exactly 1.
double lattice_bump(double u);

}  // namespace foldlab
