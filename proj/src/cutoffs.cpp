#include "foldlab/cutoffs.hpp"

#include <cmath>

namespace foldlab {

double flat_exp(double t) { return t > 0.0 ? std::exp(-1.0 / t) : 0.0; }

double smooth01(double u) {
  if (u <= 0.0) return 0.0;
  if (u >= 1.0) return 1.0;
  const double a = flat_exp(u);
  return a / (a + flat_exp(1.0 - u));
}

CutoffFamily build_cutoffs() { return CutoffFamily{}; }

double lattice_bump(double u) {
  // With t = u + 5/8 in [0, 1/4] rising and [1, 5/4] falling, neighbours
  // are complementary: rise(t) + fall(t + 1) = 1 on the overlap.
  const double a = std::abs(u);
  if (a <= 0.375) return 1.0;
  if (a >= 0.625) return 0.0;
  return 1.0 - smooth01((a - 0.375) / 0.25);
}

}  // namespace foldlab
