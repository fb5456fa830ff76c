#pragma once

#include <span>
#include <string>
#include <vector>

namespace foldlab {

// One monomial coeff * x_1^e_1 ... x_n^e_n * theta_1^e_{n+1} ... theta_n^e_{2n}.
struct Term {
  double coeff = 0.0;
  std::vector<int> exps;

  bool operator==(const Term&) const = default;
};

inline double ipow(double base, int e) {
  double r = 1.0;
  while (e > 0) {
    if (e & 1) r *= base;
    base *= base;
    e >>= 1;
  }
  return r;
}

// Index of x_i / theta_j (0-based) in the combined variable vector (x, theta).
constexpr int x_var(int i) { return i; }
constexpr int theta_var(int n, int j) { return n + j; }

// Exact multivariate polynomial in (x, theta) in R^n x R^n.
//
// Terms are kept in canonical form: sorted by exponent vector, duplicates
// merged, and coefficients with magnitude below 1e-300 dropped. Two phases
// compare equal iff their canonical term lists match.
class PolynomialPhase {
 public:
  PolynomialPhase() = default;
  PolynomialPhase(int n, std::vector<Term> terms);

  static PolynomialPhase constant(int n, double c);
  static PolynomialPhase monomial(int n, double coeff, std::vector<int> exps);

  int dim() const { return n_; }
  int num_vars() const { return 2 * n_; }
  const std::vector<Term>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }

  int degree() const;
  int degree_in(int var) const;

  // vars = (x_1..x_n, theta_1..theta_n).
  double evaluate(std::span<const double> vars) const;
  double operator()(std::span<const double> x, std::span<const double> theta) const;

  // Exact formal partial derivative in variable `var` (0-based, < 2n).
  PolynomialPhase derivative(int var) const;

  // Coefficients c_0..c_d of the univariate polynomial t -> S(vars with
  // vars[var] replaced by t). The entry vars[var] itself is ignored.
  std::vector<double> restrict_to(int var, std::span<const double> vars) const;

  PolynomialPhase& operator+=(const PolynomialPhase& other);
  PolynomialPhase& operator-=(const PolynomialPhase& other);
  PolynomialPhase& operator*=(double s);

  friend PolynomialPhase operator+(PolynomialPhase a, const PolynomialPhase& b) { return a += b; }
  friend PolynomialPhase operator-(PolynomialPhase a, const PolynomialPhase& b) { return a -= b; }
  friend PolynomialPhase operator*(PolynomialPhase a, double s) { return a *= s; }
  friend PolynomialPhase operator*(double s, PolynomialPhase a) { return a *= s; }
  friend PolynomialPhase operator*(const PolynomialPhase& a, const PolynomialPhase& b);

  bool operator==(const PolynomialPhase&) const = default;

  // Human-readable form, e.g. "x^3*t - x*t^2" (n=1) or "x1*t1 + x2*t2".
  std::string to_string() const;

 private:
  void normalize();

  int n_ = 0;
  std::vector<Term> terms_;
};

}  // namespace foldlab
