#pragma once

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "foldlab/polynomial.hpp"

namespace foldlab {

enum class ModelKind { Cusp12, Morin, Nondegenerate, FoldFold };

struct ModelSpec {
  ModelKind kind = ModelKind::Cusp12;
  int k = 2;
  int n = 1;

  std::string name() const;
  bool operator==(const ModelSpec&) const = default;
};

std::optional<ModelKind> parse_model_kind(const std::string& name);
std::string model_kind_name(ModelKind kind);

// Throws ConfigError when (k, n) violates the model's constraints
// (cusp12 and foldfold need n = 1; morin needs k >= 1 and n >= k - 1).
void check_model(const ModelSpec& spec);

//   cusp12          x^3 t - x t^2
//   morin(k, n)     (x_n^{k+1} + x_n^{k-1} x_{n-1} + ... + x_n^2 x_{n-k+2}) t_n
//                     + x_n t_n^2 / 2 + x'.t'
//   nondegenerate   x . t
//   foldfold        (x - t)^3 / 3
PolynomialPhase make_model_phase(const ModelSpec& spec);
PolynomialPhase make_model_phase(ModelKind kind, int k, int n);

struct PhaseJet {
  double value = 0.0;
  Eigen::VectorXd grad_x;
  Eigen::VectorXd grad_theta;
  Eigen::MatrixXd mixed_hessian;  // (i, j) = d^2 S / dx_i dtheta_j
  double h = 0.0;                 // det of mixed_hessian
};

// S together with the derivative polynomials needed by the classifier and the
// cutoff calculus. Immutable after construction.
class PhaseCalculus {
 public:
  explicit PhaseCalculus(PolynomialPhase phase);

  int dim() const { return phase_.dim(); }
  const PolynomialPhase& phase() const { return phase_; }
  const PolynomialPhase& dx(int i) const { return s_x_[i]; }
  const PolynomialPhase& dtheta(int j) const { return s_theta_[j]; }
  const PolynomialPhase& dxdtheta(int i, int j) const { return s_xtheta_[i * dim() + j]; }
  // h = det S_{x theta} as an exact polynomial.
  const PolynomialPhase& h() const { return h_; }
  // d h / d var, var indexing (x, theta).
  const PolynomialPhase& dh(int var) const { return dh_[var]; }

  PhaseJet jet(std::span<const double> x, std::span<const double> theta) const;
  Eigen::MatrixXd mixed_hessian(std::span<const double> point) const;
  double h_at(std::span<const double> point) const { return h_.evaluate(point); }
  Eigen::VectorXd grad_h(std::span<const double> point) const;

 private:
  PolynomialPhase phase_;
  std::vector<PolynomialPhase> s_x_;
  std::vector<PolynomialPhase> s_theta_;
  std::vector<PolynomialPhase> s_xtheta_;
  PolynomialPhase h_;
  std::vector<PolynomialPhase> dh_;
};

using PhaseCalculusPtr = std::shared_ptr<const PhaseCalculus>;

inline PhaseCalculusPtr make_calculus(PolynomialPhase phase) {
  return std::make_shared<const PhaseCalculus>(std::move(phase));
}

PhaseJet jet(const PolynomialPhase& phase, std::span<const double> x, std::span<const double> theta);

// Determinant of a square matrix of polynomials (Laplace expansion).
PolynomialPhase polynomial_determinant(const std::vector<PolynomialPhase>& entries, int size);

}  // namespace foldlab
