#include "foldlab/phase.hpp"

#include "foldlab/errors.hpp"

namespace foldlab {

std::string model_kind_name(ModelKind kind) {
  switch (kind) {
    case ModelKind::Cusp12: return "cusp12";
    case ModelKind::Morin: return "morin";
    case ModelKind::Nondegenerate: return "nondegenerate";
    case ModelKind::FoldFold: return "foldfold";
  }
  return "?";
}

std::optional<ModelKind> parse_model_kind(const std::string& name) {
  if (name == "cusp12") return ModelKind::Cusp12;
  if (name == "morin") return ModelKind::Morin;
  if (name == "nondegenerate") return ModelKind::Nondegenerate;
  if (name == "foldfold") return ModelKind::FoldFold;
  return std::nullopt;
}

std::string ModelSpec::name() const {
  switch (kind) {
    case ModelKind::Cusp12: return "cusp12";
    case ModelKind::FoldFold: return "foldfold";
    case ModelKind::Morin: return "morin(" + std::to_string(k) + "," + std::to_string(n) + ")";
    case ModelKind::Nondegenerate: return "nondegenerate(" + std::to_string(n) + ")";
  }
  return "?";
}

void check_model(const ModelSpec& spec) {
  switch (spec.kind) {
    case ModelKind::Cusp12:
    case ModelKind::FoldFold:
      if (spec.n != 1) throw ConfigError(spec.name() + " is defined for n = 1 only");
      break;
    case ModelKind::Nondegenerate:
      if (spec.n < 1) throw ConfigError("nondegenerate model needs n >= 1");
      break;
    case ModelKind::Morin:
      if (spec.k < 1) throw ConfigError("morin model needs k >= 1");
      if (spec.n < 1) throw ConfigError("morin model needs n >= 1");
      if (spec.n < spec.k - 1)
        throw ConfigError("morin(k=" + std::to_string(spec.k) + ", n=" + std::to_string(spec.n) +
                          ") violates n >= k - 1");
      break;
  }
}

PolynomialPhase make_model_phase(const ModelSpec& spec) {
  check_model(spec);
  const int n = spec.n;
  std::vector<Term> terms;
  auto exps = [n]() { return std::vector<int>(2 * n, 0); };
  switch (spec.kind) {
    case ModelKind::Cusp12: {
      terms.push_back({1.0, {3, 1}});
      terms.push_back({-1.0, {1, 2}});
      break;
    }
    case ModelKind::FoldFold: {
      // (x - t)^3 / 3 = x^3/3 - x^2 t + x t^2 - t^3/3
      terms.push_back({1.0 / 3.0, {3, 0}});
      terms.push_back({-1.0, {2, 1}});
      terms.push_back({1.0, {1, 2}});
      terms.push_back({-1.0 / 3.0, {0, 3}});
      break;
    }
    case ModelKind::Nondegenerate: {
      for (int i = 0; i < n; ++i) {
        auto e = exps();
        e[x_var(i)] = 1;
        e[theta_var(n, i)] = 1;
        terms.push_back({1.0, e});
      }
      break;
    }
    case ModelKind::Morin: {
      const int k = spec.k;
      const int xn = x_var(n - 1);
      const int tn = theta_var(n, n - 1);
      auto lead = exps();
      lead[xn] = k + 1;
      lead[tn] = 1;
      terms.push_back({1.0, lead});
      // x_n^{k-m} x_{n-m} t_n for m = 1 .. k-2
      for (int m = 1; m <= k - 2; ++m) {
        auto e = exps();
        e[xn] = k - m;
        e[x_var(n - 1 - m)] = 1;
        e[tn] = 1;
        terms.push_back({1.0, e});
      }
      auto quad = exps();
      quad[xn] = 1;
      quad[tn] = 2;
      terms.push_back({0.5, quad});
      for (int i = 0; i + 1 < n; ++i) {
        auto e = exps();
        e[x_var(i)] = 1;
        e[theta_var(n, i)] = 1;
        terms.push_back({1.0, e});
      }
      break;
    }
  }
  return PolynomialPhase(n, std::move(terms));
}

PolynomialPhase make_model_phase(ModelKind kind, int k, int n) { return make_model_phase(ModelSpec{kind, k, n}); }

PolynomialPhase polynomial_determinant(const std::vector<PolynomialPhase>& entries, int size) {
  if (size == 0) throw ConfigError("empty polynomial determinant");
  const int nvars = entries.front().dim();
  if (size == 1) return entries[0];
  PolynomialPhase det = PolynomialPhase::constant(nvars, 0.0);
  for (int col = 0; col < size; ++col) {
    std::vector<PolynomialPhase> minor;
    minor.reserve(static_cast<std::size_t>((size - 1) * (size - 1)));
    for (int r = 1; r < size; ++r)
      for (int c = 0; c < size; ++c)
        if (c != col) minor.push_back(entries[r * size + c]);
    PolynomialPhase cof = entries[col] * polynomial_determinant(minor, size - 1);
    if (col % 2 == 0)
      det += cof;
    else
      det -= cof;
  }
  return det;
}

PhaseCalculus::PhaseCalculus(PolynomialPhase phase) : phase_(std::move(phase)) {
  const int n = phase_.dim();
  for (int i = 0; i < n; ++i) s_x_.push_back(phase_.derivative(x_var(i)));
  for (int j = 0; j < n; ++j) s_theta_.push_back(phase_.derivative(theta_var(n, j)));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) s_xtheta_.push_back(s_x_[i].derivative(theta_var(n, j)));
  h_ = polynomial_determinant(s_xtheta_, n);
  for (int v = 0; v < 2 * n; ++v) dh_.push_back(h_.derivative(v));
}

Eigen::MatrixXd PhaseCalculus::mixed_hessian(std::span<const double> point) const {
  const int n = dim();
  Eigen::MatrixXd m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m(i, j) = s_xtheta_[i * n + j].evaluate(point);
  return m;
}

Eigen::VectorXd PhaseCalculus::grad_h(std::span<const double> point) const {
  Eigen::VectorXd g(2 * dim());
  for (int v = 0; v < 2 * dim(); ++v) g(v) = dh_[v].evaluate(point);
  return g;
}

PhaseJet PhaseCalculus::jet(std::span<const double> x, std::span<const double> theta) const {
  const int n = dim();
  std::vector<double> point(x.begin(), x.end());
  point.insert(point.end(), theta.begin(), theta.end());
  PhaseJet j;
  j.value = phase_.evaluate(point);
  j.grad_x.resize(n);
  j.grad_theta.resize(n);
  for (int i = 0; i < n; ++i) {
    j.grad_x(i) = s_x_[i].evaluate(point);
    j.grad_theta(i) = s_theta_[i].evaluate(point);
  }
  j.mixed_hessian = mixed_hessian(point);
  j.h = j.mixed_hessian.determinant();
  return j;
}

PhaseJet jet(const PolynomialPhase& phase, std::span<const double> x, std::span<const double> theta) {
  return PhaseCalculus(phase).jet(x, theta);
}

}  // namespace foldlab
