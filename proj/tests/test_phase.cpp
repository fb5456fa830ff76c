#include <doctest.h>

#include <random>

#include "foldlab/errors.hpp"
#include "foldlab/phase.hpp"

using namespace foldlab;

TEST_CASE("model phases") {
  CHECK(make_model_phase(ModelKind::Cusp12, 2, 1) == PolynomialPhase(1, {{1.0, {3, 1}}, {-1.0, {1, 2}}}));
  CHECK(make_model_phase(ModelKind::Nondegenerate, 1, 2) ==
        PolynomialPhase(2, {{1.0, {1, 0, 1, 0}}, {1.0, {0, 1, 0, 1}}}));
  CHECK(make_model_phase(ModelKind::Morin, 2, 1) == PolynomialPhase(1, {{1.0, {3, 1}}, {0.5, {1, 2}}}));
  // x2^4 t2 + x2^2 x1 t2 + x2 t2^2/2 + x1 t1
  CHECK(make_model_phase(ModelKind::Morin, 3, 2) ==
        PolynomialPhase(2, {{1.0, {0, 4, 0, 1}}, {1.0, {1, 2, 0, 1}}, {0.5, {0, 1, 0, 2}}, {1.0, {1, 0, 1, 0}}}));
  CHECK_THROWS_AS(make_model_phase(ModelKind::Morin, 3, 1), ConfigError);
  CHECK_THROWS_AS(make_model_phase(ModelKind::Cusp12, 2, 2), ConfigError);
}

TEST_CASE("differentiation") {
  const auto S = make_model_phase(ModelKind::Cusp12, 2, 1);
  const auto Sx = S.derivative(0);
  CHECK(Sx == PolynomialPhase(1, {{3.0, {2, 1}}, {-1.0, {0, 2}}}));
  CHECK(Sx.derivative(1) == PolynomialPhase(1, {{3.0, {2, 0}}, {-2.0, {0, 1}}}));
  CHECK(PolynomialPhase::constant(1, 5.0).derivative(0).is_zero());
}

TEST_CASE("mixed partials commute") {
  for (auto spec : {ModelSpec{ModelKind::Morin, 3, 2}, ModelSpec{ModelKind::FoldFold, 1, 1},
                    ModelSpec{ModelKind::Morin, 2, 3}}) {
    const auto S = make_model_phase(spec);
    for (int a = 0; a < S.num_vars(); ++a)
      for (int b = 0; b < S.num_vars(); ++b) CHECK(S.derivative(a).derivative(b) == S.derivative(b).derivative(a));
  }
}

TEST_CASE("jet") {
  const auto cusp = make_model_phase(ModelKind::Cusp12, 2, 1);
  const double x1[] = {1.0}, t0[] = {0.0};
  CHECK(jet(cusp, x1, t0).h == 3.0);

  const auto nd = make_model_phase(ModelKind::Nondegenerate, 1, 3);
  const double x[] = {0.3, -0.7, 0.2}, t[] = {0.9, 0.1, -0.4};
  CHECK(jet(nd, x, t).h == doctest::Approx(1.0).epsilon(1e-15));

  const auto morin = make_model_phase(ModelKind::Morin, 2, 2);
  const double z[] = {0.0, 0.0};
  const auto j = jet(morin, z, z);
  CHECK(j.mixed_hessian(0, 0) == 1.0);
  CHECK(j.mixed_hessian(0, 1) == 0.0);
  CHECK(j.mixed_hessian(1, 0) == 0.0);
  CHECK(j.mixed_hessian(1, 1) == 0.0);
  CHECK(j.h == 0.0);
}

TEST_CASE("h matches a finite-difference determinant") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (auto spec : {ModelSpec{ModelKind::Cusp12, 2, 1}, ModelSpec{ModelKind::Morin, 2, 2},
                    ModelSpec{ModelKind::Morin, 3, 2}, ModelSpec{ModelKind::FoldFold, 1, 1}}) {
    const auto S = make_model_phase(spec);
    const int n = S.dim();
    for (int trial = 0; trial < 20; ++trial) {
      std::vector<double> p(2 * n);
      for (auto& v : p) v = u(rng);
      const double e = 1e-4;
      Eigen::MatrixXd m(n, n);
      for (int i = 0; i < n; ++i)
        for (int k = 0; k < n; ++k) {
          auto at = [&](double si, double sk) {
            auto q = p;
            q[i] += si;
            q[n + k] += sk;
            return S.evaluate(q);
          };
          m(i, k) = (at(e, e) - at(e, -e) - at(-e, e) + at(-e, -e)) / (4 * e * e);
        }
      const double h = PhaseCalculus(S).h_at(p);
      CHECK(std::abs(m.determinant() - h) <= 1e-6 * std::max(1.0, std::abs(h)));
    }
  }
}

TEST_CASE("morin h formula") {
  for (int k = 1; k <= 3; ++k)
    for (int n = std::max(1, k - 1); n <= 3; ++n) {
      const PhaseCalculus calc(make_model_phase(ModelKind::Morin, k, n));
      const int xn = x_var(n - 1), tn = theta_var(n, n - 1);
      std::vector<Term> terms;
      std::vector<int> e(2 * n, 0);
      e[xn] = k;
      terms.push_back({static_cast<double>(k + 1), e});
      for (int m = 1; m <= k - 2; ++m) {
        std::vector<int> f(2 * n, 0);
        f[xn] = k - m - 1;
        f[x_var(n - 1 - m)] = 1;
        terms.push_back({static_cast<double>(k - m), f});
      }
      std::vector<int> g(2 * n, 0);
      g[tn] = 1;
      terms.push_back({1.0, g});
      CHECK(calc.h() == PolynomialPhase(n, terms));
    }
}

TEST_CASE("exact evaluation with integer coefficients") {
  const auto S = make_model_phase(ModelKind::Cusp12, 2, 1);
  const double p[] = {2.0, -4.0};
  CHECK(S.evaluate(p) == -64.0);
  const double q[] = {0.5, 0.25};
  CHECK(S.evaluate(q) == 0.0);
}
