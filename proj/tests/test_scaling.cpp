#include <doctest.h>

#include <cmath>

#include "foldlab/errors.hpp"
#include "foldlab/scaling.hpp"

using namespace foldlab;

TEST_CASE("scaling maps: worked examples") {
  const auto cusp = make_model_phase(ModelKind::Cusp12, 2, 1);
  const auto maps = scaling_maps(ModelSpec{ModelKind::Cusp12, 2, 1}, 2.0);
  CHECK(maps.x_exps == std::vector<int>{1});
  CHECK(maps.theta_exps == std::vector<int>{2});

  const std::vector<double> p{1.0, -1.0};
  const auto q = maps.apply(p);
  CHECK(q[0] == 2.0);
  CHECK(q[1] == -4.0);
  CHECK(cusp.evaluate(p) == -2.0);
  CHECK(cusp.evaluate(q) == -64.0);
  CHECK(cusp.evaluate(q) == 32.0 * cusp.evaluate(p));

  const std::vector<double> one{1.0, 1.0};
  CHECK(cusp.evaluate(maps.apply(one)) == 0.0);

  CHECK(homogeneity_check(ModelSpec{ModelKind::Morin, 2, 2}, 3.0, 1000, 7) <= 1e-12);
}

TEST_CASE("scaling maps: homogeneity over k, n, mu") {
  for (int k = 1; k <= 3; ++k)
    for (int n = std::max(1, k - 1); n <= 2; ++n)
      for (double mu : {0.5, 2.0, 3.0}) {
        CAPTURE(k);
        CAPTURE(n);
        CAPTURE(mu);
        const ModelSpec spec{ModelKind::Morin, k, n};
        CHECK(homogeneity_check(spec, mu, 500, 11) <= 1e-12);
      }
  CHECK(homogeneity_check(ModelSpec{ModelKind::Cusp12, 2, 1}, 3.0, 500, 3) <= 1e-12);
}

TEST_CASE("scaling maps: jacobian") {
  const auto m = scaling_maps(2, 1, 2.0);
  CHECK(m.jacobian_exponent() == 3);
  CHECK(m.jacobian_product() == 8.0);
  for (int k = 1; k <= 3; ++k)
    for (int n = std::max(1, k - 1); n <= 3; ++n) {
      const auto s = scaling_maps(k, n, 3.0);
      CHECK(s.jacobian_exponent() == n * (2 * k + 1) - k);
      CHECK(s.jacobian_product() == doctest::Approx(std::pow(3.0, n * (2 * k + 1) - k)).epsilon(1e-14));
    }
}

TEST_CASE("scaling maps: argument validation") {
  CHECK_THROWS_AS(scaling_maps(3, 1, 2.0), ConfigError);
  CHECK_THROWS_AS(scaling_maps(2, 1, 0.0), ConfigError);
  CHECK_THROWS_AS(scaling_maps(ModelSpec{ModelKind::Nondegenerate, 1, 1}, 2.0), ConfigError);
  CHECK_THROWS_AS(scaling_maps(ModelSpec{ModelKind::FoldFold, 1, 1}, 2.0), ConfigError);
}

TEST_CASE("truncated operator") {
  const ModelSpec cusp{ModelKind::Cusp12, 2, 1};
  const auto base = TensorBump::uniform(1);

  SUBCASE("R = 1 reproduces the base operator") {
    const auto t1 = truncated_operator(cusp, 64.0, 1.0, base);
    const auto t0 = discretize(make_model_phase(cusp), Amplitude{base, {}}, 64.0);
    REQUIRE(t1.rows() == t0.rows());
    REQUIRE(t1.cols() == t0.cols());
    CHECK(t1.dense_kernel() == t0.dense_kernel());
  }

  SUBCASE("R = 2 dilates the support") {
    const auto b = truncated_bump(scaling_maps(cusp, 2.0), base);
    const Box s = b.support();
    CHECK(s.lo[0] == -2.0);
    CHECK(s.hi[0] == 2.0);
    CHECK(s.lo[1] == -4.0);
    CHECK(s.hi[1] == 4.0);
    CHECK(b.inner[0] == 1.0);
    CHECK(b.inner[1] == 2.0);
  }

  SUBCASE("support outside the maximum box") {
    const Box cap = Box::cube(2, -3.0, 3.0);
    CHECK_NOTHROW(truncated_operator(cusp, 16.0, 1.0, base, {}, cap));
    CHECK_THROWS_AS(truncated_operator(cusp, 16.0, 2.0, base, {}, cap), ConfigError);
  }

  CHECK_THROWS_AS(truncated_operator(cusp, 16.0, 0.5, base), ConfigError);
}

TEST_CASE("scaling bound exponent") {
  CHECK(scaling_bound_exponent(2, 1, 0.3) == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(scaling_bound_exponent(1, 1, 0.5) == doctest::Approx(-0.5));
  CHECK(scaling_bound_exponent(2, 2, 0.8) == doctest::Approx(4.0 - 4.0));
}

TEST_CASE("scaling bound check at small lambda") {
  RefineOptions opts;
  opts.policy.max_count = 512;
  const auto res = scaling_bound_check(ModelSpec{ModelKind::Cusp12, 2, 1}, 16.0, {1.0, 2.0}, 0.3,
                                       TensorBump::uniform(1), opts);
  REQUIRE(res.rows.size() == 2);
  CHECK(res.bound_exponent == doctest::Approx(0.0).epsilon(1e-15));
  for (const auto& r : res.rows) {
    CHECK(r.norm > 0.0);
    CHECK(r.bound == doctest::Approx(std::pow(16.0, -0.3)));
  }
  CHECK_THROWS_AS(scaling_bound_check(ModelSpec{ModelKind::Cusp12, 2, 1}, 16.0, {1.0}, 0.0, TensorBump::uniform(1)),
                  ConfigError);
}

TEST_CASE("lower-bound probe") {
  const auto S = make_model_phase(ModelKind::Cusp12, 2, 1);
  const auto op = discretize(S, Amplitude{TensorBump::uniform(1), {}}, 64.0);
  const auto est = operator_norm(op);
  REQUIRE(est.converged);
  const auto p = lower_bound_probe(op, est, 0.3);
  CHECK(p.tu_norm / p.u_norm == doctest::Approx(est.sigma_max).epsilon(1e-10));
  CHECK(p.ratio == doctest::Approx(est.sigma_max / std::pow(64.0, -0.3)).epsilon(1e-10));

  NormOptions few;
  few.max_iter = 1;
  const auto rough = operator_norm(op, few);
  REQUIRE_FALSE(rough.converged);
  CHECK_THROWS_AS(lower_bound_probe(op, rough, 0.3), ConfigError);
}
