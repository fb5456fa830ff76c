#include <doctest.h>

#include <cmath>

#include "foldlab/errors.hpp"
#include "foldlab/experiments.hpp"
#include "foldlab/report.hpp"

using namespace foldlab;

namespace {

std::vector<double> octaves(int lo, int hi) {
  std::vector<double> l;
  for (int e = lo; e <= hi; ++e) l.push_back(std::ldexp(1.0, e));
  return l;
}

DecayPoint point(double lambda, double norm) {
  DecayPoint p;
  p.lambda = lambda;
  p.norm = norm;
  p.stable = true;
  return p;
}

}  // namespace

TEST_CASE("predicted exponents") {
  CHECK(predicted_exponent(1, 2) == doctest::Approx(0.3));
  CHECK(predicted_exponent(1, 1) == doctest::Approx(1.0 / 3.0));
  CHECK(predicted_exponent(2, 3) == doctest::Approx(11.0 / 14.0));
  CHECK(predicted_exponent(1, 0, 0) == doctest::Approx(0.5));
  CHECK(predicted_exponent(2, 0, 0) == doctest::Approx(1.0));
  CHECK(predicted_exponent(1, 1, 2) == doctest::Approx(0.3));
  CHECK(predicted_exponent(1, 2, 1) == doctest::Approx(0.3));
  CHECK_FALSE(predicted_exponent(1, 2, 2).has_value());
}

TEST_CASE("verdict combination") {
  CHECK(combine(Verdict::Pass, Verdict::Pass) == Verdict::Pass);
  CHECK(combine(Verdict::Pass, Verdict::Inconclusive) == Verdict::Inconclusive);
  CHECK(combine(Verdict::Inconclusive, Verdict::Fail) == Verdict::Fail);
  CHECK(verdict_name(Verdict::Pass) == "pass");
}

TEST_CASE("power-law fit recovers a synthetic exponent") {
  const auto l = octaves(6, 13);
  const auto exact = synthetic_power_law(l, 2.5, 0.3, 0.0, 1);
  const auto f0 = power_law_fit(l, exact);
  CHECK(f0.d == doctest::Approx(0.3).epsilon(1e-12));
  CHECK(std::exp(f0.log_c) == doctest::Approx(2.5).epsilon(1e-12));
  CHECK(f0.rms < 1e-12);

  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const auto noisy = synthetic_power_law(l, 2.5, 0.3, 0.01, seed);
    CHECK(std::abs(power_law_fit(l, noisy).d - 0.3) <= 0.02);
  }
}

TEST_CASE("decay fit verdicts") {
  const auto l = octaves(6, 13);
  const auto norms = synthetic_power_law(l, 1.0, 0.3, 0.0, 1);
  std::vector<DecayPoint> pts;
  for (std::size_t i = 0; i < l.size(); ++i) pts.push_back(point(l[i], norms[i]));

  const auto pass = fit_decay(pts, 0.3, 0.05);
  CHECK(pass.verdict == Verdict::Pass);
  CHECK(pass.monotone);

  const auto fail = fit_decay(pts, 0.5, 0.05);
  CHECK(fail.verdict == Verdict::Fail);

  const auto none = fit_decay(pts, std::nullopt, 0.05);
  CHECK(none.fit.has_value());

  SUBCASE("fewer than four stable points") {
    auto few = pts;
    for (std::size_t i = 3; i < few.size(); ++i) few[i].stable = false;
    const auto r = fit_decay(few, 0.3, 0.05);
    CHECK(r.verdict == Verdict::Inconclusive);
  }

  SUBCASE("less than three octaves") {
    const std::vector<DecayPoint> narrow{point(64, 1.0), point(90.5, 0.9), point(128, 0.8), point(181, 0.7),
                                         point(256, 0.66)};
    CHECK(fit_decay(narrow, 0.3, 0.05).verdict == Verdict::Inconclusive);
  }
}

TEST_CASE("geometric lambda lists") {
  CHECK_NOTHROW(check_geometric(octaves(6, 9)));
  CHECK_THROWS_AS(check_geometric({64, 128, 300}), ConfigError);
  CHECK_THROWS_AS(check_geometric({128, 64}), ConfigError);
  CHECK_THROWS_AS(check_geometric({-1, -2}), ConfigError);
}

TEST_CASE("component shapes and admissible scales") {
  CHECK(component_shape(ComponentWhich::Shell, 1, 2, 64.0, 0.25) == doctest::Approx(std::pow(64.0, -0.5) * 2.0));
  CHECK(component_shape(ComponentWhich::NearCritical, 1, 2, 64.0, 0.25) ==
        doctest::Approx(std::pow(0.25, 0.75)));
  const auto e = admissible_hbar_exps(1024.0, 2);
  REQUIRE_FALSE(e.empty());
  CHECK(e.front() == 1);
  CHECK(e.back() == 4);
  CHECK(parse_component_which("near-critical") == ComponentWhich::NearCritical);
  CHECK_FALSE(parse_component_which("bogus").has_value());
}

TEST_CASE("near-critical pieces vanish for a nondegenerate phase") {
  const auto ctx =
      make_context(make_calculus(make_model_phase(ModelKind::Nondegenerate, 1, 1)), TensorBump::uniform(1), 1);
  RefineOptions opts;
  opts.policy.max_count = 256;
  const auto sw =
      component_sweep(ctx, TensorBump::uniform(1), 512.0, {2, 3}, ComponentWhich::NearCritical, opts);
  REQUIRE_FALSE(sw.rows.empty());
  for (const auto& r : sw.rows) CHECK(r.skipped);
}

TEST_CASE("almost orthogonality probe") {
  const auto ctx = make_context(make_calculus(make_model_phase(ModelKind::Cusp12, 2, 1)), TensorBump::uniform(1), 2);
  DiscretizationPolicy pol;
  pol.max_count = 256;
  const auto p = orthogonality_probe(ctx, TensorBump::uniform(1), 1024.0, 4, {1}, {2}, 3, pol);
  REQUIRE(p.rows.size() >= 3);
  CHECK(p.rows[0].separation == 0);
  CHECK(p.rows[0].tt_star == doctest::Approx(p.tau * p.tau).epsilon(1e-10));
  for (const auto& r : p.rows) CHECK(r.pairs > 0);
  for (const auto& r : p.rows)
    if (r.separation >= 2) CHECK(r.tstar_t == 0.0);
  CHECK(p.verdict == Verdict::Pass);
  CHECK_THROWS_AS(orthogonality_probe(ctx, TensorBump::uniform(1), 1024.0, 4, {1}, {0, 0}, 3, pol), ConfigError);
}

TEST_CASE("tables") {
  const DecayFit empty;
  CHECK(decay_table(empty).str() == "lambda,norm,iterations,residual,grid_x,grid_theta,stable\n");
  CHECK(component_table({}).str() == "lambda,hbar_exp,kind,sigma,norm,bound,ratio,skipped\n");

  DecayFit f;
  f.points.push_back(point(64, 0.125));
  CHECK(decay_table(f).str() == "lambda,norm,iterations,residual,grid_x,grid_theta,stable\n64,0.125,0,0,0,0,1\n");

  CHECK(format_number(0.1) == "0.1");
  CHECK(std::stod(format_number(1.0 / 3.0)) == 1.0 / 3.0);
}

TEST_CASE("summary json round trip") {
  Summary s;
  s.experiment = "decay";
  s.phase = "cusp12";
  s.n = 1;
  s.k_left = 1;
  s.k_right = 2;
  s.fitted_d = 0.2871;
  s.predicted_d = 0.3;
  s.tolerance = 0.05;
  s.verdict = Verdict::Pass;
  s.detail = Json{{"points", 8}};
  const Json j = to_json(s);
  const auto keys = std::vector<std::string>{"experiment", "phase",     "n",         "k_left", "k_right",
                                             "fitted_d",   "predicted_d", "tolerance", "verdict", "detail"};
  std::vector<std::string> got;
  for (auto it = j.begin(); it != j.end(); ++it) got.push_back(it.key());
  CHECK(got == keys);

  const Summary r = summary_from_json(Json::parse(j.dump()));
  CHECK(r.experiment == s.experiment);
  CHECK(r.phase == s.phase);
  CHECK(r.k_left == s.k_left);
  CHECK(r.k_right == s.k_right);
  CHECK(r.fitted_d == s.fitted_d);
  CHECK(r.predicted_d == s.predicted_d);
  CHECK(r.tolerance == s.tolerance);
  CHECK(r.verdict == s.verdict);
  CHECK(r.detail == s.detail);
  CHECK(to_json(r).dump() == j.dump());

  Summary blank;
  blank.experiment = "classify";
  blank.phase = "x";
  const Json b = to_json(blank);
  CHECK(b["fitted_d"].is_null());
  CHECK_FALSE(summary_from_json(b).fitted_d.has_value());
}

TEST_CASE("svg chart") {
  const auto svg = svg_chart("t", "x", "y", {ChartSeries{"a", {1, 2, 4}, {1, 0.5, 0.25}}});
  CHECK(svg.find("<svg") == 0);
  CHECK(svg.find("polyline") != std::string::npos);
}
