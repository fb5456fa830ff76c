#include <doctest.h>

#include <cmath>
#include <random>

#include "foldlab/decomposition.hpp"
#include "foldlab/errors.hpp"
#include "foldlab/lemmas.hpp"

using namespace foldlab;

namespace {

DecompositionContext cusp_context() {
  return make_context(make_calculus(make_model_phase(ModelKind::Cusp12, 2, 1)), TensorBump::uniform(1), 2);
}

}  // namespace

TEST_CASE("cutoff family") {
  const CutoffFamily cf = build_cutoffs();
  CHECK(cf.beta(1.0) == 1.0);
  CHECK(cf.beta(0.95) == 1.0);
  CHECK(cf.beta(1.1) == 1.0);
  double sum = 0.0;
  for (int N = -30; N <= 30; ++N) sum += cf.beta(std::ldexp(0.37, N));
  CHECK(std::abs(sum - 1.0) <= 1e-12);
  CHECK(cf.beta_bar(0.5) == 1.0);
  CHECK(cf.beta_bar(-1.0) == 1.0);
  CHECK(cf.beta_bar(2.5) == 0.0);
  CHECK(cf.beta_bar(-2.0) == 0.0);
  CHECK(cf.beta(0.5) == 0.0);
  CHECK(cf.beta(2.0) == 0.0);
  CHECK(cf.step(1.0) == 0.0);
  CHECK(cf.step(2.0) == 1.0);

  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-4.0, 4.0);
  for (int i = 0; i < 1000; ++i) {
    const double t = u(rng);
    CHECK(cf.rho_plus(t) + cf.rho_minus(t) == doctest::Approx(1.0).epsilon(1e-15));
    for (double v : {cf.beta(std::abs(t)), cf.beta_bar(t), cf.rho_plus(t), cf.step(t)}) {
      CHECK(v >= 0.0);
      CHECK(v <= 1.0);
    }
    // telescoping with a finite number of shells
    const double a = std::abs(t) + 1e-3;
    const int No = 6;
    double s = cf.beta_bar(std::ldexp(a, No));
    for (int N = -8; N < No; ++N) s += cf.beta(std::ldexp(a, N));
    CHECK(std::abs(s - 1.0) <= 1e-12);
  }
  CHECK(cf.rho_plus(-1.0) == 0.0);
  CHECK(cf.rho_plus(1.0) == 1.0);
}

TEST_CASE("lattice partition of unity") {
  CHECK(lattice_bump(0.3) == 1.0);
  CHECK(lattice_bump(0.7) == 0.0);
}

TEST_CASE("hbar_star") {
  CHECK(hbar_star(1024.0, 1) == doctest::Approx(0.099213).epsilon(1e-5));
  CHECK(hbar_star(1.0, 3) == 1.0);
  CHECK(hbar_star(1024.0, 2) == 0.0625);
  CHECK(crossover_exp(1024.0, 2) == 4);
  CHECK(crossover_exp(1024.0, 1) == 3);
}

TEST_CASE("amplitude factors") {
  const auto ctx = cusp_context();
  const CutoffFamily cf = build_cutoffs();
  // h = 3x^2 - 2t; pick t with h = 1/6 at x = 0.
  const double p[] = {0.0, -1.0 / 12.0};
  CHECK(ctx.calc->h_at(p) == doctest::Approx(1.0 / 6.0));
  const auto shell = amplitude_factor(ctx, {ComponentKind::DyadicShell, 3, 1, {}, {}});
  CHECK(shell.eval(p) == doctest::Approx(cf.beta(8.0 / 6.0)));
  CHECK(shell.eval(p) > 0.0);
  CHECK(shell.eval(p) <= 1.0);

  const auto near = amplitude_factor(ctx, {ComponentKind::NearCritical, 2, 0, {}, {}});
  const double q[] = {0.2, 0.1};  // |h| = |0.12 - 0.2| <= 1/4
  CHECK(near.eval(q) == 1.0);

  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const auto plus = amplitude_factor(ctx, {ComponentKind::SigmaRefined, 3, 0, {1}, {}});
  const auto minus = amplitude_factor(ctx, {ComponentKind::SigmaRefined, 3, 0, {-1}, {}});
  const auto whole = amplitude_factor(ctx, {ComponentKind::NearCritical, 3, 0, {}, {}});
  for (int i = 0; i < 2000; ++i) {
    const double r[] = {u(rng), u(rng)};
    CHECK(std::abs(plus.eval(r) + minus.eval(r) - whole.eval(r)) <= 1e-12);
  }
  CHECK_THROWS_AS(amplitude_factor(ctx, {ComponentKind::SigmaRefined, 3, 0, {1, 1}, {}}), ConfigError);
}

TEST_CASE("support discipline and sigma inequality") {
  const auto ctx = cusp_context();
  const int N = 3;
  const double hb = std::ldexp(1.0, -N);
  const auto sp = amplitude_factor(ctx, {ComponentKind::DyadicShell, N, 1, {}, {}});
  const auto sm = amplitude_factor(ctx, {ComponentKind::DyadicShell, N, -1, {}, {}});
  const auto nc = amplitude_factor(ctx, {ComponentKind::NearCritical, N, 0, {}, {}});
  const auto sg = amplitude_factor(ctx, {ComponentKind::SigmaRefined, N, 0, {-1}, {}});
  const auto sgp = amplitude_factor(ctx, {ComponentKind::SigmaRefined, N, 0, {1}, {}});
  for (int i = 0; i <= 200; ++i)
    for (int j = 0; j <= 200; ++j) {
      const double p[] = {-1.0 + i / 100.0, -1.0 + j / 100.0};
      const double h = ctx.calc->h_at(p);
      if (std::abs(h) < hb / 2 || std::abs(h) > 2 * hb) {
        CHECK(sp.eval(p) == 0.0);
        CHECK(sm.eval(p) == 0.0);
      }
      if (std::abs(h) >= 2 * hb) CHECK(nc.eval(p) == 0.0);
      const double kh = 6.0 * p[0];  // K h = dh/dx
      if (sg.eval(p) != 0.0) CHECK(-kh >= -hb - 1e-9);
      if (sgp.eval(p) != 0.0) CHECK(kh >= -hb - 1e-9);
    }
}

TEST_CASE("reconstruction") {
  const auto S = make_model_phase(ModelKind::Cusp12, 2, 1);
  const auto ctx = cusp_context();
  const auto op = discretize(S, Amplitude{TensorBump::uniform(1), {}}, 64.0);
  CHECK(op.dense_eligible());
  CHECK(reconstruct_check(op, ctx, crossover_exp(64.0, 2), 10, 1) <= 1e-10);
  // no shells: the near-critical piece at the coarsest scale is the whole operator
  CHECK(reconstruct_check(op, ctx, coarsest_shell_exp(ctx), 10, 2) <= 1e-12);
  CHECK(reconstruct_check(op, ctx, decompose(ctx, crossover_exp(64.0, 2), true), 10, 3) <= 1e-10);

  const ComponentDescriptor shell{ComponentKind::DyadicShell, 2, 1, {}, {}};
  const auto parts = lattice_refine(ctx, shell);
  CHECK(parts.size() > 1);
  const auto piece = op.with_amplitude(op.amplitude().with_factor(amplitude_factor(ctx, shell)));
  std::mt19937_64 rng(4);
  std::normal_distribution<double> g;
  CVector u(static_cast<Eigen::Index>(op.cols()));
  for (auto& v : u) v = Complex(g(rng), g(rng));
  const CVector whole = piece.apply(u);
  CVector sum = CVector::Zero(whole.size());
  for (const auto& d : parts) sum += op.with_amplitude(op.amplitude().with_factor(amplitude_factor(ctx, d))).apply(u);
  CHECK((whole - sum).norm() <= 1e-10 * whole.norm());

  for (auto spec : {ModelSpec{ModelKind::FoldFold, 1, 1}, ModelSpec{ModelKind::Morin, 2, 1},
                    ModelSpec{ModelKind::Morin, 1, 1}}) {
    const auto P = make_model_phase(spec);
    const int k = spec.kind == ModelKind::Morin ? spec.k : 1;
    const auto c = make_context(make_calculus(P), TensorBump::uniform(1), k);
    const auto o = discretize(P, Amplitude{TensorBump::uniform(1), {}}, 64.0);
    CHECK(reconstruct_check(o, c, crossover_exp(64.0, k), 10, 5) <= 1e-10);
  }
}

TEST_CASE("convexity and growth along sigma pieces") {
  const auto ctx = cusp_context();
  const auto res = verify_convexity(ctx, {ComponentKind::SigmaRefined, 3, 1, {1}, {}}, 10000, 7);
  CHECK_FALSE(res.no_samples);
  CHECK(res.pairs >= 10000);
  CHECK(res.min_ratio > 0.0);
  CHECK(res.lemma2_holds);
  CHECK(res.min_h_over_hbar >= 0.25);

  const auto nd =
      make_context(make_calculus(make_model_phase(ModelKind::Nondegenerate, 1, 1)), TensorBump::uniform(1), 1);
  const auto empty = verify_convexity(nd, {ComponentKind::SigmaRefined, 3, 1, {}, {}}, 100, 1);
  CHECK(empty.no_samples);
}

TEST_CASE("kernel-field derivative of eta_n") {
  const PhaseCalculus cusp(make_model_phase(ModelKind::Cusp12, 2, 1));
  const double a[] = {1.0, 1.0};
  const auto r1 = verify_lemma1(cusp, a);
  CHECK(r1.rhs == 1.0);
  CHECK(r1.rel_error <= 1e-6);
  const double b[] = {2.0, 0.0};
  const auto r2 = verify_lemma1(cusp, b);
  CHECK(r2.rhs == 12.0);
  CHECK(r2.lhs == doctest::Approx(12.0).epsilon(1e-6));

  const PhaseCalculus morin(make_model_phase(ModelKind::Morin, 2, 2));
  const double c[] = {0.1, 0.2, 0.0, 0.3};
  CHECK(verify_lemma1(morin, c).rel_error <= 1e-6);
}

TEST_CASE("elementary lemmas") {
  LemmaParams env{{1}, 0.0, 0.0, 1};
  const auto lin = sample_polynomial({0.0, 1.0}, 1.0, 1, 101);
  CHECK(elementary_lemma_check(lin, LemmaMode::Envelope, env).verdict == LemmaVerdict::Holds);

  LemmaParams gr{{1, 1}, 0.0, 6.0, 3};
  const auto cube = sample_polynomial({0.0, 0.0, 0.0, 1.0}, 1.0, 3, 101);
  CHECK(elementary_lemma_check(cube, LemmaMode::Growth, gr).verdict == LemmaVerdict::Holds);

  // f = -t with sigma = +1 violates sigma f' >= -eps.
  const auto neg = sample_polynomial({0.0, -1.0}, 1.0, 1, 11);
  CHECK(elementary_lemma_check(neg, LemmaMode::Envelope, env).verdict == LemmaVerdict::HypothesesViolated);

  const auto e = lemma_self_test(LemmaMode::Envelope, 2000, 1);
  CHECK(e.satisfying == 2000);
  CHECK(e.fails == 0);
  CHECK(e.violated > 0);
  const auto g = lemma_self_test(LemmaMode::Growth, 2000, 2);
  CHECK(g.fails == 0);
  CHECK(g.violated > 0);
}
