// Acceptance suite: one PASS/FAIL line per criterion. Pass criterion numbers
// as arguments to run a subset.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "foldlab/decomposition.hpp"
#include "foldlab/experiments.hpp"
#include "foldlab/lemmas.hpp"
#include "foldlab/report.hpp"
#include "foldlab/runner.hpp"
#include "foldlab/scaling.hpp"

using namespace foldlab;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string num(double v, int digits = 4) {
  std::ostringstream os;
  os.precision(digits);
  os << v;
  return os.str();
}

std::vector<double> octaves(int lo, int hi) {
  std::vector<double> l;
  for (int e = lo; e <= hi; ++e) l.push_back(std::ldexp(1.0, e));
  return l;
}

const TensorBump kBase1 = TensorBump::uniform(1);

Outcome decay(ModelKind kind, double lo, double hi) {
  const auto phase = make_model_phase(kind, 2, 1);
  const double mid = 0.5 * (lo + hi);
  const auto f = decay_sweep(phase, Amplitude{kBase1, {}}, octaves(6, 13), {}, mid, 0.5 * (hi - lo));
  std::size_t stable = 0;
  for (const auto& p : f.points) stable += p.stable;
  Outcome o;
  o.detail = std::to_string(stable) + "/" + std::to_string(f.points.size()) + " stable";
  if (!f.fit) {
    o.detail += ", no fit: " + f.reason;
    return o;
  }
  o.pass = f.fit->d >= lo && f.fit->d <= hi;
  o.detail = "d = " + num(f.fit->d) + " in [" + num(lo) + ", " + num(hi) + "], " + o.detail;
  return o;
}

Outcome c1() { return decay(ModelKind::Cusp12, 0.25, 0.35); }
Outcome c2() { return decay(ModelKind::Nondegenerate, 0.47, 0.53); }
Outcome c3() { return decay(ModelKind::FoldFold, 0.28, 0.38); }

Outcome c4() {
  Outcome o{true, ""};
  const auto cusp = classify_phase(make_model_phase(ModelKind::Cusp12, 2, 1), kBase1, 129);
  const bool cusp_ok = cusp.error.empty() && cusp.left.type_k == 1 && cusp.right.type_k == 2;
  o.pass = cusp_ok;
  o.detail = "cusp12 (" + std::to_string(cusp.left.type_k) + "," + std::to_string(cusp.right.type_k) + ")";
  for (auto [k, n] : std::vector<std::pair<int, int>>{{1, 1}, {1, 2}, {2, 1}, {2, 2}, {3, 2}}) {
    const auto c = classify_phase(make_model_phase(ModelKind::Morin, k, n), TensorBump::uniform(n), 17);
    const bool ok = c.error.empty() && c.right.type_k == k;
    o.pass = o.pass && ok;
    o.detail += "; morin(" + std::to_string(k) + "," + std::to_string(n) + ") right " + std::to_string(c.right.type_k);
  }
  return o;
}

struct NamedPhase {
  std::string name;
  PolynomialPhase phase;
};

std::vector<NamedPhase> model_phases() {
  std::vector<NamedPhase> v{{"cusp12", make_model_phase(ModelKind::Cusp12, 2, 1)},
                            {"foldfold", make_model_phase(ModelKind::FoldFold, 1, 1)},
                            {"nondegenerate", make_model_phase(ModelKind::Nondegenerate, 1, 1)}};
  for (auto [k, n] : std::vector<std::pair<int, int>>{{1, 1}, {1, 2}, {2, 1}, {2, 2}, {3, 2}})
    v.push_back({"morin(" + std::to_string(k) + "," + std::to_string(n) + ")", make_model_phase(ModelKind::Morin, k, n)});
  return v;
}

Outcome c5() {
  Outcome o{true, ""};
  double worst = 0.0;
  std::string worst_name;
  const double lambda = 64.0;
  for (const auto& [name, phase] : model_phases()) {
    const int n = phase.dim();
    const TensorBump base = TensorBump::uniform(n);
    const auto cls = classify_phase(phase, base, n == 1 ? 129 : 17);
    const bool left = cls.left.type_k > cls.right.type_k;
    const int k = std::max(1, left ? cls.left.type_k : cls.right.type_k);
    const auto ctx = make_context(make_calculus(phase), base, k, left ? ProjectionSide::Left : ProjectionSide::Right);
    DiscretizationPolicy pol;
    pol.max_count = n == 1 ? 256 : 32;
    pol.min_count = n == 1 ? 64 : 16;
    const auto op = discretize(phase, Amplitude{base, {}}, lambda, pol);
    if (!op.dense_eligible()) {
      o.pass = false;
      o.detail += name + " grid exceeds the dense threshold; ";
      continue;
    }
    const double e = reconstruct_check(op, ctx, crossover_exp(lambda, k), 10, 1);
    if (e > worst || worst_name.empty()) {
      worst = e;
      worst_name = name;
    }
    o.pass = o.pass && e <= 1e-10;
  }
  o.detail += "max relative error " + num(worst, 3) + " (" + worst_name + ") over " +
              std::to_string(model_phases().size()) + " phases, bound 1e-10";
  return o;
}

Outcome c6() {
  Outcome o{true, ""};
  double worst = 0.0;
  bool jac = true;
  int combos = 0;
  for (int k = 1; k <= 3; ++k)
    for (int n = 1; n <= 2; ++n) {
      if (n < k - 1) continue;
      for (double mu : {0.5, 2.0, 3.0}) {
        ++combos;
        worst = std::max(worst, homogeneity_check(ModelSpec{ModelKind::Morin, k, n}, mu, 100, 17));
        const auto m = scaling_maps(k, n, mu);
        jac = jac && m.jacobian_exponent() == n * (2 * k + 1) - k &&
              m.jacobian_product() == std::pow(mu, n * (2 * k + 1) - k);
      }
    }
  for (double mu : {0.5, 2.0, 3.0}) {
    ++combos;
    worst = std::max(worst, homogeneity_check(ModelSpec{ModelKind::Cusp12, 2, 1}, mu, 100, 17));
  }
  o.pass = worst <= 1e-12 && jac;
  o.detail = "max relative error " + num(worst, 3) + " over " + std::to_string(combos) +
             " (k,n,mu) combinations, jacobian " + (jac ? "exact" : "mismatch");
  return o;
}

Outcome c7() {
  Outcome o{true, ""};
  double worst = 0.0;
  std::mt19937_64 rng(7);
  for (const auto& spec : {ModelSpec{ModelKind::Cusp12, 2, 1}, ModelSpec{ModelKind::Morin, 2, 2}}) {
    const PhaseCalculus calc(make_model_phase(spec));
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    int used = 0;
    std::vector<double> p(static_cast<std::size_t>(2 * calc.dim()));
    while (used < 100) {
      for (auto& v : p) v = u(rng);
      if (std::abs(calc.h_at(p)) < 0.05) continue;
      const auto r = verify_lemma1(calc, p);
      worst = std::max(worst, r.rel_error);
      ++used;
    }
  }
  o.pass = worst <= 1e-6;
  o.detail = "max relative error " + num(worst, 3) + " at 200 non-critical points, bound 1e-6";
  return o;
}

Outcome c8() {
  const auto phase = make_model_phase(ModelKind::Cusp12, 2, 1);
  const auto ctx = make_context(make_calculus(phase), kBase1, 2, ProjectionSide::Right);
  const double lambda = 1024.0;
  const auto exps = admissible_hbar_exps(lambda, 2);
  Outcome o{true, ""};
  for (ComponentWhich w : {ComponentWhich::Shell, ComponentWhich::NearCritical}) {
    const auto sw = component_sweep(ctx, kBase1, lambda, exps, w, {}, 10.0);
    std::size_t measured = 0;
    for (const auto& r : sw.rows) measured += !r.skipped;
    o.pass = o.pass && sw.verdict == Verdict::Pass;
    if (!o.detail.empty()) o.detail += "; ";
    o.detail += component_which_name(w) + " max ratio " + num(sw.max_ratio, 3) + " over " + std::to_string(measured) +
                " pieces (" + verdict_name(sw.verdict) + ")";
  }
  return o;
}

PolynomialPhase random_phase(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> coeff(-3, 3), deg(0, 3);
  std::vector<Term> terms{{1.0, {1, 1}}};
  for (int i = 0; i < 4; ++i) {
    const int a = deg(rng), b = deg(rng);
    if (a + b < 2 || a + b > 4) continue;
    const int c = coeff(rng);
    if (c != 0) terms.push_back({static_cast<double>(c), {a, b}});
  }
  return PolynomialPhase(1, terms);
}

Outcome c9() {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> lam(2.0, 40.0);
  const std::size_t sizes[] = {8, 16, 32, 48, 64, 96, 128};
  double worst = 0.0;
  for (int i = 0; i < 20; ++i) {
    const auto phase = random_phase(rng);
    const std::size_t nx = sizes[rng() % 7], nt = sizes[rng() % 7];
    const std::size_t counts[] = {i == 19 ? 128 : nx, i == 19 ? 128 : nt};
    const auto op = discretize_with_counts(phase, Amplitude{kBase1, {}}, lam(rng), counts);
    NormOptions opts;
    opts.seed = static_cast<std::uint64_t>(i) + 1;
    const auto est = operator_norm(op, opts);
    const double exact = dense_oracle(op)(0);
    worst = std::max(worst, std::abs(est.sigma_max - exact) / exact);
  }
  return {worst <= 1e-8, "max relative difference " + num(worst, 3) + " on 20 kernels up to 128x128, bound 1e-8"};
}

Outcome c10() {
  RefineOptions opts;
  opts.policy.max_count = 16384;
  const auto res =
      scaling_bound_check(ModelSpec{ModelKind::Cusp12, 2, 1}, 1024.0, {1.0, 2.0, 4.0}, 0.3, kBase1, opts, 0.10);
  Outcome o;
  o.pass = res.all_stable && res.non_increasing;
  for (const auto& r : res.rows) {
    if (!o.detail.empty()) o.detail += ", ";
    o.detail += "R=" + num(r.R) + ": ";
    if (std::isnan(r.norm))
      o.detail += "not computed (needs " + num(r.undersampling, 3) + "x max_count nodes)";
    else
      o.detail += num(r.norm, 6) + (r.stable ? "" : " unstable");
  }
  o.detail += res.non_increasing ? "; non-increasing within 10%" : "; not established as non-increasing";
  return o;
}

Outcome c11() {
  const auto phase = make_model_phase(ModelKind::Cusp12, 2, 1);
  const Amplitude amp{kBase1, {}};
  double lo = INFINITY, hi = 0.0;
  bool stable = true;
  std::string list;
  for (double lambda : octaves(8, 12)) {
    const auto est = refine_until_stable(phase, amp, lambda);
    stable = stable && est.stable;
    const auto op = discretize_with_counts(phase, amp, lambda, est.counts);
    const auto p = lower_bound_probe(op, est, 0.3);
    lo = std::min(lo, p.ratio);
    hi = std::max(hi, p.ratio);
    list += (list.empty() ? "" : " ") + num(p.ratio, 4);
  }
  return {stable && hi <= 3.0 * lo,
          "ratios " + list + ", spread " + num(hi / lo, 3) + " (bound 3)" + (stable ? "" : ", unstable point")};
}

Outcome c12() {
  Outcome o{true, ""};
  for (LemmaMode m : {LemmaMode::Envelope, LemmaMode::Growth}) {
    const auto t = lemma_self_test(m, 10000, m == LemmaMode::Envelope ? 1 : 2);
    o.pass = o.pass && t.fails == 0 && t.satisfying == 10000;
    if (!o.detail.empty()) o.detail += "; ";
    o.detail += std::string(m == LemmaMode::Envelope ? "envelope" : "growth") + " " + std::to_string(t.holds) + "/" +
                std::to_string(t.satisfying) + " hold, " + std::to_string(t.fails) + " fail, " +
                std::to_string(t.violated) + " flagged";
  }
  return o;
}

struct Criterion {
  int id;
  const char* name;
  std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> all{
      {1, "cusp12 decay exponent", c1},
      {2, "nondegenerate decay exponent", c2},
      {3, "foldfold decay exponent", c3},
      {4, "projection type classification", c4},
      {5, "decomposition reconstruction", c5},
      {6, "homogeneity and jacobian", c6},
      {7, "kernel-field derivative relation", c7},
      {8, "component bound shapes", c8},
      {9, "power iteration against dense oracle", c9},
      {10, "truncated operator stability in R", c10},
      {11, "lower-bound witness ratios", c11},
      {12, "elementary lemma self-tests", c12},
  };
  std::set<int> only;
  for (int i = 1; i < argc; ++i) only.insert(std::atoi(argv[i]));

  int failed = 0;
  for (const auto& c : all) {
    if (!only.empty() && !only.count(c.id)) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    failed += !o.pass;
    std::printf("%s %2d %s: %s [%.1f s]\n", o.pass ? "PASS" : "FAIL", c.id, c.name, o.detail.c_str(), secs);
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
