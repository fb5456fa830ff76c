#include "foldlab/lemmas.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "foldlab/errors.hpp"

namespace foldlab {

std::string lemma_verdict_name(LemmaVerdict v) {
  switch (v) {
    case LemmaVerdict::Holds: return "holds";
    case LemmaVerdict::Fails: return "fails";
    case LemmaVerdict::HypothesesViolated: return "hypotheses-violated";
  }
  return "?";
}

namespace {

constexpr double kSlack = 1e-12;

LemmaResult violated(std::string why, std::optional<double> t = std::nullopt) {
  return {LemmaVerdict::HypothesesViolated, t, std::move(why)};
}

double factorial(int k) {
  double f = 1.0;
  for (int i = 2; i <= k; ++i) f *= i;
  return f;
}

std::vector<double> derivative(const std::vector<double>& c) {
  std::vector<double> d;
  for (std::size_t i = 1; i < c.size(); ++i) d.push_back(c[i] * static_cast<double>(i));
  if (d.empty()) d.push_back(0.0);
  return d;
}

std::vector<double> antiderivative(const std::vector<double>& c, double constant) {
  std::vector<double> a{constant};
  for (std::size_t i = 0; i < c.size(); ++i) a.push_back(c[i] / static_cast<double>(i + 1));
  return a;
}

std::vector<double> multiply(const std::vector<double>& a, const std::vector<double>& b) {
  std::vector<double> r(a.size() + b.size() - 1, 0.0);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
  return r;
}

}  // namespace

LemmaResult elementary_lemma_check(const LemmaSamples& s, LemmaMode mode, const LemmaParams& prm) {
  if (!(s.l > 0.0 && s.l <= 1.0)) return violated("l must lie in (0, 1]");
  if (s.t.size() < 2 || s.t.front() != 0.0 || s.t.back() != s.l) return violated("samples must span [0, l]");
  if (!(prm.epsilon >= 0.0)) return violated("epsilon must be >= 0");
  const std::size_t m = s.t.size();
  for (const auto& d : s.derivs)
    if (d.size() != m) throw ShapeError("derivative samples do not match the t samples");
  const auto& f = s.derivs.at(0);
  const double l = s.l, eps = prm.epsilon;

  if (mode == LemmaMode::Envelope) {
    if (prm.sigma.size() != 1 || (prm.sigma[0] != 1 && prm.sigma[0] != -1))
      return violated("envelope mode needs one sign");
    if (s.derivs.size() < 2) return violated("envelope mode needs f'");
    const int sg = prm.sigma[0];
    for (std::size_t i = 0; i < m; ++i)
      if (sg * s.derivs[1][i] < -eps) return violated("sigma f' < -epsilon", s.t[i]);
    const double lo = std::min(f.front(), f.back()) - eps * l;
    const double hi = std::max(f.front(), f.back()) + eps * l;
    for (std::size_t i = 0; i < m; ++i) {
      const double tol = kSlack * (1.0 + std::abs(f[i]) + std::abs(lo) + std::abs(hi));
      if (f[i] < lo - tol || f[i] > hi + tol) return {LemmaVerdict::Fails, s.t[i], "f leaves the envelope"};
    }
    return {LemmaVerdict::Holds, std::nullopt, ""};
  }

  const int k = prm.k;
  if (k < 1) return violated("k must be >= 1");
  if (static_cast<int>(prm.sigma.size()) != k - 1) return violated("growth mode needs k - 1 signs");
  if (static_cast<int>(s.derivs.size()) < k + 1) return violated("growth mode needs derivatives up to order k");
  if (!(prm.kappa > 0.0)) return violated("kappa must be positive");
  for (int j = 1; j < k; ++j) {
    const int sg = prm.sigma[j - 1];
    if (sg != 1 && sg != -1) return violated("signs must be +1 or -1");
    if (sg * s.derivs[j].front() < -eps) return violated("sigma_j f^(j)(0) < -epsilon", 0.0);
    if (sg * s.derivs[j].back() < -eps) return violated("sigma_j f^(j)(l) < -epsilon", l);
  }
  for (std::size_t i = 0; i < m; ++i)
    if (std::abs(s.derivs[k][i]) < prm.kappa) return violated("|f^(k)| < kappa", s.t[i]);
  const double lhs = std::abs(f.back() - f.front());
  const double rhs = prm.kappa * std::pow(l, k) / factorial(k) - (k - 1) * eps * l;
  if (lhs < rhs - kSlack * (1.0 + std::abs(lhs) + std::abs(rhs)))
    return {LemmaVerdict::Fails, l, "|f(l) - f(0)| below the growth bound"};
  return {LemmaVerdict::Holds, std::nullopt, ""};
}

LemmaSamples sample_polynomial(const std::vector<double>& coeffs, double l, int order, std::size_t points) {
  if (points < 2) throw ConfigError("need at least two sample points");
  LemmaSamples s;
  s.l = l;
  for (std::size_t i = 0; i < points; ++i)
    s.t.push_back(i + 1 == points ? l : l * static_cast<double>(i) / static_cast<double>(points - 1));
  std::vector<double> c = coeffs.empty() ? std::vector<double>{0.0} : coeffs;
  for (int j = 0; j <= order; ++j) {
    std::vector<double> vals;
    for (double t : s.t) {
      double v = 0.0;
      for (std::size_t q = c.size(); q-- > 0;) v = v * t + c[q];
      vals.push_back(v);
    }
    s.derivs.push_back(std::move(vals));
    c = derivative(c);
  }
  return s;
}

LemmaSelfTest lemma_self_test(LemmaMode mode, std::size_t satisfying_target, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  std::normal_distribution<double> nd;
  constexpr std::size_t kPoints = 257;
  LemmaSelfTest st;
  const std::size_t max_draws = 50 * satisfying_target + 1000;

  while (st.satisfying < satisfying_target && st.draws < max_draws) {
    ++st.draws;
    const double l = 0.05 + 0.95 * u01(rng);
    const double eps = 0.5 * u01(rng);
    const bool spoil = u01(rng) < 0.25;
    const int deg = 1 + static_cast<int>(rng() % 3);
    std::vector<double> q(deg + 1);
    for (auto& v : q) v = nd(rng);
    LemmaParams prm;
    prm.epsilon = eps;
    std::vector<double> f;

    if (mode == LemmaMode::Envelope) {
      const int sg = rng() % 2 ? 1 : -1;
      prm.sigma = {sg};
      if (spoil) {
        // q vanishes at a sampled node, where sigma f' = -eps (1 + delta).
        const double r = l * static_cast<double>(rng() % kPoints) / static_cast<double>(kPoints - 1);
        q = multiply(q, {-r, 1.0});
      }
      auto fp = multiply(q, q);
      fp[0] -= eps * (spoil ? 1.0 + 0.5 * u01(rng) + 1e-3 : u01(rng));
      for (auto& v : fp) v *= sg;
      f = antiderivative(fp, nd(rng));
      prm.k = 1;
    } else {
      const int k = 1 + static_cast<int>(rng() % 3);
      prm.k = k;
      prm.kappa = 0.1 + 5.0 * u01(rng);
      for (int j = 1; j < k; ++j) prm.sigma.push_back(rng() % 2 ? 1 : -1);
      auto fk = multiply(q, q);
      fk[0] += prm.kappa * (spoil ? 0.5 : 1.0);
      if (spoil) fk = {prm.kappa * 0.5};
      const int s = rng() % 2 ? 1 : -1;
      for (auto& v : fk) v *= s;
      f = fk;
      // Integrate down to f; the value at 0 of f^(j) has sigma_j f^(j)(0) >= -eps.
      for (int j = k - 1; j >= 0; --j) {
        double c0 = nd(rng);
        if (j >= 1) c0 = prm.sigma[j - 1] * (-eps + 2.0 * u01(rng));
        f = antiderivative(f, c0);
      }
    }
    const auto smp = sample_polynomial(f, l, prm.k, kPoints);
    const auto res = elementary_lemma_check(smp, mode, prm);
    switch (res.verdict) {
      case LemmaVerdict::Holds:
        ++st.satisfying;
        ++st.holds;
        break;
      case LemmaVerdict::Fails:
        ++st.satisfying;
        ++st.fails;
        break;
      case LemmaVerdict::HypothesesViolated: ++st.violated; break;
    }
  }
  return st;
}

}  // namespace foldlab
