#include "foldlab/experiments.hpp"

#include <algorithm>
#include <cmath>

#include "foldlab/errors.hpp"

namespace foldlab {

std::string verdict_name(Verdict v) {
  switch (v) {
    case Verdict::Pass: return "pass";
    case Verdict::Fail: return "fail";
    case Verdict::Inconclusive: return "inconclusive";
  }
  return "?";
}

Verdict combine(Verdict a, Verdict b) {
  if (a == Verdict::Fail || b == Verdict::Fail) return Verdict::Fail;
  if (a == Verdict::Inconclusive || b == Verdict::Inconclusive) return Verdict::Inconclusive;
  return Verdict::Pass;
}

double predicted_exponent(int n, int k) {
  if (n < 1 || k < 1) throw ConfigError("predicted exponent needs n >= 1 and k >= 1");
  return 0.5 * n - static_cast<double>(k) / (2.0 * (2 * k + 1));
}

std::optional<double> predicted_exponent(int n, int k_left, int k_right) {
  if (k_left == 0 && k_right == 0) return 0.5 * n;
  if (std::min(k_left, k_right) == 1) return predicted_exponent(n, std::max(k_left, k_right));
  return std::nullopt;
}

void check_geometric(const std::vector<double>& lambdas) {
  if (lambdas.empty()) throw ConfigError("lambda list is empty");
  for (double l : lambdas)
    if (!(l > 0.0) || !std::isfinite(l)) throw ConfigError("lambda values must be positive");
  for (std::size_t i = 1; i < lambdas.size(); ++i)
    if (!(lambdas[i] > lambdas[i - 1])) throw ConfigError("lambda list must be strictly ascending");
  if (lambdas.size() < 3) return;
  const double r = lambdas[1] / lambdas[0];
  for (std::size_t i = 2; i < lambdas.size(); ++i)
    if (std::abs(lambdas[i] / lambdas[i - 1] / r - 1.0) > 1e-9) throw ConfigError("lambda list must be geometric");
}

DecayFit fit_decay(std::vector<DecayPoint> points, std::optional<double> predicted_d, double tolerance) {
  DecayFit f;
  f.points = std::move(points);
  f.predicted_d = predicted_d;
  f.tolerance = tolerance;
  std::vector<double> lx, ly;
  for (const auto& p : f.points)
    if (p.stable) {
      lx.push_back(p.lambda);
      ly.push_back(p.norm);
    }
  f.monotone = true;
  for (std::size_t i = 1; i < ly.size(); ++i)
    if (ly[i] > 1.05 * ly[i - 1]) f.monotone = false;
  if (lx.size() < 4) {
    f.reason = "fewer than 4 stable points";
    return f;
  }
  if (std::log2(lx.back() / lx.front()) < 3.0 - 1e-12) {
    f.reason = "stable points span fewer than 3 octaves";
    return f;
  }
  f.fit = power_law_fit(lx, ly);
  if (!predicted_d) {
    f.reason = "no prediction for this phase";
    return f;
  }
  const double err = std::abs(f.fit->d - *predicted_d);
  f.verdict = err <= tolerance ? Verdict::Pass : Verdict::Fail;
  f.reason = "|fitted - predicted| = " + std::to_string(err);
  return f;
}

DecayFit decay_sweep(const PolynomialPhase& phase, const Amplitude& amplitude, const std::vector<double>& lambdas,
                     const RefineOptions& opts, std::optional<double> predicted_d, double tolerance) {
  check_geometric(lambdas);
  std::vector<DecayPoint> pts;
  for (double lambda : lambdas) {
    const NormEstimate e = refine_until_stable(phase, amplitude, lambda, opts);
    pts.push_back({lambda, e.sigma_max, e.iterations, e.residual, e.grid_x, e.grid_theta, e.stable});
  }
  return fit_decay(std::move(pts), predicted_d, tolerance);
}

std::string component_which_name(ComponentWhich w) {
  return w == ComponentWhich::Shell ? "shell" : "near-critical";
}

std::optional<ComponentWhich> parse_component_which(const std::string& name) {
  if (name == "shell") return ComponentWhich::Shell;
  if (name == "near-critical") return ComponentWhich::NearCritical;
  return std::nullopt;
}

double component_shape(ComponentWhich which, int n, int k, double lambda, double hbar) {
  if (which == ComponentWhich::Shell) return std::pow(lambda, -0.5 * n) * std::pow(hbar, -0.5);
  return std::pow(lambda, -0.5 * (n - 1)) * std::pow(hbar, 0.5 + 0.5 / k);
}

std::vector<int> admissible_hbar_exps(double lambda, int k) {
  std::vector<int> out;
  for (int N = 1; N <= crossover_exp(lambda, k); ++N) out.push_back(N);
  return out;
}

bool component_empty(const DecompositionContext& ctx, const ComponentDescriptor& d) {
  const AmplitudeFactor f = amplitude_factor(ctx, d);
  const std::size_t dims = ctx.support.dims();
  const std::size_t per = dims <= 2 ? 257 : dims <= 4 ? 33 : 9;
  std::size_t total = 1;
  for (std::size_t a = 0; a < dims; ++a) total *= per;
  bool empty = true;
#pragma omp parallel for schedule(static) reduction(&& : empty)
  for (std::size_t idx = 0; idx < total; ++idx) {
    std::vector<double> p(dims);
    std::size_t rem = idx;
    for (std::size_t a = dims; a-- > 0;) {
      const double t = static_cast<double>(rem % per) / static_cast<double>(per - 1);
      rem /= per;
      p[a] = ctx.support.lo[a] + t * (ctx.support.hi[a] - ctx.support.lo[a]);
    }
    if (f.eval(p) != 0.0) empty = false;
  }
  return empty;
}

ComponentSweep component_sweep(const DecompositionContext& ctx, const TensorBump& base, double lambda,
                               const std::vector<int>& hbar_exps, ComponentWhich which, const RefineOptions& opts,
                               double factor) {
  if (hbar_exps.empty()) throw ConfigError("hbar list is empty");
  const auto admissible = admissible_hbar_exps(lambda, ctx.k);
  for (int N : hbar_exps)
    if (std::find(admissible.begin(), admissible.end(), N) == admissible.end())
      throw ConfigError("hbar = 2^-" + std::to_string(N) + " lies outside [hbar_star, 1/2]");
  auto exps = hbar_exps;
  std::sort(exps.begin(), exps.end());
  exps.erase(std::unique(exps.begin(), exps.end()), exps.end());

  const int n = ctx.calc->dim();
  const PolynomialPhase& phase = ctx.calc->phase();
  ComponentSweep out;
  out.which = which;
  out.factor = factor;
  const std::vector<int> signs = which == ComponentWhich::Shell ? std::vector<int>{1, -1} : std::vector<int>{0};
  for (int sign : signs) {
    const std::string series = sign > 0 ? "+" : sign < 0 ? "-" : "";
    std::vector<ComponentRow> rows;
    for (int N : exps) {
      ComponentDescriptor d{sign == 0 ? ComponentKind::NearCritical : ComponentKind::DyadicShell, N, sign, {}, {}};
      ComponentRow row{lambda, N, d.kind, series};
      if (component_empty(ctx, d)) {
        row.skipped = true;
      } else {
        const Amplitude amp{base, {amplitude_factor(ctx, d)}};
        const NormEstimate e = refine_until_stable(phase, amp, lambda, opts);
        row.norm = e.sigma_max;
        row.stable = e.stable;
      }
      rows.push_back(row);
    }
    const auto calib = std::find_if(rows.begin(), rows.end(), [](const ComponentRow& r) { return !r.skipped; });
    std::vector<double> lh, ln;
    if (calib != rows.end()) {
      const double c = calib->norm / component_shape(which, n, ctx.k, lambda, std::ldexp(1.0, -calib->hbar_exp));
      for (auto& r : rows) {
        if (r.skipped) continue;
        r.bound = c * component_shape(which, n, ctx.k, lambda, std::ldexp(1.0, -r.hbar_exp));
        r.ratio = r.norm / r.bound;
        out.max_ratio = std::max(out.max_ratio, r.ratio);
        if (r.norm > 0.0) {
          lh.push_back(std::log(std::ldexp(1.0, -r.hbar_exp)));
          ln.push_back(std::log(r.norm));
        }
      }
    }
    if (lh.size() >= 2) out.slopes.push_back({series.empty() ? "near-critical" : series, linear_fit(lh, ln)});
    out.rows.insert(out.rows.end(), rows.begin(), rows.end());
  }

  bool any = false, unstable = false;
  for (const auto& r : out.rows) {
    if (r.skipped) continue;
    any = true;
    unstable = unstable || !r.stable;
  }
  if (!any) {
    out.reason = "every component is empty";
  } else if (out.max_ratio > factor) {
    out.verdict = Verdict::Fail;
    out.reason = "calibrated ratio " + std::to_string(out.max_ratio) + " exceeds " + std::to_string(factor);
  } else if (unstable) {
    out.reason = "unstable norm estimate";
  } else {
    out.verdict = Verdict::Pass;
    out.reason = "max calibrated ratio " + std::to_string(out.max_ratio);
  }
  return out;
}

double dense_norm(const CMatrix& m) {
  if (m.size() == 0) return 0.0;
  return dense_singular_values(m)(0);
}

OrthogonalityProbe orthogonality_probe(const DecompositionContext& ctx, const TensorBump& base, double lambda,
                                       int hbar_exp, const std::vector<int>& sigma, const std::vector<long>& theta,
                                       int max_separation, const DiscretizationPolicy& policy) {
  const int n = ctx.calc->dim();
  if (static_cast<int>(theta.size()) != n) throw ConfigError("Theta must have n entries");
  if (max_separation < 1) throw ConfigError("max separation must be at least 1");
  const DiscreteOperator op = discretize(ctx.calc->phase(), Amplitude{base, {}}, lambda, policy);
  if (!op.dense_eligible()) throw ConfigError("orthogonality probe needs a dense-eligible grid");

  OrthogonalityProbe out;
  out.hbar_exp = hbar_exp;
  out.sigma = sigma;
  out.theta = theta;

  const double xscale = std::exp2(static_cast<double>(hbar_exp) / ctx.k);
  std::vector<std::vector<long>> candidates{{}};
  for (int a = 0; a < n; ++a) {
    const long lo = static_cast<long>(std::ceil(ctx.support.lo[a] * xscale - 0.625));
    const long hi = static_cast<long>(std::floor(ctx.support.hi[a] * xscale + 0.625));
    std::vector<std::vector<long>> next;
    for (const auto& c : candidates)
      for (long m = lo; m <= hi; ++m) {
        auto q = c;
        q.push_back(m);
        next.push_back(std::move(q));
      }
    candidates = std::move(next);
  }

  std::vector<CMatrix> pieces;
  for (const auto& X : candidates) {
    ComponentDescriptor d{ComponentKind::LatticePiece, hbar_exp, 0, sigma, LatticeIndex{theta, X}};
    CMatrix m = op.with_amplitude(op.amplitude().with_factor(amplitude_factor(ctx, d))).symmetrized_dense();
    if (m.cwiseAbs().maxCoeff() == 0.0) continue;
    out.tau = std::max(out.tau, dense_norm(m));
    out.xs.push_back(X);
    pieces.push_back(std::move(m));
  }

  std::vector<OrthogonalityRow> rows(static_cast<std::size_t>(max_separation) + 1);
  for (int m = 0; m <= max_separation; ++m) rows[m].separation = m;
  bool zero_when_disjoint = true;
  for (std::size_t i = 0; i < pieces.size(); ++i)
    for (std::size_t j = i; j < pieces.size(); ++j) {
      double dist2 = 0.0;
      long cheb = 0;
      for (int a = 0; a < n; ++a) {
        const long dx = out.xs[i][a] - out.xs[j][a];
        dist2 += static_cast<double>(dx * dx);
        cheb = std::max(cheb, std::abs(dx));
      }
      const int sep = static_cast<int>(std::floor(std::sqrt(dist2) + 1e-12));
      if (sep > max_separation) continue;
      const double tt = dense_norm(pieces[i] * pieces[j].adjoint());
      const double st = dense_norm(pieces[i].adjoint() * pieces[j]);
      if (cheb >= 2 && st != 0.0) zero_when_disjoint = false;
      auto& r = rows[sep];
      ++r.pairs;
      r.tt_star = std::max(r.tt_star, tt);
      r.tstar_t = std::max(r.tstar_t, st);
    }
  for (const auto& r : rows)
    if (r.pairs > 0) out.rows.push_back(r);

  if (out.rows.size() < 3 || out.rows[1].separation != 1) {
    out.reason = "fewer than three separations available";
  } else if (!zero_when_disjoint) {
    out.verdict = Verdict::Fail;
    out.reason = "tau_X^* tau_Y nonzero for x-disjoint pieces";
  } else if (!(out.rows.back().tt_star < out.rows[1].tt_star)) {
    out.verdict = Verdict::Fail;
    out.reason = "tau_X tau_Y^* does not decay with separation";
  } else {
    out.verdict = Verdict::Pass;
    out.reason = "products decay with separation";
  }
  return out;
}

}  // namespace foldlab
