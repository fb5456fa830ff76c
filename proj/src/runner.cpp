#include "foldlab/runner.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <sstream>

#include <omp.h>

#include "foldlab/errors.hpp"

namespace foldlab {

int exit_code(Verdict v) {
  switch (v) {
    case Verdict::Pass: return kExitPass;
    case Verdict::Fail: return kExitFail;
    case Verdict::Inconclusive: return kExitInconclusive;
  }
  return kExitFail;
}

Classification classify_phase(const PolynomialPhase& phase, const TensorBump& amplitude,
                              std::size_t samples_per_axis) {
  const PhaseCalculus calc(phase);
  const std::size_t per = samples_per_axis ? samples_per_axis : (phase.dim() == 1 ? 129 : 17);
  Classification c;
  try {
    c.left = scan_region(calc, ProjectionSide::Left, amplitude.support(), per);
    c.right = scan_region(calc, ProjectionSide::Right, amplitude.support(), per);
  } catch (const std::exception& e) {
    c.error = e.what();
  }
  return c;
}

namespace {

struct Context {
  const ExperimentConfig& cfg;
  const RunOptions& opts;
  std::filesystem::path dir;
  RunOutcome out;
  Classification cls;

  void write(const std::string& name, const std::string& text) {
    const auto p = dir / name;
    write_text(p, text);
    out.files.push_back(p);
  }

  RefineOptions refine() const {
    RefineOptions r;
    r.policy = {cfg.policy.points_per_wavelength, cfg.policy.max_count, cfg.policy.min_count};
    r.stability_tol = cfg.policy.stability_tol;
    r.norm.seed = cfg.seed;
    return r;
  }

  // Side carrying the higher type; the decomposition is built there.
  std::pair<ProjectionSide, int> decomposition_side() const {
    if (cls.left.type_k > cls.right.type_k) return {ProjectionSide::Left, cls.left.type_k};
    return {ProjectionSide::Right, cls.right.type_k};
  }
};

void run_classify(Context& c) {
  Verdict v = Verdict::Pass;
  std::string reason = "classified";
  if (c.cls.left.unclassified_samples || c.cls.right.unclassified_samples) {
    v = Verdict::Inconclusive;
    reason = "unclassified critical samples";
  }
  if (!c.cls.left.rank_drops_simply || !c.cls.right.rank_drops_simply) {
    v = Verdict::Fail;
    reason = "rank does not drop simply";
  }
  if ((c.cfg.classify.expect_left && *c.cfg.classify.expect_left != c.cls.left.type_k) ||
      (c.cfg.classify.expect_right && *c.cfg.classify.expect_right != c.cls.right.type_k)) {
    v = Verdict::Fail;
    reason = "types differ from the expected values";
  }
  c.out.summary.verdict = v;
  c.out.summary.detail["reason"] = reason;
}

void run_decay(Context& c) {
  const auto pred = predicted_exponent(c.cfg.phase.phase.dim(), c.cls.left.type_k, c.cls.right.type_k);
  const DecayFit fit = decay_sweep(c.cfg.phase.phase, Amplitude{c.cfg.amplitude, {}}, c.cfg.lambdas, c.refine(), pred,
                                   c.cfg.tolerance);
  auto& s = c.out.summary;
  if (fit.fit) s.fitted_d = fit.fit->d;
  s.predicted_d = pred;
  s.tolerance = c.cfg.tolerance;
  s.verdict = fit.verdict;
  s.detail = to_json(fit);
  c.write("decay.csv", decay_table(fit).str());
  if (c.opts.svg) {
    ChartSeries measured{"measured norm", {}, {}}, line{"fitted", {}, {}};
    for (const auto& p : fit.points) {
      measured.x.push_back(p.lambda);
      measured.y.push_back(p.norm);
      if (fit.fit) {
        line.x.push_back(p.lambda);
        line.y.push_back(std::exp(fit.fit->log_c) * std::pow(p.lambda, -fit.fit->d));
      }
    }
    c.write("decay.svg", svg_chart("operator norm decay: " + c.cfg.phase.label, "lambda", "norm", {measured, line}));
  }
}

void run_components(Context& c) {
  const auto [side, k] = c.decomposition_side();
  auto& s = c.out.summary;
  if (k < 1) {
    s.verdict = Verdict::Inconclusive;
    s.detail["reason"] = "no critical points on the support";
    c.write("components.csv", component_table({}).str());
    return;
  }
  const double lambda = c.cfg.lambdas.front();
  const auto ctx = make_context(make_calculus(c.cfg.phase.phase), c.cfg.amplitude, k, side);
  const auto exps = c.cfg.hbar_exps.empty() ? admissible_hbar_exps(lambda, k) : c.cfg.hbar_exps;

  const RefineOptions ropts = c.refine();
  const DiscreteOperator op = discretize(c.cfg.phase.phase, Amplitude{c.cfg.amplitude, {}}, lambda, ropts.policy);
  const double recon = reconstruct_check(op, ctx, crossover_exp(lambda, k), c.cfg.components.probes, c.cfg.seed);
  Verdict v = recon <= 1e-10 ? Verdict::Pass : Verdict::Fail;
  s.detail["side"] = side_name(side);
  s.detail["k"] = k;
  s.detail["hbar_o_exp"] = crossover_exp(lambda, k);
  s.detail["reconstruction_error"] = recon;
  s.detail["sweeps"] = Json::array();

  std::vector<ComponentRow> rows;
  std::vector<ChartSeries> series;
  for (ComponentWhich w : c.cfg.components.which) {
    const ComponentSweep sw = component_sweep(ctx, c.cfg.amplitude, lambda, exps, w, ropts, c.cfg.components.factor);
    v = combine(v, sw.verdict);
    s.detail["sweeps"].push_back(to_json(sw));
    rows.insert(rows.end(), sw.rows.begin(), sw.rows.end());
    std::vector<std::string> labels;
    for (const auto& r : sw.rows)
      if (std::find(labels.begin(), labels.end(), r.sigma) == labels.end()) labels.push_back(r.sigma);
    for (const auto& lab : labels) {
      ChartSeries meas{component_which_name(w) + lab, {}, {}}, bound{component_which_name(w) + lab + " bound", {}, {}};
      for (const auto& r : sw.rows)
        if (r.sigma == lab && !r.skipped) {
          meas.x.push_back(std::ldexp(1.0, -r.hbar_exp));
          meas.y.push_back(r.norm);
          bound.x.push_back(std::ldexp(1.0, -r.hbar_exp));
          bound.y.push_back(r.bound);
        }
      series.push_back(meas);
      series.push_back(bound);
    }
  }
  s.tolerance = c.cfg.components.factor;
  s.verdict = v;
  c.write("components.csv", component_table(rows).str());
  if (c.opts.svg) c.write("components.svg", svg_chart("component norms: " + c.cfg.phase.label, "hbar", "norm", series));
}

void run_scaling(Context& c) {
  const ModelSpec spec = *c.cfg.phase.model;
  const auto maps = scaling_maps(spec, 1.0);
  const double d = c.cfg.scaling.d.value_or(predicted_exponent(maps.n, maps.k));
  auto& s = c.out.summary;
  s.predicted_d = d;
  s.tolerance = c.cfg.scaling.tolerance;

  double homog = 0.0;
  for (double mu : {0.5, 2.0, 3.0}) homog = std::max(homog, homogeneity_check(spec, mu, 100, c.cfg.seed));
  s.detail["homogeneity_error"] = homog;
  Verdict v = homog <= 1e-12 ? Verdict::Pass : Verdict::Fail;

  RefineOptions ropts = c.refine();
  if (c.cfg.scaling.max_count) ropts.policy.max_count = *c.cfg.scaling.max_count;
  const auto res = scaling_bound_check(spec, c.cfg.scaling.lambda, c.cfg.scaling.R, d, c.cfg.amplitude, ropts,
                                       c.cfg.scaling.tolerance);
  s.detail["scaling"] = to_json(res);
  bool violated = false;
  for (std::size_t i = 1; i < res.rows.size(); ++i)
    if (res.rows[i].stable && res.rows[i - 1].stable &&
        res.rows[i].norm > (1.0 + c.cfg.scaling.tolerance) * res.rows[i - 1].norm)
      violated = true;
  v = combine(v, violated ? Verdict::Fail : res.non_increasing ? Verdict::Pass : Verdict::Inconclusive);
  c.write("scaling.csv", scaling_table(res).str());

  if (!c.cfg.lambdas.empty()) {
    std::vector<LowerBoundProbe> probes;
    std::vector<bool> stable;
    double lo = INFINITY, hi = 0.0;
    bool all_stable = true;
    const PolynomialPhase phase = make_model_phase(spec);
    const Amplitude amp{c.cfg.amplitude, {}};
    for (double lambda : c.cfg.lambdas) {
      const NormEstimate e = refine_until_stable(phase, amp, lambda, c.refine());
      const DiscreteOperator op = discretize_with_counts(phase, amp, lambda, e.counts);
      probes.push_back(lower_bound_probe(op, e, d));
      stable.push_back(e.stable);
      all_stable = all_stable && e.stable;
      lo = std::min(lo, probes.back().ratio);
      hi = std::max(hi, probes.back().ratio);
    }
    const double spread = hi / lo;
    s.detail["lower_bound_spread"] = spread;
    v = combine(v, spread > c.cfg.scaling.ratio_spread ? Verdict::Fail
                   : all_stable                        ? Verdict::Pass
                                                       : Verdict::Inconclusive);
    c.write("lower_bound.csv", lower_bound_table(c.cfg.lambdas, probes, stable).str());
    if (c.opts.svg) {
      ChartSeries ser{"ratio", c.cfg.lambdas, {}};
      for (const auto& p : probes) ser.y.push_back(p.ratio);
      c.write("lower_bound.svg", svg_chart("lower-bound ratio: " + c.cfg.phase.label, "lambda", "ratio", {ser}));
    }
  }
  if (c.opts.svg) {
    ChartSeries meas{"norm", {}, {}}, bound{"bound shape", {}, {}};
    for (const auto& r : res.rows) {
      meas.x.push_back(r.R);
      meas.y.push_back(r.norm);
      bound.x.push_back(r.R);
      bound.y.push_back(r.bound);
    }
    c.write("scaling.svg", svg_chart("truncated operators: " + c.cfg.phase.label, "R", "norm", {meas, bound}));
  }
  s.verdict = v;
}

void run_orthogonality(Context& c) {
  const auto [side, k] = c.decomposition_side();
  auto& s = c.out.summary;
  if (k < 1) {
    s.verdict = Verdict::Inconclusive;
    s.detail["reason"] = "no critical points on the support";
    c.write("orthogonality.csv", orthogonality_table({}).str());
    return;
  }
  const double lambda = c.cfg.lambdas.front();
  const auto ctx = make_context(make_calculus(c.cfg.phase.phase), c.cfg.amplitude, k, side);
  const int N = c.cfg.orthogonality.hbar_exp.value_or(crossover_exp(lambda, k));
  auto sigma = c.cfg.orthogonality.sigma;
  if (sigma.empty()) sigma.assign(static_cast<std::size_t>(k - 1), 1);
  auto theta = c.cfg.orthogonality.theta;
  if (theta.empty()) theta.assign(static_cast<std::size_t>(c.cfg.phase.phase.dim()), 0);
  DiscretizationPolicy pol{c.cfg.policy.points_per_wavelength, c.cfg.orthogonality.max_count,
                           std::min(c.cfg.policy.min_count, c.cfg.orthogonality.max_count)};
  const auto probe =
      orthogonality_probe(ctx, c.cfg.amplitude, lambda, N, sigma, theta, c.cfg.orthogonality.max_separation, pol);
  s.verdict = probe.verdict;
  s.detail = to_json(probe);
  c.write("orthogonality.csv", orthogonality_table(probe).str());
  if (c.opts.svg) {
    ChartSeries a{"|tau_X tau_Y^*|", {}, {}};
    for (const auto& r : probe.rows)
      if (r.separation > 0) {
        a.x.push_back(r.separation);
        a.y.push_back(r.tt_star);
      }
    c.write("orthogonality.svg", svg_chart("almost orthogonality: " + c.cfg.phase.label, "|X - Y|", "norm", {a}));
  }
}

void run_lemmas(Context& c) {
  std::vector<std::pair<LemmaMode, LemmaSelfTest>> runs;
  Verdict v = Verdict::Pass;
  for (LemmaMode m : {LemmaMode::Envelope, LemmaMode::Growth}) {
    const auto t = lemma_self_test(m, c.cfg.lemmas.instances, c.cfg.seed);
    if (t.fails > 0) v = Verdict::Fail;
    c.out.summary.detail[m == LemmaMode::Envelope ? "envelope" : "growth"] = to_json(t);
    runs.emplace_back(m, t);
  }
  c.out.summary.verdict = v;
  c.write("lemmas.csv", lemma_table(runs).str());
}

std::string timestamp() {
  const std::time_t t = std::time(nullptr);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
  return buf;
}

}  // namespace

RunOutcome run_experiment(const ExperimentConfig& config, const RunOptions& options) {
  if (options.threads > 0) omp_set_num_threads(options.threads);
  const auto t0 = std::chrono::steady_clock::now();
  Context c{config, options, options.output_dir.value_or(config.output_dir), {}, {}};
  std::filesystem::create_directories(c.dir);

  auto& s = c.out.summary;
  s.experiment = experiment_name(config.experiment);
  s.phase = config.phase.label;
  s.n = config.phase.phase.dim();
  c.cls = classify_phase(config.phase.phase, config.amplitude, config.classify.samples_per_axis);
  if (!c.cls.error.empty()) {
    s.verdict = Verdict::Inconclusive;
    s.detail["reason"] = "classification failed: " + c.cls.error;
  } else {
    s.k_left = c.cls.left.type_k;
    s.k_right = c.cls.right.type_k;
    s.detail["left"] = to_json(c.cls.left);
    s.detail["right"] = to_json(c.cls.right);
    s.detail["unclassified_samples"] = c.cls.left.unclassified_samples + c.cls.right.unclassified_samples;
    Json cls = s.detail;
    switch (config.experiment) {
      case ExperimentKind::Classify: run_classify(c); break;
      case ExperimentKind::Decay: run_decay(c); break;
      case ExperimentKind::Components: run_components(c); break;
      case ExperimentKind::Scaling: run_scaling(c); break;
      case ExperimentKind::Orthogonality: run_orthogonality(c); break;
      case ExperimentKind::Lemmas: run_lemmas(c); break;
    }
    if (!s.detail.contains("left")) {
      Json merged = cls;
      for (auto& [key, val] : s.detail.items()) merged[key] = val;
      s.detail = merged;
    }
  }

  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  c.out.metadata = {{"generated_at", timestamp()}, {"elapsed_seconds", secs}, {"threads", omp_get_max_threads()}};
  Json j = to_json(s);
  j["metadata"] = c.out.metadata;
  c.write("summary.json", j.dump(2) + "\n");
  return c.out;
}

std::string list_models() {
  std::ostringstream os;
  auto line = [&](const std::string& id, const std::string& constraint, const std::string& pred,
                  const std::string& note) {
    os << id << "\n  constraint: " << constraint << "\n  predicted d: " << pred << "\n  " << note << "\n";
  };
  line("cusp12", "n = 1", format_number(predicted_exponent(1, 2)),
       "S = x^3 t - x t^2; left projection a fold (k=1), right a simple cusp (k=2)");
  line("morin(k,n)", "k >= 1, n >= k - 1", "n/2 - k/(2(2k+1)), e.g. morin(3,2): " +
       format_number(predicted_exponent(2, 3)),
       "S = (x_n^{k+1} + x_n^{k-1} x_{n-1} + ... + x_n^2 x_{n-k+2}) t_n + x_n t_n^2/2 + x'.t'; right type k");
  line("nondegenerate(n)", "n >= 1", "n/2", "S = x.t; no critical points");
  line("foldfold", "n = 1", format_number(predicted_exponent(1, 1)),
       "S = (x - t)^3/3; non-paper witness model, two-sided fold");
  return os.str();
}

}  // namespace foldlab
