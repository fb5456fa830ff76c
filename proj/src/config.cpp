#include "foldlab/config.hpp"

#include <cmath>
#include <fstream>
#include <set>

#include "foldlab/errors.hpp"

namespace foldlab {

using nlohmann::json;

std::string experiment_name(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::Classify: return "classify";
    case ExperimentKind::Decay: return "decay";
    case ExperimentKind::Components: return "components";
    case ExperimentKind::Scaling: return "scaling";
    case ExperimentKind::Orthogonality: return "orthogonality";
    case ExperimentKind::Lemmas: return "lemmas";
  }
  return "?";
}

std::optional<ExperimentKind> parse_experiment(const std::string& name) {
  for (auto k : {ExperimentKind::Classify, ExperimentKind::Decay, ExperimentKind::Components, ExperimentKind::Scaling,
                 ExperimentKind::Orthogonality, ExperimentKind::Lemmas})
    if (experiment_name(k) == name) return k;
  return std::nullopt;
}

namespace {

// Collects diagnostics while reading typed fields.
class Reader {
 public:
  std::vector<Diagnostic> diags;

  void error(const std::string& path, const std::string& msg) { diags.push_back({path, msg}); }

  bool object(const json& j, const std::string& path) {
    if (j.is_object()) return true;
    error(path, "expected an object");
    return false;
  }

  void allowed(const json& j, const std::string& path, const std::set<std::string>& keys) {
    for (const auto& [k, v] : j.items())
      if (!keys.count(k)) error(path + "/" + k, "unknown field");
  }

  std::optional<double> number(const json& j, const std::string& path, const std::string& key) {
    if (!j.contains(key)) return std::nullopt;
    const auto& v = j.at(key);
    if (!v.is_number()) {
      error(path + "/" + key, "expected a number");
      return std::nullopt;
    }
    return v.get<double>();
  }

  std::optional<long long> integer(const json& j, const std::string& path, const std::string& key) {
    if (!j.contains(key)) return std::nullopt;
    const auto& v = j.at(key);
    if (!v.is_number_integer()) {
      error(path + "/" + key, "expected an integer");
      return std::nullopt;
    }
    return v.get<long long>();
  }

  std::optional<std::string> string(const json& j, const std::string& path, const std::string& key) {
    if (!j.contains(key)) return std::nullopt;
    const auto& v = j.at(key);
    if (!v.is_string()) {
      error(path + "/" + key, "expected a string");
      return std::nullopt;
    }
    return v.get<std::string>();
  }

  std::optional<std::vector<double>> numbers(const json& v, const std::string& path) {
    if (!v.is_array()) {
      error(path, "expected an array of numbers");
      return std::nullopt;
    }
    std::vector<double> out;
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (!v[i].is_number()) {
        error(path + "/" + std::to_string(i), "expected a number");
        return std::nullopt;
      }
      out.push_back(v[i].get<double>());
    }
    return out;
  }

  std::optional<std::vector<long long>> integers(const json& v, const std::string& path) {
    if (!v.is_array()) {
      error(path, "expected an array of integers");
      return std::nullopt;
    }
    std::vector<long long> out;
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (!v[i].is_number_integer()) {
        error(path + "/" + std::to_string(i), "expected an integer");
        return std::nullopt;
      }
      out.push_back(v[i].get<long long>());
    }
    return out;
  }
};

std::optional<PhaseConfig> read_phase(Reader& r, const json& j) {
  const std::string path = "/phase";
  if (!r.object(j, path)) return std::nullopt;
  r.allowed(j, path, {"model", "k", "n", "terms"});
  const auto n = r.integer(j, path, "n");
  if (n && *n < 1) {
    r.error(path + "/n", "n must be >= 1");
    return std::nullopt;
  }
  if (j.contains("model") == j.contains("terms")) {
    r.error(path, "give exactly one of \"model\" or \"terms\"");
    return std::nullopt;
  }
  PhaseConfig pc;
  if (j.contains("model")) {
    const auto name = r.string(j, path, "model");
    if (!name) return std::nullopt;
    const auto kind = parse_model_kind(*name);
    if (!kind) {
      r.error(path + "/model", "unknown model \"" + *name + "\"");
      return std::nullopt;
    }
    ModelSpec spec{*kind, 1, n ? static_cast<int>(*n) : 1};
    const auto k = r.integer(j, path, "k");
    if (*kind == ModelKind::Morin) {
      if (!k) {
        r.error(path + "/k", "morin needs k");
        return std::nullopt;
      }
      spec.k = static_cast<int>(*k);
    } else if (*kind == ModelKind::Cusp12) {
      spec.k = 2;
    }
    if (k && *kind != ModelKind::Morin) r.error(path + "/k", "k applies to morin only");
    try {
      check_model(spec);
    } catch (const ConfigError& e) {
      r.error(path, e.what());
      return std::nullopt;
    }
    pc.model = spec;
    pc.phase = make_model_phase(spec);
    pc.label = spec.name();
    return pc;
  }
  if (!n) {
    r.error(path + "/n", "custom phases need n");
    return std::nullopt;
  }
  const auto& terms = j.at("terms");
  if (!terms.is_array() || terms.empty()) {
    r.error(path + "/terms", "expected a nonempty array of terms");
    return std::nullopt;
  }
  std::vector<Term> ts;
  for (std::size_t i = 0; i < terms.size(); ++i) {
    const std::string tp = path + "/terms/" + std::to_string(i);
    if (!r.object(terms[i], tp)) return std::nullopt;
    r.allowed(terms[i], tp, {"coeff", "exps"});
    const auto c = r.number(terms[i], tp, "coeff");
    if (!c || !terms[i].contains("exps")) {
      r.error(tp, "term needs coeff and exps");
      return std::nullopt;
    }
    const auto e = r.integers(terms[i].at("exps"), tp + "/exps");
    if (!e) return std::nullopt;
    if (e->size() != static_cast<std::size_t>(2 * *n)) {
      r.error(tp + "/exps", "expected 2n = " + std::to_string(2 * *n) + " exponents");
      return std::nullopt;
    }
    Term t{*c, {}};
    for (auto v : *e) {
      if (v < 0) {
        r.error(tp + "/exps", "exponents must be nonnegative");
        return std::nullopt;
      }
      t.exps.push_back(static_cast<int>(v));
    }
    ts.push_back(std::move(t));
  }
  pc.phase = PolynomialPhase(static_cast<int>(*n), std::move(ts));
  if (pc.phase.is_zero()) {
    r.error(path + "/terms", "phase is identically zero");
    return std::nullopt;
  }
  pc.label = "custom: " + pc.phase.to_string();
  return pc;
}

std::optional<std::vector<double>> read_lambdas(Reader& r, const json& v, const std::string& path) {
  std::vector<double> out;
  if (v.is_array()) {
    auto l = r.numbers(v, path);
    if (!l) return std::nullopt;
    out = std::move(*l);
  } else if (v.is_object()) {
    r.allowed(v, path, {"start", "stop", "ratio"});
    const auto a = r.number(v, path, "start"), b = r.number(v, path, "stop"), q = r.number(v, path, "ratio");
    if (!a || !b || !q) {
      r.error(path, "range needs start, stop and ratio");
      return std::nullopt;
    }
    if (!(*a > 0.0)) {
      r.error(path + "/start", "lambda must be positive");
      return std::nullopt;
    }
    if (!(*q > 1.0)) {
      r.error(path + "/ratio", "ratio must exceed 1");
      return std::nullopt;
    }
    if (*b < *a) {
      r.error(path + "/stop", "stop must be >= start");
      return std::nullopt;
    }
    for (double l = *a; l <= *b * (1.0 + 1e-12); l *= *q) out.push_back(l);
  } else {
    r.error(path, "expected a list of lambdas or a {start, stop, ratio} range");
    return std::nullopt;
  }
  if (out.empty()) {
    r.error(path, "lambda list is empty");
    return std::nullopt;
  }
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (!(out[i] > 0.0) || !std::isfinite(out[i])) {
      r.error(path + "/" + std::to_string(i), "lambda must be positive");
      return std::nullopt;
    }
    if (i > 0 && !(out[i] > out[i - 1])) {
      r.error(path + "/" + std::to_string(i), "lambda list must be sorted ascending");
      return std::nullopt;
    }
  }
  return out;
}

void read_policy(Reader& r, const json& j, PolicyConfig& p) {
  const std::string path = "/policy";
  if (!r.object(j, path)) return;
  r.allowed(j, path, {"points_per_wavelength", "max_count", "min_count", "stability_tol"});
  if (auto v = r.number(j, path, "points_per_wavelength")) {
    if (*v > 0.0)
      p.points_per_wavelength = *v;
    else
      r.error(path + "/points_per_wavelength", "must be positive");
  }
  if (auto v = r.integer(j, path, "max_count")) {
    if (*v >= 1)
      p.max_count = static_cast<std::size_t>(*v);
    else
      r.error(path + "/max_count", "must be positive");
  }
  if (auto v = r.integer(j, path, "min_count")) {
    if (*v >= 1)
      p.min_count = static_cast<std::size_t>(*v);
    else
      r.error(path + "/min_count", "must be positive");
  }
  if (p.min_count > p.max_count) r.error(path + "/min_count", "min_count exceeds max_count");
  if (auto v = r.number(j, path, "stability_tol")) {
    if (*v > 0.0)
      p.stability_tol = *v;
    else
      r.error(path + "/stability_tol", "must be positive");
  }
}

template <class T>
void positive(Reader& r, const std::string& path, std::optional<T> v, T& out, T lo) {
  if (!v) return;
  if (*v >= lo)
    out = *v;
  else
    r.error(path, "must be >= " + std::to_string(lo));
}

}  // namespace

ConfigResult parse_config(const json& j) {
  Reader r;
  ConfigResult res;
  if (!r.object(j, "")) {
    res.diagnostics = r.diags;
    return res;
  }
  r.allowed(j, "", {"description", "experiment", "phase", "amplitude", "lambda", "hbar_exps", "policy", "tolerance",
                    "seed", "output_dir", "classify", "components", "scaling", "orthogonality", "lemmas"});
  ExperimentConfig c;

  if (auto e = r.string(j, "", "experiment")) {
    if (auto k = parse_experiment(*e))
      c.experiment = *k;
    else
      r.error("/experiment", "unknown experiment \"" + *e + "\"");
  } else if (!j.contains("experiment")) {
    r.error("/experiment", "missing required field");
  }

  std::optional<PhaseConfig> phase;
  if (!j.contains("phase"))
    r.error("/phase", "missing required field");
  else
    phase = read_phase(r, j.at("phase"));
  const int n = phase ? phase->phase.dim() : 1;
  if (phase) c.phase = *phase;

  double inner = 0.5, outer = 1.0;
  std::vector<double> center(static_cast<std::size_t>(2 * n), 0.0);
  if (j.contains("amplitude")) {
    const auto& a = j.at("amplitude");
    if (r.object(a, "/amplitude")) {
      r.allowed(a, "/amplitude", {"center", "inner_radius", "outer_radius"});
      if (auto v = r.number(a, "/amplitude", "inner_radius")) inner = *v;
      if (auto v = r.number(a, "/amplitude", "outer_radius")) outer = *v;
      if (a.contains("center"))
        if (auto v = r.numbers(a.at("center"), "/amplitude/center")) {
          if (v->size() == center.size())
            center = *v;
          else
            r.error("/amplitude/center", "expected 2n = " + std::to_string(2 * n) + " coordinates");
        }
    }
  }
  if (!(inner >= 0.0)) r.error("/amplitude/inner_radius", "must be >= 0");
  if (!(outer > inner)) r.error("/amplitude/outer_radius", "inner radius must be below the outer radius");
  if (inner >= 0.0 && outer > inner) c.amplitude = TensorBump::uniform(n, inner, outer, center);

  if (j.contains("lambda"))
    if (auto l = read_lambdas(r, j.at("lambda"), "/lambda")) c.lambdas = *l;

  if (j.contains("hbar_exps"))
    if (auto v = r.integers(j.at("hbar_exps"), "/hbar_exps")) {
      for (auto e : *v) {
        if (e < 1) r.error("/hbar_exps", "hbar exponents must be >= 1 (hbar <= 1/2)");
        c.hbar_exps.push_back(static_cast<int>(e));
      }
    }

  if (j.contains("policy")) read_policy(r, j.at("policy"), c.policy);

  if (auto v = r.number(j, "", "tolerance")) {
    if (*v > 0.0)
      c.tolerance = *v;
    else
      r.error("/tolerance", "must be positive");
  }

  if (!j.contains("seed")) {
    r.error("/seed", "missing required field");
  } else if (auto s = r.integer(j, "", "seed")) {
    if (*s < 0)
      r.error("/seed", "must be nonnegative");
    else
      c.seed = static_cast<std::uint64_t>(*s);
  }

  if (auto v = r.string(j, "", "output_dir")) {
    if (v->empty())
      r.error("/output_dir", "must be nonempty");
    else
      c.output_dir = *v;
  }

  if (j.contains("classify") && r.object(j.at("classify"), "/classify")) {
    const auto& s = j.at("classify");
    r.allowed(s, "/classify", {"samples_per_axis", "expect_left", "expect_right"});
    if (auto v = r.integer(s, "/classify", "samples_per_axis")) {
      if (*v >= 3)
        c.classify.samples_per_axis = static_cast<std::size_t>(*v);
      else
        r.error("/classify/samples_per_axis", "must be >= 3");
    }
    if (auto v = r.integer(s, "/classify", "expect_left")) c.classify.expect_left = static_cast<int>(*v);
    if (auto v = r.integer(s, "/classify", "expect_right")) c.classify.expect_right = static_cast<int>(*v);
  }

  if (j.contains("components") && r.object(j.at("components"), "/components")) {
    const auto& s = j.at("components");
    r.allowed(s, "/components", {"which", "factor", "probes"});
    if (s.contains("which")) {
      const auto& w = s.at("which");
      if (!w.is_array() || w.empty()) {
        r.error("/components/which", "expected a nonempty array");
      } else {
        c.components.which.clear();
        for (std::size_t i = 0; i < w.size(); ++i) {
          const auto name = w[i].is_string() ? std::optional(w[i].get<std::string>()) : std::nullopt;
          const auto which = name ? parse_component_which(*name) : std::nullopt;
          if (which)
            c.components.which.push_back(*which);
          else
            r.error("/components/which/" + std::to_string(i), "expected \"shell\" or \"near-critical\"");
        }
      }
    }
    positive(r, "/components/factor", r.number(s, "/components", "factor"), c.components.factor, 1.0);
    std::optional<long long> probes = r.integer(s, "/components", "probes");
    if (probes) {
      if (*probes >= 1)
        c.components.probes = static_cast<int>(*probes);
      else
        r.error("/components/probes", "must be >= 1");
    }
  }

  if (j.contains("scaling") && r.object(j.at("scaling"), "/scaling")) {
    const auto& s = j.at("scaling");
    r.allowed(s, "/scaling", {"lambda", "R", "d", "tolerance", "ratio_spread", "max_count"});
    if (auto v = r.number(s, "/scaling", "lambda")) {
      if (*v > 0.0)
        c.scaling.lambda = *v;
      else
        r.error("/scaling/lambda", "lambda must be positive");
    }
    if (s.contains("R"))
      if (auto v = r.numbers(s.at("R"), "/scaling/R")) {
        c.scaling.R = *v;
        for (std::size_t i = 0; i < v->size(); ++i) {
          if (!((*v)[i] >= 1.0)) r.error("/scaling/R/" + std::to_string(i), "R must be >= 1");
          if (i > 0 && !((*v)[i] > (*v)[i - 1])) r.error("/scaling/R/" + std::to_string(i), "R must ascend");
        }
      }
    if (auto v = r.number(s, "/scaling", "d")) {
      if (*v > 0.0 && *v <= 0.5 * n)
        c.scaling.d = *v;
      else
        r.error("/scaling/d", "d must lie in (0, n/2]");
    }
    positive(r, "/scaling/tolerance", r.number(s, "/scaling", "tolerance"), c.scaling.tolerance, 0.0);
    positive(r, "/scaling/ratio_spread", r.number(s, "/scaling", "ratio_spread"), c.scaling.ratio_spread, 1.0);
    if (auto v = r.integer(s, "/scaling", "max_count")) {
      if (*v >= 1)
        c.scaling.max_count = static_cast<std::size_t>(*v);
      else
        r.error("/scaling/max_count", "must be positive");
    }
  }

  if (j.contains("orthogonality") && r.object(j.at("orthogonality"), "/orthogonality")) {
    const auto& s = j.at("orthogonality");
    r.allowed(s, "/orthogonality", {"hbar_exp", "sigma", "theta", "max_separation", "max_count"});
    if (auto v = r.integer(s, "/orthogonality", "hbar_exp")) {
      if (*v >= 1)
        c.orthogonality.hbar_exp = static_cast<int>(*v);
      else
        r.error("/orthogonality/hbar_exp", "must be >= 1");
    }
    if (s.contains("sigma"))
      if (auto v = r.integers(s.at("sigma"), "/orthogonality/sigma"))
        for (auto e : *v) {
          if (e != 1 && e != -1) r.error("/orthogonality/sigma", "entries must be +1 or -1");
          c.orthogonality.sigma.push_back(static_cast<int>(e));
        }
    if (s.contains("theta"))
      if (auto v = r.integers(s.at("theta"), "/orthogonality/theta")) {
        if (v->size() != static_cast<std::size_t>(n)) r.error("/orthogonality/theta", "expected n entries");
        for (auto e : *v) c.orthogonality.theta.push_back(static_cast<long>(e));
      }
    if (auto v = r.integer(s, "/orthogonality", "max_separation")) {
      if (*v >= 1)
        c.orthogonality.max_separation = static_cast<int>(*v);
      else
        r.error("/orthogonality/max_separation", "must be >= 1");
    }
    if (auto v = r.integer(s, "/orthogonality", "max_count")) {
      if (*v >= 1)
        c.orthogonality.max_count = static_cast<std::size_t>(*v);
      else
        r.error("/orthogonality/max_count", "must be positive");
    }
  }

  if (j.contains("lemmas") && r.object(j.at("lemmas"), "/lemmas")) {
    const auto& s = j.at("lemmas");
    r.allowed(s, "/lemmas", {"instances"});
    if (auto v = r.integer(s, "/lemmas", "instances")) {
      if (*v >= 1)
        c.lemmas.instances = static_cast<std::size_t>(*v);
      else
        r.error("/lemmas/instances", "must be positive");
    }
  }

  // Cross-field requirements per experiment.
  switch (c.experiment) {
    case ExperimentKind::Decay:
      if (c.lambdas.size() < 2)
        r.error("/lambda", "decay needs a lambda list");
      else
        try {
          check_geometric(c.lambdas);
        } catch (const ConfigError& e) {
          r.error("/lambda", e.what());
        }
      break;
    case ExperimentKind::Components:
    case ExperimentKind::Orthogonality:
      if (c.lambdas.size() != 1) r.error("/lambda", experiment_name(c.experiment) + " runs at a single lambda");
      break;
    case ExperimentKind::Scaling:
      if (phase && (!phase->model || (phase->model->kind != ModelKind::Cusp12 &&
                                      phase->model->kind != ModelKind::Morin)))
        r.error("/phase", "scaling needs a homogeneous model phase (cusp12 or morin)");
      if (!c.lambdas.empty()) try {
          check_geometric(c.lambdas);
        } catch (const ConfigError& e) {
          r.error("/lambda", e.what());
        }
      break;
    default: break;
  }

  res.diagnostics = std::move(r.diags);
  if (res.diagnostics.empty()) res.config = std::move(c);
  return res;
}

ConfigResult load_config(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) return {std::nullopt, {{"", "cannot read " + path.string()}}};
  json j;
  try {
    j = json::parse(f);
  } catch (const json::parse_error& e) {
    return {std::nullopt, {{"", std::string("invalid JSON: ") + e.what()}}};
  }
  return parse_config(j);
}

std::string format_diagnostics(const std::vector<Diagnostic>& diags) {
  std::string out;
  for (const auto& d : diags) out += (d.path.empty() ? "/" : d.path) + ": " + d.message + "\n";
  return out;
}

}  // namespace foldlab
