#include "foldlab/report.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <stdexcept>

namespace foldlab {

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

namespace {

std::string fmt(std::size_t v) { return std::to_string(v); }
std::string fmt(int v) { return std::to_string(v); }
std::string fmt(bool v) { return v ? "1" : "0"; }

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

Json opt(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }
Json opt(const std::optional<int>& v) { return v ? Json(*v) : Json(nullptr); }

std::string escape_xml(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

std::string CsvTable::str() const {
  std::string out;
  for (std::size_t i = 0; i < header.size(); ++i) out += (i ? "," : "") + csv_field(header[i]);
  out += '\n';
  for (const auto& r : rows) {
    for (std::size_t i = 0; i < r.size(); ++i) out += (i ? "," : "") + csv_field(r[i]);
    out += '\n';
  }
  return out;
}

CsvTable decay_table(const DecayFit& fit) {
  CsvTable t{{"lambda", "norm", "iterations", "residual", "grid_x", "grid_theta", "stable"}, {}};
  for (const auto& p : fit.points)
    t.rows.push_back({format_number(p.lambda), format_number(p.norm), fmt(p.iterations), format_number(p.residual),
                      fmt(p.grid_x), fmt(p.grid_theta), fmt(p.stable)});
  return t;
}

CsvTable component_table(const std::vector<ComponentRow>& rows) {
  CsvTable t{{"lambda", "hbar_exp", "kind", "sigma", "norm", "bound", "ratio", "skipped"}, {}};
  for (const auto& r : rows)
    t.rows.push_back({format_number(r.lambda), fmt(r.hbar_exp), component_kind_name(r.kind), r.sigma,
                      format_number(r.norm), format_number(r.bound), format_number(r.ratio), fmt(r.skipped)});
  return t;
}

CsvTable scaling_table(const ScalingBoundResult& res) {
  CsvTable t{{"R", "norm", "bound", "stable"}, {}};
  for (const auto& r : res.rows)
    t.rows.push_back({format_number(r.R), format_number(r.norm), format_number(r.bound), fmt(r.stable)});
  return t;
}

CsvTable lower_bound_table(const std::vector<double>& lambdas, const std::vector<LowerBoundProbe>& probes,
                           const std::vector<bool>& stable) {
  CsvTable t{{"lambda", "ratio", "sigma_max", "u_norm", "tu_norm", "stable"}, {}};
  for (std::size_t i = 0; i < probes.size(); ++i)
    t.rows.push_back({format_number(lambdas[i]), format_number(probes[i].ratio), format_number(probes[i].sigma_max),
                      format_number(probes[i].u_norm), format_number(probes[i].tu_norm), fmt(bool(stable[i]))});
  return t;
}

CsvTable orthogonality_table(const OrthogonalityProbe& probe) {
  CsvTable t{{"separation", "pairs", "tt_star", "tstar_t"}, {}};
  for (const auto& r : probe.rows)
    t.rows.push_back({fmt(r.separation), fmt(r.pairs), format_number(r.tt_star), format_number(r.tstar_t)});
  return t;
}

CsvTable lemma_table(const std::vector<std::pair<LemmaMode, LemmaSelfTest>>& runs) {
  CsvTable t{{"mode", "draws", "satisfying", "holds", "fails", "violated"}, {}};
  for (const auto& [mode, r] : runs)
    t.rows.push_back({mode == LemmaMode::Envelope ? "envelope" : "growth", fmt(r.draws), fmt(r.satisfying),
                      fmt(r.holds), fmt(r.fails), fmt(r.violated)});
  return t;
}

Json to_json(const DecayFit& fit) {
  Json j;
  j["points"] = Json::array();
  for (const auto& p : fit.points)
    j["points"].push_back({{"lambda", p.lambda},
                           {"norm", p.norm},
                           {"iterations", p.iterations},
                           {"residual", p.residual},
                           {"grid_x", p.grid_x},
                           {"grid_theta", p.grid_theta},
                           {"stable", p.stable}});
  j["intercept"] = fit.fit ? Json(fit.fit->log_c) : Json(nullptr);
  j["residual_rms"] = fit.fit ? Json(fit.fit->rms) : Json(nullptr);
  j["fit_points"] = fit.fit ? fit.fit->points : 0;
  j["monotone"] = fit.monotone;
  j["reason"] = fit.reason;
  return j;
}

Json to_json(const ComponentSweep& sweep) {
  Json j;
  j["which"] = component_which_name(sweep.which);
  j["factor"] = sweep.factor;
  j["max_ratio"] = sweep.max_ratio;
  j["verdict"] = verdict_name(sweep.verdict);
  j["reason"] = sweep.reason;
  j["slopes"] = Json::array();
  for (const auto& s : sweep.slopes)
    j["slopes"].push_back({{"series", s.series}, {"slope", s.fit.slope}, {"rms", s.fit.rms}});
  return j;
}

Json to_json(const ScalingBoundResult& res) {
  Json j;
  j["bound_exponent"] = res.bound_exponent;
  j["all_stable"] = res.all_stable;
  j["non_increasing"] = res.non_increasing;
  j["rows"] = Json::array();
  for (const auto& r : res.rows)
    j["rows"].push_back({{"R", r.R},
                         {"norm", r.norm},
                         {"bound", r.bound},
                         {"stable", r.stable},
                         {"undersampling", r.undersampling},
                         {"grid_x", r.estimate.grid_x},
                         {"grid_theta", r.estimate.grid_theta}});
  return j;
}

Json to_json(const OrthogonalityProbe& probe) {
  Json j;
  j["hbar_exp"] = probe.hbar_exp;
  j["sigma"] = probe.sigma;
  j["theta"] = probe.theta;
  j["pieces"] = probe.xs.size();
  j["tau"] = probe.tau;
  j["reason"] = probe.reason;
  return j;
}

Json to_json(const SingularityReport& r) {
  Json j;
  j["side"] = side_name(r.side);
  j["samples"] = r.samples;
  j["critical_samples"] = r.critical_samples;
  j["max_corank"] = r.max_corank;
  j["type_k"] = r.type_k;
  j["kappa"] = r.kappa;
  j["rank_drops_simply"] = r.rank_drops_simply;
  j["region"] = {{"lo", r.region.lo}, {"hi", r.region.hi}};
  return j;
}

Json to_json(const LemmaSelfTest& t) {
  return {{"draws", t.draws}, {"satisfying", t.satisfying}, {"holds", t.holds}, {"fails", t.fails},
          {"violated", t.violated}};
}

Json to_json(const Summary& s) {
  Json j;
  j["experiment"] = s.experiment;
  j["phase"] = s.phase;
  j["n"] = s.n;
  j["k_left"] = opt(s.k_left);
  j["k_right"] = opt(s.k_right);
  j["fitted_d"] = opt(s.fitted_d);
  j["predicted_d"] = opt(s.predicted_d);
  j["tolerance"] = opt(s.tolerance);
  j["verdict"] = verdict_name(s.verdict);
  j["detail"] = s.detail;
  return j;
}

Summary summary_from_json(const Json& j) {
  auto od = [&](const char* key) -> std::optional<double> {
    return j.at(key).is_null() ? std::nullopt : std::optional<double>(j.at(key).get<double>());
  };
  auto oi = [&](const char* key) -> std::optional<int> {
    return j.at(key).is_null() ? std::nullopt : std::optional<int>(j.at(key).get<int>());
  };
  Summary s;
  s.experiment = j.at("experiment").get<std::string>();
  s.phase = j.at("phase").get<std::string>();
  s.n = j.at("n").get<int>();
  s.k_left = oi("k_left");
  s.k_right = oi("k_right");
  s.fitted_d = od("fitted_d");
  s.predicted_d = od("predicted_d");
  s.tolerance = od("tolerance");
  const auto v = j.at("verdict").get<std::string>();
  s.verdict = v == "pass" ? Verdict::Pass : v == "fail" ? Verdict::Fail : Verdict::Inconclusive;
  s.detail = j.value("detail", Json::object());
  return s;
}

std::string svg_chart(const std::string& title, const std::string& x_label, const std::string& y_label,
                      const std::vector<ChartSeries>& series) {
  constexpr double W = 640, H = 420, L = 70, R = 20, T = 40, B = 50;
  double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
  for (const auto& s : series)
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (!(s.x[i] > 0.0) || !(s.y[i] > 0.0)) continue;
      x0 = std::min(x0, std::log10(s.x[i]));
      x1 = std::max(x1, std::log10(s.x[i]));
      y0 = std::min(y0, std::log10(s.y[i]));
      y1 = std::max(y1, std::log10(s.y[i]));
    }
  if (!(x1 >= x0)) x0 = 0, x1 = 1, y0 = 0, y1 = 1;
  if (x1 - x0 < 1e-12) x0 -= 0.5, x1 += 0.5;
  if (y1 - y0 < 1e-12) y0 -= 0.5, y1 += 0.5;
  auto px = [&](double v) { return L + (std::log10(v) - x0) / (x1 - x0) * (W - L - R); };
  auto py = [&](double v) { return H - B - (std::log10(v) - y0) / (y1 - y0) * (H - T - B); };
  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

  std::string out = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"420\">\n";
  out += "<rect width=\"640\" height=\"420\" fill=\"white\"/>\n";
  out += "<text x=\"320\" y=\"24\" text-anchor=\"middle\" font-size=\"16\">" + escape_xml(title) + "</text>\n";
  out += "<line x1=\"70\" y1=\"370\" x2=\"620\" y2=\"370\" stroke=\"black\"/>\n";
  out += "<line x1=\"70\" y1=\"40\" x2=\"70\" y2=\"370\" stroke=\"black\"/>\n";
  out += "<text x=\"345\" y=\"405\" text-anchor=\"middle\" font-size=\"13\">" + escape_xml(x_label) +
         " (log)</text>\n";
  out += "<text x=\"18\" y=\"205\" text-anchor=\"middle\" font-size=\"13\" transform=\"rotate(-90 18 205)\">" +
         escape_xml(y_label) + " (log)</text>\n";
  for (int e = static_cast<int>(std::ceil(x0)); e <= static_cast<int>(std::floor(x1)); ++e)
    out += "<text x=\"" + format_number(px(std::pow(10.0, e))) + "\" y=\"388\" text-anchor=\"middle\" font-size=\"11\">1e" +
           std::to_string(e) + "</text>\n";
  for (int e = static_cast<int>(std::ceil(y0)); e <= static_cast<int>(std::floor(y1)); ++e)
    out += "<text x=\"64\" y=\"" + format_number(py(std::pow(10.0, e))) + "\" text-anchor=\"end\" font-size=\"11\">1e" +
           std::to_string(e) + "</text>\n";
  for (std::size_t s = 0; s < series.size(); ++s) {
    const char* c = colors[s % 6];
    std::string pts;
    for (std::size_t i = 0; i < series[s].x.size(); ++i) {
      if (!(series[s].x[i] > 0.0) || !(series[s].y[i] > 0.0)) continue;
      pts += format_number(px(series[s].x[i])) + "," + format_number(py(series[s].y[i])) + " ";
    }
    out += "<polyline fill=\"none\" stroke=\"" + std::string(c) + "\" stroke-width=\"2\" points=\"" + pts + "\"/>\n";
    out += "<text x=\"" + format_number(W - R - 150) + "\" y=\"" + format_number(T + 16 + 16.0 * s) +
           "\" font-size=\"12\" fill=\"" + c + "\">" + escape_xml(series[s].label) + "</text>\n";
  }
  return out + "</svg>\n";
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open " + path.string() + " for writing");
  f << text;
  if (!f) throw std::runtime_error("write failed: " + path.string());
}

}  // namespace foldlab
