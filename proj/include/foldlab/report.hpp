#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "foldlab/experiments.hpp"
#include "foldlab/lemmas.hpp"
#include "foldlab/scaling.hpp"
#include "foldlab/singularity.hpp"

namespace foldlab {

using Json = nlohmann::ordered_json;

// Shortest text that reads back as the same double.
std::string format_number(double v);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::string str() const;
};

CsvTable decay_table(const DecayFit& fit);
CsvTable component_table(const std::vector<ComponentRow>& rows);
CsvTable scaling_table(const ScalingBoundResult& res);
CsvTable lower_bound_table(const std::vector<double>& lambdas, const std::vector<LowerBoundProbe>& probes,
                           const std::vector<bool>& stable);
CsvTable orthogonality_table(const OrthogonalityProbe& probe);
CsvTable lemma_table(const std::vector<std::pair<LemmaMode, LemmaSelfTest>>& runs);

Json to_json(const DecayFit& fit);
Json to_json(const ComponentSweep& sweep);
Json to_json(const ScalingBoundResult& res);
Json to_json(const OrthogonalityProbe& probe);
Json to_json(const SingularityReport& report);
Json to_json(const LemmaSelfTest& t);

// {experiment, phase, n, k_left, k_right, fitted_d, predicted_d, tolerance, verdict}
// followed by "detail"; absent values are null.
struct Summary {
  std::string experiment;
  std::string phase;
  int n = 1;
  std::optional<int> k_left, k_right;
  std::optional<double> fitted_d, predicted_d, tolerance;
  Verdict verdict = Verdict::Inconclusive;
  Json detail = Json::object();
};

Json to_json(const Summary& s);
Summary summary_from_json(const Json& j);

struct ChartSeries {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

// Log-log line chart.
std::string svg_chart(const std::string& title, const std::string& x_label, const std::string& y_label,
                      const std::vector<ChartSeries>& series);

// Writes the text to the path; throws std::runtime_error naming the path on failure.
void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace foldlab
