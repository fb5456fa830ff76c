#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "foldlab/amplitude.hpp"
#include "foldlab/experiments.hpp"
#include "foldlab/phase.hpp"

namespace foldlab {

enum class ExperimentKind { Classify, Decay, Components, Scaling, Orthogonality, Lemmas };

std::string experiment_name(ExperimentKind kind);
std::optional<ExperimentKind> parse_experiment(const std::string& name);

struct PhaseConfig {
  std::optional<ModelSpec> model;  // empty for custom phases
  PolynomialPhase phase;
  std::string label;
};

struct PolicyConfig {
  double points_per_wavelength = 8.0;
  std::size_t max_count = 8192;
  std::size_t min_count = 64;
  double stability_tol = 1e-3;
};

struct ClassifyConfig {
  std::size_t samples_per_axis = 0;  // 0: 129 for n = 1, 17 otherwise
  std::optional<int> expect_left;
  std::optional<int> expect_right;
};

struct ComponentsConfig {
  std::vector<ComponentWhich> which{ComponentWhich::Shell, ComponentWhich::NearCritical};
  double factor = 10.0;
  int probes = 10;  // reconstruction probes
};

struct ScalingConfig {
  double lambda = 1024.0;
  std::vector<double> R{1.0, 2.0, 4.0};
  std::optional<double> d;  // predicted exponent when empty
  double tolerance = 0.10;
  double ratio_spread = 3.0;  // lower-bound ratios max/min
  std::optional<std::size_t> max_count;  // overrides the policy for the R-sweep
};

struct OrthogonalityConfig {
  std::optional<int> hbar_exp;  // crossover exponent when empty
  std::vector<int> sigma;       // all + when empty and k > 1
  std::vector<long> theta;      // origin when empty
  int max_separation = 6;
  std::size_t max_count = 256;
};

struct LemmasConfig {
  std::size_t instances = 10000;
};

// Validated experiment description.
struct ExperimentConfig {
  ExperimentKind experiment = ExperimentKind::Classify;
  PhaseConfig phase;
  TensorBump amplitude;
  std::vector<double> lambdas;
  std::vector<int> hbar_exps;  // empty: every admissible exponent
  PolicyConfig policy;
  double tolerance = 0.05;
  std::uint64_t seed = 0;
  std::string output_dir = "out";
  ClassifyConfig classify;
  ComponentsConfig components;
  ScalingConfig scaling;
  OrthogonalityConfig orthogonality;
  LemmasConfig lemmas;
};

struct Diagnostic {
  std::string path;  // JSON pointer-like location, e.g. "/policy/max_count"
  std::string message;
};

struct ConfigResult {
  std::optional<ExperimentConfig> config;  // set iff diagnostics is empty
  std::vector<Diagnostic> diagnostics;
};

ConfigResult parse_config(const nlohmann::json& j);
ConfigResult load_config(const std::filesystem::path& path);

std::string format_diagnostics(const std::vector<Diagnostic>& diags);

}  // namespace foldlab
