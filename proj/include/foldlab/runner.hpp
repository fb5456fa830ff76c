#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "foldlab/config.hpp"
#include "foldlab/report.hpp"

namespace foldlab {

enum ExitCode { kExitPass = 0, kExitFail = 1, kExitInconclusive = 2, kExitConfig = 3 };

int exit_code(Verdict v);

struct RunOptions {
  std::optional<std::string> output_dir;  // overrides the config
  int threads = 0;                        // 0: OpenMP default
  bool svg = false;
};

struct RunOutcome {
  Summary summary;
  Json metadata;
  std::vector<std::filesystem::path> files;
};

// Both projection types over the amplitude support.
struct Classification {
  SingularityReport left;
  SingularityReport right;
  std::string error;  // nonempty when the scan could not complete
};

Classification classify_phase(const PolynomialPhase& phase, const TensorBump& amplitude, std::size_t samples_per_axis);

// Executes the experiment and writes summary.json plus its tables.
RunOutcome run_experiment(const ExperimentConfig& config, const RunOptions& options);

// Catalog of built-in models with their predicted exponents.
std::string list_models();

}  // namespace foldlab
