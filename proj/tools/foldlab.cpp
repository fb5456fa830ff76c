#include <iostream>

#include <CLI11.hpp>

#include "foldlab/errors.hpp"
#include "foldlab/runner.hpp"

using namespace foldlab;

int main(int argc, char** argv) {
  CLI::App app{"foldlab: oscillatory integral operators with fold and cusp singularities"};
  app.require_subcommand(1);

  std::string config_path, out_dir;
  int threads = 0;
  bool svg = false;

  auto* run = app.add_subcommand("run", "run the experiment described by a config file");
  run->add_option("--config", config_path, "experiment config (JSON)")->required();
  run->add_option("--out", out_dir, "output directory (overrides the config)");
  run->add_option("--threads", threads, "worker threads (0: all)")->check(CLI::NonNegativeNumber);
  run->add_flag("--svg", svg, "emit SVG charts");

  auto* validate = app.add_subcommand("validate", "check a config file without running it");
  validate->add_option("--config", config_path, "experiment config (JSON)")->required();

  app.add_subcommand("list-models", "print the model catalog");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : kExitConfig;
  }

  if (app.got_subcommand("list-models")) {
    std::cout << list_models();
    return kExitPass;
  }

  const ConfigResult cfg = load_config(config_path);
  if (!cfg.config) {
    std::cerr << format_diagnostics(cfg.diagnostics);
    return kExitConfig;
  }
  if (app.got_subcommand("validate")) {
    std::cout << "ok\n";
    return kExitPass;
  }

  RunOptions opts;
  if (!out_dir.empty()) opts.output_dir = out_dir;
  opts.threads = threads;
  opts.svg = svg;
  try {
    const RunOutcome r = run_experiment(*cfg.config, opts);
    std::cout << to_json(r.summary).dump(2) << "\n";
    return exit_code(r.summary.verdict);
  } catch (const ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFail;
  }
}
