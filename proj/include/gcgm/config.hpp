#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gcgm/criteria.hpp"
#include "gcgm/estimator.hpp"
#include "gcgm/simulation.hpp"

namespace gcgm {

enum class Mode { sim, fit, biascurve };

std::string to_string(Mode mode);

struct ExperimentConfig {
  Mode mode = Mode::sim;
  ModelKind model = ModelKind::band;
  Index d = 30;
  Index n = 100;
  int replicates = 100;
  PenaltySpec penalty;
  std::vector<Criterion> criteria = {Criterion::gic,  Criterion::aic,
                                     Criterion::bic,  Criterion::gbic,
                                     Criterion::cv,   Criterion::kl_oracle};
  int grid = 100;
  double grid_ratio = 0.01;
  /// Grid length used for cross-validation only.
  int cv_grid = 200;
  /// 2 means a single half/half split; larger values run k-fold.
  int cv_folds = 2;
  std::uint64_t seed = 42;
  bool copula = true;
  bool redraw_truth = false;
  std::string data;
  std::string out = ".";
  int threads = 1;
  /// Adds per-row runtimes to the replicate table (breaks byte determinism).
  bool timings = false;
  SolverOptions solver;
};

/// Builds a configuration from command-line arguments (program name
/// excluded, subcommand first). Values from --config <file.json> are applied
/// first and flags override them. Throws ConfigError listing every problem.
ExperimentConfig parse_config(const std::vector<std::string>& args);

/// Usage text for the CLI.
std::string config_usage();

}  // namespace gcgm
