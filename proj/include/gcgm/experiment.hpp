#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "gcgm/config.hpp"
#include "gcgm/copula.hpp"
#include "gcgm/criteria.hpp"
#include "gcgm/estimator.hpp"
#include "gcgm/simulation.hpp"

namespace gcgm {

/// Deterministic per-replicate seed for a named random stream.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t replicate,
                          std::uint64_t stream);

struct CvSelection {
  std::vector<double> grid;
  /// Validation likelihood loss per grid point (averaged over folds).
  std::vector<double> losses;
  std::size_t index = 0;
  double lambda = 0.0;
};

/// Cross-validated choice of lambda on a grid built from full_s. With
/// cfg.cv_folds == 2 the rows are split once into halves; otherwise k-fold.
/// Each part is transformed on its own rows.
CvSelection cross_validate(const DataMatrix& data, const ExperimentConfig& cfg,
                           const SymMatrix& full_s, std::uint64_t seed);

struct SelectionRow {
  int replicate = 0;
  Criterion criterion = Criterion::gic;
  std::size_t index = 0;
  double lambda = 0.0;
  MetricsRecord metrics;
  double df_gic = 0.0;
  double df_aic = 0.0;
  double runtime_seconds = 0.0;
  bool failed = false;
  std::string error;
};

inline constexpr std::size_t kMetricCount = 10;
/// lambda, kl_loss, op_norm, l1_norm, fro_norm, specificity, sensitivity,
/// mcc, df_gic, df_aic.
extern const std::array<const char*, kMetricCount> kMetricNames;

std::array<std::optional<double>, kMetricCount> metric_values(const SelectionRow& row);

struct AggregateRow {
  Criterion criterion = Criterion::gic;
  /// Replicates that did not fail.
  int count = 0;
  std::array<std::optional<double>, kMetricCount> mean;
  /// Sample standard deviation over sqrt(count).
  std::array<std::optional<double>, kMetricCount> se;
};

struct ResultsTable {
  std::vector<SelectionRow> rows;
  std::vector<AggregateRow> aggregates;

  std::string replicates_csv(bool timings = false) const;
  std::string summary_csv() const;
};

/// Mean and standard error per criterion, in criterion order of first
/// appearance.
std::vector<AggregateRow> aggregate(const std::vector<SelectionRow>& rows);

ResultsTable run_simulation(const ExperimentConfig& cfg);

struct BiasCurveRow {
  double lambda = 0.0;
  double df_gic = 0.0;
  double df_aic = 0.0;
  /// n tr{W (sigma0 - S)}.
  double df_kl_true = 0.0;
};

std::vector<BiasCurveRow> run_biascurve(const ExperimentConfig& cfg);
std::string biascurve_csv(const std::vector<BiasCurveRow>& rows);

struct FitResult {
  std::vector<std::string> names;
  std::vector<double> grid;
  Criterion criterion = Criterion::gic;
  std::size_t index = 0;
  PrecisionEstimate selected;
  double value = 0.0;
  double df_gic = 0.0;
  double df_aic = 0.0;
};

FitResult fit_dataset(const ExperimentConfig& cfg, const DataMatrix& data);
/// Reads cfg.data, then fits.
FitResult fit_dataset(const ExperimentConfig& cfg);

std::string fit_omega_csv(const FitResult& fit);
std::string fit_edges_csv(const FitResult& fit);
std::string fit_summary_csv(const FitResult& fit);

/// Writes every table of a run into cfg.out; returns the paths written.
std::vector<std::string> write_outputs(const ExperimentConfig& cfg,
                                       const ResultsTable& table);
std::vector<std::string> write_outputs(const ExperimentConfig& cfg,
                                       const std::vector<BiasCurveRow>& curve);
std::vector<std::string> write_outputs(const ExperimentConfig& cfg,
                                       const FitResult& fit);

}  // namespace gcgm
