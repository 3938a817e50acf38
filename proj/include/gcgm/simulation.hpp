#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "gcgm/copula.hpp"
#include "gcgm/estimator.hpp"
#include "gcgm/numerics.hpp"

namespace gcgm {

enum class ModelKind { band, sparse_random, dense_random };

std::string to_string(ModelKind kind);
/// Accepts band, sparse, dense.
ModelKind parse_model_kind(const std::string& name);

using Edge = std::pair<Index, Index>;

/// Simulation ground truth. Edges are (i, j) with i < j in row-major order.
struct TrueModel {
  SymMatrix omega0;
  SymMatrix sigma0;
  std::vector<Edge> edges;
  ModelKind kind = ModelKind::band;

  Index order() const noexcept { return omega0.order(); }
  /// 0/1 edge indicator with unit diagonal.
  Mask edge_mask() const;
};

inline constexpr double kBandDecay = 0.4;
inline constexpr double kBandMinEigen = 0.1;
inline constexpr double kSparseEdgeWeight = 0.3;
inline constexpr double kDenseEdgeWeight = 0.1;
inline constexpr double kRandomMinEigen = 0.2;

/// omega0(i,j) = 0.4^|i-j| inside the band, unit diagonal, diagonal shifted
/// up when the smallest eigenvalue falls below 0.1.
TrueModel band_model(Index d, Index bandwidth = 4);

/// Erdos-Renyi graph with a constant edge weight; the diagonal is set to
/// |min eig of the off-diagonal part| + 0.2.
TrueModel random_model(Index d, double edge_prob, double edge_weight,
                       std::uint64_t seed,
                       ModelKind kind = ModelKind::sparse_random);

/// The three benchmark families: band (bandwidth 4), sparse random (edge
/// probability 3/d) and dense random (edge probability 0.9).
TrueModel make_model(ModelKind kind, Index d, std::uint64_t seed);

/// Rescales omega0 to D omega0 D with D = diag(sqrt(sigma0_ii)) so that
/// sigma0 becomes a correlation matrix. Rank-based and standardised
/// pseudo-samples estimate this version of the model.
TrueModel correlation_scaled(const TrueModel& model);

/// n draws of N(0, sigma0) as rows L z.
DataMatrix sample_mvn(const TrueModel& model, Index n, std::uint64_t seed);

struct ConfusionCounts {
  long tp = 0;
  long fp = 0;
  long tn = 0;
  long fn = 0;
};

/// Counts over the strict upper triangle.
ConfusionCounts confusion_counts(const Mask& truth, const Mask& estimate);

struct SupportScores {
  /// Percentages; empty when the score is undefined for the counts.
  std::optional<double> specificity;
  std::optional<double> sensitivity;
  std::optional<double> mcc;
};

SupportScores support_scores(const ConfusionCounts& counts);

struct MetricsRecord {
  double kl_loss = 0.0;
  double op_norm = 0.0;
  double l1_norm = 0.0;
  double fro_norm = 0.0;
  std::optional<double> specificity;
  std::optional<double> sensitivity;
  std::optional<double> mcc;
};

/// kl_loss = tr(sigma0 W) - log|sigma0 W| - d (no factor 1/2); the norms
/// are spectral, maximum absolute column sum and Frobenius norms of
/// W - omega0.
MetricsRecord evaluate(const TrueModel& model, const PrecisionEstimate& est);

}  // namespace gcgm
