#include "gcgm/simulation.hpp"

#include <cmath>
#include <random>

#include "gcgm/errors.hpp"

namespace gcgm {

namespace {

TrueModel finish(SymMatrix omega0, ModelKind kind) {
  TrueModel model;
  const Index d = omega0.order();
  for (Index i = 0; i < d; ++i) {
    for (Index j = i + 1; j < d; ++j) {
      if (omega0(i, j) != 0.0) model.edges.emplace_back(i, j);
    }
  }
  model.sigma0 = inv_pd(omega0);
  model.omega0 = std::move(omega0);
  model.kind = kind;
  return model;
}

}  // namespace

std::string to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::band:
      return "band";
    case ModelKind::sparse_random:
      return "sparse";
    case ModelKind::dense_random:
      return "dense";
  }
  return "unknown";
}

ModelKind parse_model_kind(const std::string& name) {
  if (name == "band") return ModelKind::band;
  if (name == "sparse") return ModelKind::sparse_random;
  if (name == "dense") return ModelKind::dense_random;
  throw InvalidInput("unknown model '" + name + "'");
}

Mask TrueModel::edge_mask() const {
  const Index d = order();
  Mask mask = Mask::Identity(d, d);
  for (const auto& [i, j] : edges) {
    mask(i, j) = 1;
    mask(j, i) = 1;
  }
  return mask;
}

TrueModel band_model(Index d, Index bandwidth) {
  if (bandwidth < 1 || d <= bandwidth) {
    throw InvalidDimension("band model needs d > bandwidth >= 1");
  }
  SymMatrix omega = SymMatrix::identity(d);
  for (Index i = 0; i < d; ++i) {
    for (Index gap = 1; gap <= bandwidth && i + gap < d; ++gap) {
      omega.set(i, i + gap, std::pow(kBandDecay, static_cast<double>(gap)));
    }
  }
  const double smallest = min_eigenvalue(omega);
  if (smallest < kBandMinEigen) omega.add_to_diagonal(kBandMinEigen - smallest);
  return finish(std::move(omega), ModelKind::band);
}

TrueModel random_model(Index d, double edge_prob, double edge_weight,
                       std::uint64_t seed, ModelKind kind) {
  if (d < 2) throw InvalidDimension("random model needs d >= 2");
  if (!(edge_prob > 0.0 && edge_prob <= 1.0)) {
    throw InvalidInput("edge probability must be in (0,1]");
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  SymMatrix omega(d);
  for (Index i = 0; i < d; ++i) {
    for (Index j = i + 1; j < d; ++j) {
      if (unit(rng) < edge_prob) omega.set(i, j, edge_weight);
    }
  }
  omega.add_to_diagonal(std::abs(min_eigenvalue(omega)) + kRandomMinEigen);
  return finish(std::move(omega), kind);
}

TrueModel make_model(ModelKind kind, Index d, std::uint64_t seed) {
  switch (kind) {
    case ModelKind::band:
      return band_model(d);
    case ModelKind::sparse_random:
      return random_model(d, std::min(1.0, 3.0 / static_cast<double>(d)),
                          kSparseEdgeWeight, seed, kind);
    case ModelKind::dense_random:
      return random_model(d, 0.9, kDenseEdgeWeight, seed, kind);
  }
  throw InvalidInput("unknown model kind");
}

TrueModel correlation_scaled(const TrueModel& model) {
  const Eigen::VectorXd scale = model.sigma0.dense().diagonal().cwiseSqrt();
  TrueModel out = model;
  out.omega0 = SymMatrix::from_lower(scale.asDiagonal() * model.omega0.dense() *
                                     scale.asDiagonal());
  const Eigen::VectorXd inv = scale.cwiseInverse();
  out.sigma0 = SymMatrix::from_lower(inv.asDiagonal() * model.sigma0.dense() *
                                     inv.asDiagonal());
  for (Index i = 0; i < out.order(); ++i) out.sigma0.set(i, i, 1.0);
  return out;
}

DataMatrix sample_mvn(const TrueModel& model, Index n, std::uint64_t seed) {
  if (n < 2) throw InvalidDimension("need at least 2 samples");
  const Eigen::MatrixXd lower = cholesky(model.sigma0);
  const Index d = model.order();
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::MatrixXd z(d, n);
  for (Index k = 0; k < n; ++k) {
    for (Index i = 0; i < d; ++i) z(i, k) = normal(rng);
  }
  DataMatrix out;
  out.values = (lower * z).transpose();
  return out;
}

ConfusionCounts confusion_counts(const Mask& truth, const Mask& estimate) {
  if (truth.rows() != estimate.rows() || truth.cols() != estimate.cols()) {
    throw DimensionMismatch("support masks differ in shape");
  }
  ConfusionCounts c;
  for (Index j = 1; j < truth.cols(); ++j) {
    for (Index i = 0; i < j; ++i) {
      const bool actual = truth(i, j) != 0;
      const bool found = estimate(i, j) != 0;
      if (actual && found) ++c.tp;
      else if (!actual && found) ++c.fp;
      else if (!actual && !found) ++c.tn;
      else ++c.fn;
    }
  }
  return c;
}

SupportScores support_scores(const ConfusionCounts& c) {
  const auto tp = static_cast<double>(c.tp);
  const auto fp = static_cast<double>(c.fp);
  const auto tn = static_cast<double>(c.tn);
  const auto fn = static_cast<double>(c.fn);
  SupportScores s;
  if (c.tn + c.fp > 0) s.specificity = 100.0 * tn / (tn + fp);
  if (c.tp + c.fn > 0) s.sensitivity = 100.0 * tp / (tp + fn);
  const double denom = (tp + fp) * (tp + fn) * (tn + fp) * (tn + fn);
  if (denom > 0.0) s.mcc = 100.0 * (tp * tn - fp * fn) / std::sqrt(denom);
  return s;
}

MetricsRecord evaluate(const TrueModel& model, const PrecisionEstimate& est) {
  if (model.order() != est.order()) {
    throw DimensionMismatch("estimate order " + std::to_string(est.order()) +
                            " does not match model order " +
                            std::to_string(model.order()));
  }
  const double d = static_cast<double>(model.order());
  MetricsRecord m;
  m.kl_loss = trace_product(model.sigma0, est.omega) - logdet_pd(est.omega) +
              logdet_pd(model.omega0) - d;
  // Rounding can leave an exact match a hair below zero.
  if (m.kl_loss < 0.0 && m.kl_loss > -1e-12) m.kl_loss = 0.0;

  const Eigen::MatrixXd diff = est.omega.dense() - model.omega0.dense();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(diff, Eigen::EigenvaluesOnly);
  m.op_norm = eig.eigenvalues().cwiseAbs().maxCoeff();
  m.l1_norm = diff.cwiseAbs().colwise().sum().maxCoeff();
  m.fro_norm = diff.norm();

  const SupportScores s = support_scores(confusion_counts(model.edge_mask(), est.support));
  m.specificity = s.specificity;
  m.sensitivity = s.sensitivity;
  m.mcc = s.mcc;
  return m;
}

}  // namespace gcgm
