#include "gcgm/criteria.hpp"

#include <cmath>
#include <limits>

#include <Eigen/Sparse>

#include "gcgm/errors.hpp"

namespace gcgm {

namespace {

Eigen::SparseMatrix<double> sparse_mask(const Mask& mask) {
  std::vector<Eigen::Triplet<double>> entries;
  for (Index j = 0; j < mask.cols(); ++j) {
    for (Index i = 0; i < mask.rows(); ++i) {
      if (mask(i, j) != 0) entries.emplace_back(i, j, 1.0);
    }
  }
  Eigen::SparseMatrix<double> out(mask.rows(), mask.cols());
  out.setFromTriplets(entries.begin(), entries.end());
  return out;
}

// tr(B B) for square B, i.e. sum_ij B_ij B_ji.
double trace_of_square(const Eigen::MatrixXd& b) {
  return b.cwiseProduct(b.transpose()).sum();
}

void require_matching(const PrecisionEstimate& est, const PseudoSample& ps) {
  if (est.order() != ps.d()) {
    throw DimensionMismatch("estimate and pseudo-sample orders differ");
  }
}

}  // namespace

std::string to_string(Criterion criterion) {
  switch (criterion) {
    case Criterion::gic:
      return "gic";
    case Criterion::aic:
      return "aic";
    case Criterion::bic:
      return "bic";
    case Criterion::gbic:
      return "gbic";
    case Criterion::cv:
      return "cv";
    case Criterion::kl_oracle:
      return "kl_oracle";
  }
  return "unknown";
}

Criterion parse_criterion(const std::string& name) {
  if (name == "gic") return Criterion::gic;
  if (name == "aic") return Criterion::aic;
  if (name == "bic") return Criterion::bic;
  if (name == "gbic") return Criterion::gbic;
  if (name == "cv") return Criterion::cv;
  if (name == "oracle" || name == "kl_oracle") return Criterion::kl_oracle;
  throw InvalidInput("unknown criterion '" + name + "'");
}

double df_gic(const PrecisionEstimate& est, const PseudoSample& ps) {
  require_matching(est, ps);
  const Eigen::MatrixXd& omega = est.omega.dense();
  const Eigen::SparseMatrix<double> mask = sparse_mask(est.support);
  const Index n = ps.n();

  // A_k W = diag(q) I diag(q) W for A_k = (q q^T) o I.
  double per_sample = 0.0;
  Eigen::MatrixXd scaled(omega.rows(), omega.cols());
  Eigen::MatrixXd prod(omega.rows(), omega.cols());
  for (Index k = 0; k < n; ++k) {
    const Eigen::VectorXd q = ps.scores.row(k).transpose();
    scaled.noalias() = q.asDiagonal() * omega;
    prod.noalias() = mask * scaled;
    prod = q.asDiagonal() * prod;
    per_sample += trace_of_square(prod);
  }

  const Eigen::MatrixXd pooled =
      ps.s_tilde.dense().cwiseProduct(est.support.cast<double>());
  const double pooled_term = trace_of_square(pooled * omega);
  return per_sample / (2.0 * static_cast<double>(n)) - 0.5 * pooled_term;
}

Eigen::VectorXd vec(const Eigen::MatrixXd& a) {
  return Eigen::Map<const Eigen::VectorXd>(a.data(), a.size());
}

Eigen::MatrixXd kronecker(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  Eigen::MatrixXd out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Index i = 0; i < a.rows(); ++i) {
    for (Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

Eigen::MatrixXd commutation_matrix(Index d) {
  Eigen::MatrixXd k = Eigen::MatrixXd::Zero(d * d, d * d);
  // vec index of A(i,j) is i + j d; it moves to the slot of A^T(j,i).
  for (Index i = 0; i < d; ++i) {
    for (Index j = 0; j < d; ++j) k(j + i * d, i + j * d) = 1.0;
  }
  return k;
}

Eigen::MatrixXd symmetrizer(Index d) {
  return 0.5 * (Eigen::MatrixXd::Identity(d * d, d * d) + commutation_matrix(d));
}

double masked_kronecker_form(const Eigen::MatrixXd& a, const Eigen::MatrixXd& w,
                             const Mask& mask, bool with_symmetrizer) {
  const Index d = w.rows();
  if (d > kNaiveMaxOrder) {
    throw DimensionTooLarge("Kronecker form limited to order " +
                            std::to_string(kNaiveMaxOrder) + ", got " +
                            std::to_string(d));
  }
  if (a.rows() != d || a.cols() != d || mask.rows() != d || mask.cols() != d) {
    throw DimensionMismatch("Kronecker form operands differ in order");
  }
  const Eigen::VectorXd v = vec(a.cwiseProduct(mask.cast<double>()));
  Eigen::MatrixXd op = kronecker(w, w);
  if (with_symmetrizer) op = symmetrizer(d) * op;
  return v.dot(op * v);
}

double df_gic_naive(const PrecisionEstimate& est, const PseudoSample& ps) {
  require_matching(est, ps);
  if (est.order() > kNaiveMaxOrder) {
    throw DimensionTooLarge("df_gic_naive limited to order " +
                            std::to_string(kNaiveMaxOrder));
  }
  const Eigen::MatrixXd& w = est.omega.dense();
  double per_sample = 0.0;
  for (Index k = 0; k < ps.n(); ++k) {
    per_sample += masked_kronecker_form(ps.outer(k).dense(), w, est.support, true);
  }
  const double pooled =
      masked_kronecker_form(ps.s_tilde.dense(), w, est.support, true);
  return per_sample / (2.0 * static_cast<double>(ps.n())) - 0.5 * pooled;
}

double df_aic(const PrecisionEstimate& est) {
  return static_cast<double>(est.edge_count());
}

double kl_divergence(const SymMatrix& sigma0, const SymMatrix& omega_hat) {
  if (sigma0.order() != omega_hat.order()) {
    throw DimensionMismatch("KL operands differ in order");
  }
  const double d = static_cast<double>(sigma0.order());
  return 0.5 * (trace_product(sigma0, omega_hat) - logdet_pd(sigma0) -
                logdet_pd(omega_hat) - d);
}

double likelihood_loss(const SymMatrix& omega_hat, const SymMatrix& s_valid) {
  return trace_product(omega_hat, s_valid) - logdet_pd(omega_hat);
}

namespace {

CriterionScore compose(Criterion criterion, const PrecisionEstimate& est,
                       const PseudoSample& ps, const ScoreContext& ctx,
                       double gic_df) {
  const double n = static_cast<double>(ps.n());
  const double fit = -2.0 * est.loglik;
  switch (criterion) {
    case Criterion::gic:
      return {criterion, fit + 2.0 * gic_df, gic_df};
    case Criterion::aic:
      return {criterion, fit + 2.0 * df_aic(est), df_aic(est)};
    case Criterion::bic:
      return {criterion, fit + std::log(n) * df_aic(est), df_aic(est)};
    case Criterion::gbic:
      return {criterion, fit + std::log(n) * gic_df, gic_df};
    case Criterion::kl_oracle: {
      if (ctx.sigma0 == nullptr) {
        throw MissingContext("kl_oracle needs the true covariance");
      }
      const Eigen::MatrixXd gap = ctx.sigma0->dense() - ps.s_tilde.dense();
      const double bias = n * est.omega.dense().cwiseProduct(gap).sum();
      return {criterion, fit + bias, 0.5 * bias};
    }
    case Criterion::cv:
      if (ctx.validation == nullptr) {
        throw MissingContext("cv needs a validation sample");
      }
      return {criterion, likelihood_loss(est.omega, ctx.validation->s_tilde), 0.0};
  }
  throw InvalidInput("unknown criterion");
}

bool needs_gic_df(Criterion c) {
  return c == Criterion::gic || c == Criterion::gbic;
}

}  // namespace

CriterionScore score(const PrecisionEstimate& est, const PseudoSample& ps,
                     Criterion criterion, const ScoreContext& ctx) {
  require_matching(est, ps);
  const double gic_df = needs_gic_df(criterion) ? df_gic(est, ps) : 0.0;
  return compose(criterion, est, ps, ctx, gic_df);
}

double cv_score(const PseudoSample& train, const PseudoSample& valid,
                const PenaltySpec& spec, const SolverOptions& options) {
  if (train.d() != valid.d()) {
    throw DimensionMismatch("training and validation widths differ");
  }
  const PrecisionEstimate est = mple(train, spec, options);
  return likelihood_loss(est.omega, valid.s_tilde);
}

void score_path(PathResult& path, const PseudoSample& ps,
                std::span<const Criterion> criteria, const ScoreContext& ctx) {
  bool want_gic_df = false;
  for (Criterion c : criteria) want_gic_df = want_gic_df || needs_gic_df(c);
  for (Criterion c : criteria) path.scores[c].clear();

  for (const PrecisionEstimate& est : path.estimates) {
    require_matching(est, ps);
    const double gic_df = want_gic_df ? df_gic(est, ps) : 0.0;
    for (Criterion c : criteria) {
      path.scores[c].push_back(compose(c, est, ps, ctx, gic_df));
    }
  }
  for (Criterion c : criteria) path.selected[c] = select_lambda(path, c);
}

PathResult fit_and_score(const PseudoSample& ps, const PenaltySpec& spec,
                         std::vector<double> grid,
                         std::span<const Criterion> criteria,
                         const ScoreContext& ctx, const SolverOptions& options) {
  PathResult path;
  path.estimates = fit_path(ps, spec, grid, options);
  path.grid = std::move(grid);
  score_path(path, ps, criteria, ctx);
  return path;
}

std::size_t select_lambda(const PathResult& path, Criterion criterion) {
  const auto it = path.scores.find(criterion);
  if (path.grid.empty() || it == path.scores.end() || it->second.empty()) {
    throw EmptyPath("no scores for criterion " + to_string(criterion));
  }
  const auto& scores = it->second;
  std::size_t best = 0;
  for (std::size_t i = 1; i < scores.size(); ++i) {
    if (scores[i].value < scores[best].value) best = i;
  }
  return best;
}

}  // namespace gcgm
