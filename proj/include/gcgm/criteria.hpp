#pragma once

#include <map>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "gcgm/copula.hpp"
#include "gcgm/estimator.hpp"
#include "gcgm/numerics.hpp"

namespace gcgm {

enum class Criterion { gic, aic, bic, gbic, cv, kl_oracle };

std::string to_string(Criterion criterion);
/// Accepts "oracle" as an alias of "kl_oracle".
Criterion parse_criterion(const std::string& name);

struct CriterionScore {
  Criterion criterion = Criterion::gic;
  double value = 0.0;
  /// Bias correction divided by two, i.e. on the degrees-of-freedom scale.
  /// Zero for cv.
  double df = 0.0;
};

/// Extra inputs some criteria need: the true covariance for kl_oracle and
/// the held-out half for cv.
struct ScoreContext {
  const SymMatrix* sigma0 = nullptr;
  const PseudoSample* validation = nullptr;
};

/// Degrees of freedom from the generalized information criterion:
///
///   (1/2n) sum_k tr(A_k W A_k W) - (1/2) tr(Abar W Abar W),
///
/// with W the estimated precision, A_k = (q_k q_k^T) o I and Abar = S o I
/// masked by the estimated support I. Runs in O(n d^2 |I|) using the
/// rank-one structure of each A_k; no d^2 x d^2 matrix is formed.
double df_gic(const PrecisionEstimate& est, const PseudoSample& ps);

/// Largest order df_gic_naive accepts.
inline constexpr Index kNaiveMaxOrder = 12;

/// Brute-force df_gic through the explicit Kronecker form
/// vec(A o I)^T M_d (W kron W) vec(A o I). Exists as a test oracle.
double df_gic_naive(const PrecisionEstimate& est, const PseudoSample& ps);

/// Column-stacking vectorisation.
Eigen::VectorXd vec(const Eigen::MatrixXd& a);
Eigen::MatrixXd kronecker(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b);
/// K_d with K_d vec(A) = vec(A^T).
Eigen::MatrixXd commutation_matrix(Index d);
/// M_d = (I + K_d) / 2.
Eigen::MatrixXd symmetrizer(Index d);

/// vec(A o I)^T [M_d] (W kron W) vec(A o I), with or without the
/// symmetrizer M_d. Guarded by kNaiveMaxOrder.
double masked_kronecker_form(const Eigen::MatrixXd& a, const Eigen::MatrixXd& w,
                             const Mask& mask, bool with_symmetrizer);

/// Number of estimated edges.
double df_aic(const PrecisionEstimate& est);

/// 0.5 {tr(Sigma0 W) - log|Sigma0 W| - d}.
double kl_divergence(const SymMatrix& sigma0, const SymMatrix& omega_hat);

/// tr(W S_valid) - log|W|.
double likelihood_loss(const SymMatrix& omega_hat, const SymMatrix& s_valid);

CriterionScore score(const PrecisionEstimate& est, const PseudoSample& ps,
                     Criterion criterion, const ScoreContext& ctx = {});

/// Fits on the training half and returns the likelihood loss on the
/// validation half.
double cv_score(const PseudoSample& train, const PseudoSample& valid,
                const PenaltySpec& spec, const SolverOptions& options = {});

struct PathResult {
  /// Strictly decreasing.
  std::vector<double> grid;
  std::vector<PrecisionEstimate> estimates;
  std::map<Criterion, std::vector<CriterionScore>> scores;
  std::map<Criterion, std::size_t> selected;
};

/// Fit the whole grid and score it under each criterion.
PathResult fit_and_score(const PseudoSample& ps, const PenaltySpec& spec,
                         std::vector<double> grid,
                         std::span<const Criterion> criteria,
                         const ScoreContext& ctx = {},
                         const SolverOptions& options = {});

/// Scores every estimate of the path and records each selection.
void score_path(PathResult& path, const PseudoSample& ps,
                std::span<const Criterion> criteria,
                const ScoreContext& ctx = {});

/// Index of the smallest score; ties go to the largest lambda.
std::size_t select_lambda(const PathResult& path, Criterion criterion);

}  // namespace gcgm
