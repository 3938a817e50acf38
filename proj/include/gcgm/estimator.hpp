#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "gcgm/copula.hpp"
#include "gcgm/numerics.hpp"

namespace gcgm {

enum class PenaltyFamily { lasso, adaptive, scad };

std::string to_string(PenaltyFamily family);
PenaltyFamily parse_penalty_family(const std::string& name);

struct PenaltySpec {
  PenaltyFamily family = PenaltyFamily::lasso;
  double lambda = 0.0;
  /// Exponent of the adaptive-lasso weights.
  double gamma = 0.5;
  /// SCAD shape parameter, must exceed 2.
  double a = 3.7;
  /// Reweighted l1 rounds after the lasso pilot (adaptive and scad only).
  int reweight_steps = 2;

  void validate() const;
};

/// Floor on |pilot| in adaptive weights, and the cap standing in for an
/// infinite weight.
inline constexpr double kAdaptiveFloor = 1e-4;
inline constexpr double kMaxWeight = 1e10;
/// |omega_ij| at or below this counts as an estimated zero.
inline constexpr double kZeroTol = 1e-8;
inline constexpr double kKktTol = 1e-4;

/// 0/1 indicator matrix.
using Mask = Eigen::Matrix<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic>;

struct SolverOptions {
  double tol = 1e-5;
  int max_iter = 200;
};

struct PrecisionEstimate {
  SymMatrix omega;
  SymMatrix sigma;  // omega^{-1}
  /// Penalty weights of the last solved l1 problem.
  SymMatrix weights;
  /// Support indicator; diagonal always 1.
  Mask support;
  double lambda = 0.0;
  double loglik = 0.0;
  bool converged = false;
  int iterations = 0;

  Index order() const noexcept { return omega.order(); }
  /// Number of estimated edges (strict upper triangle of the support).
  Index edge_count() const;
};

/// Per-entry penalty weights with zero diagonal. Adaptive and SCAD weights
/// are derived from |pilot_ij|; lasso ignores the pilot.
SymMatrix penalty_weights(const PenaltySpec& spec, Index order,
                          const SymMatrix* pilot = nullptr);

/// Weighted graphical lasso by block coordinate descent. A warm start seeds
/// the working covariance and regression coefficients.
PrecisionEstimate glasso_fit(const SymMatrix& s_tilde, const SymMatrix& weights,
                             const SolverOptions& options = {},
                             const PrecisionEstimate* warm = nullptr);

/// Maximum penalised likelihood estimate for any penalty family. Adaptive
/// lasso and SCAD start from the lasso fit at the same lambda and reweight.
PrecisionEstimate mple(const PseudoSample& ps, const PenaltySpec& spec,
                       const SolverOptions& options = {},
                       const PrecisionEstimate* warm = nullptr);

/// (n/2) (log|omega| - tr(S omega)), the Gaussian log-likelihood without the
/// 2*pi constant.
double gaussian_loglik(const SymMatrix& omega, const SymMatrix& s, double n);

/// Largest violation of the subgradient optimality conditions of the
/// weighted problem, using est.weights.
double kkt_violation(const PrecisionEstimate& est, const SymMatrix& s_tilde);

/// Smallest uniform lambda giving an empty graph: max_{i != j} |s_ij|.
double lambda_max(const SymMatrix& s_tilde);

/// r log-spaced values from lambda_max down to ratio * lambda_max.
std::vector<double> lambda_grid(const SymMatrix& s_tilde, int r, double ratio);

/// Fits every grid value (expected decreasing), warm-starting each fit from
/// the previous one. spec.lambda is replaced by the grid value.
std::vector<PrecisionEstimate> fit_path(const PseudoSample& ps,
                                        const PenaltySpec& spec,
                                        std::span<const double> grid,
                                        const SolverOptions& options = {});

}  // namespace gcgm
