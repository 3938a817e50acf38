#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "gcgm/numerics.hpp"

namespace gcgm {

/// n observations (rows) of d variables (columns), with optional names.
struct DataMatrix {
  Eigen::MatrixXd values;
  std::vector<std::string> names;

  Index n() const noexcept { return values.rows(); }
  Index d() const noexcept { return values.cols(); }
  std::string column_name(Index j) const;
};

/// Gaussian scores and their pooled second-moment matrix
/// s_tilde = (1/n) sum_k q_k q_k^T.
struct PseudoSample {
  Eigen::MatrixXd scores;
  SymMatrix s_tilde;

  Index n() const noexcept { return scores.rows(); }
  Index d() const noexcept { return scores.cols(); }
  /// Per-observation outer product q_k q_k^T.
  SymMatrix outer(Index k) const;
};

/// Column-wise rank / (n + 1), ties sharing their average rank.
Eigen::MatrixXd ecdf_transform(const DataMatrix& x);

/// Standard normal quantile, accurate to ~1e-15 relative.
double normal_quantile(double p);
/// Standard normal CDF.
double normal_cdf(double x);

Eigen::MatrixXd gaussianize(const Eigen::MatrixXd& u);

PseudoSample pseudo_cov(const Eigen::MatrixXd& q);

/// Centre each column and scale it to unit (1/n) variance. Pass-through
/// alternative to the rank transform for data that are already Gaussian.
Eigen::MatrixXd standardize(const DataMatrix& x);

/// Raw data -> PseudoSample, via the rank transform (copula = true) or
/// column standardisation (copula = false).
PseudoSample make_pseudo_sample(const DataMatrix& x, bool copula = true);

}  // namespace gcgm
