#include "gcgm/estimator.hpp"

#include <algorithm>
#include <cmath>

#include "gcgm/errors.hpp"

namespace gcgm {

namespace {

double soft_threshold(double x, double t) {
  if (x > t) return x - t;
  if (x < -t) return x + t;
  return 0.0;
}

void validate_weights(const SymMatrix& s, const SymMatrix& w) {
  if (w.order() != s.order()) {
    throw DimensionMismatch("weight matrix order does not match covariance");
  }
  for (Index i = 0; i < s.order(); ++i) {
    if (!(s(i, i) > 0.0)) {
      throw InvalidInput("covariance diagonal entry " + std::to_string(i) +
                         " is not positive");
    }
    if (w(i, i) != 0.0) throw InvalidInput("weight diagonal must be zero");
    for (Index j = 0; j < i; ++j) {
      if (!(w(i, j) >= 0.0)) throw InvalidInput("weights must be nonnegative");
    }
  }
}

// Solves min_b 0.5 b'W11 b - s12'b + sum_k rho_k |b_k| for column j of the
// full-index problem; beta(j) stays 0 and wb tracks W * beta.
void column_lasso(const Eigen::MatrixXd& w, const Eigen::MatrixXd& s,
                  const Eigen::MatrixXd& rho, Index j, double tol,
                  Eigen::Ref<Eigen::VectorXd> beta, Eigen::VectorXd& wb) {
  const Index d = w.rows();
  constexpr int kMaxSweeps = 10000;
  wb.noalias() = w * beta;
  for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
    double max_delta = 0.0;
    for (Index k = 0; k < d; ++k) {
      if (k == j) continue;
      const double wkk = w(k, k);
      const double partial = s(k, j) - wb(k) + wkk * beta(k);
      const double updated = soft_threshold(partial, rho(k, j)) / wkk;
      const double delta = updated - beta(k);
      if (delta != 0.0) {
        wb += delta * w.col(k);
        beta(k) = updated;
        max_delta = std::max(max_delta, std::abs(delta) * wkk);
      }
    }
    if (max_delta < tol) break;
  }
}

}  // namespace

std::string to_string(PenaltyFamily family) {
  switch (family) {
    case PenaltyFamily::lasso:
      return "lasso";
    case PenaltyFamily::adaptive:
      return "adaptive";
    case PenaltyFamily::scad:
      return "scad";
  }
  return "unknown";
}

PenaltyFamily parse_penalty_family(const std::string& name) {
  if (name == "lasso" || name == "glasso") return PenaltyFamily::lasso;
  if (name == "adaptive") return PenaltyFamily::adaptive;
  if (name == "scad") return PenaltyFamily::scad;
  throw InvalidInput("unknown penalty '" + name + "'");
}

void PenaltySpec::validate() const {
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
    throw InvalidInput("lambda must be finite and nonnegative");
  }
  if (family == PenaltyFamily::adaptive && !(gamma > 0.0)) {
    throw InvalidInput("adaptive lasso needs gamma > 0");
  }
  if (family == PenaltyFamily::scad && !(a > 2.0)) {
    throw InvalidInput("SCAD needs a > 2");
  }
  if (family != PenaltyFamily::lasso && reweight_steps < 1) {
    throw InvalidInput("reweight_steps must be positive");
  }
}

Index PrecisionEstimate::edge_count() const {
  Index count = 0;
  for (Index j = 1; j < support.cols(); ++j) {
    for (Index i = 0; i < j; ++i) count += support(i, j);
  }
  return count;
}

SymMatrix penalty_weights(const PenaltySpec& spec, Index order,
                          const SymMatrix* pilot) {
  spec.validate();
  if (spec.family != PenaltyFamily::lasso) {
    if (pilot == nullptr) {
      throw MissingPilot(to_string(spec.family) + " weights need a pilot estimate");
    }
    if (pilot->order() != order) {
      throw DimensionMismatch("pilot order does not match");
    }
  }
  const double lambda = spec.lambda;
  SymMatrix w(order);
  for (Index j = 1; j < order; ++j) {
    for (Index i = 0; i < j; ++i) {
      double value = lambda;
      if (spec.family == PenaltyFamily::adaptive) {
        const double mag = std::max(std::abs((*pilot)(i, j)), kAdaptiveFloor);
        value = std::min(lambda / std::pow(mag, spec.gamma), kMaxWeight);
      } else if (spec.family == PenaltyFamily::scad) {
        const double mag = std::abs((*pilot)(i, j));
        value = mag < lambda
                    ? lambda
                    : std::max(spec.a * lambda - mag, 0.0) / (spec.a - 1.0);
      }
      w.set(i, j, value);
    }
  }
  return w;
}

PrecisionEstimate glasso_fit(const SymMatrix& s_tilde, const SymMatrix& weights,
                             const SolverOptions& options,
                             const PrecisionEstimate* warm) {
  validate_weights(s_tilde, weights);
  const Index d = s_tilde.order();
  const Eigen::MatrixXd& s = s_tilde.dense();
  const Eigen::MatrixXd& rho = weights.dense();

  Eigen::MatrixXd w = s;
  Eigen::MatrixXd beta = Eigen::MatrixXd::Zero(d, d);
  if (warm != nullptr && warm->order() == d) {
    w = warm->sigma.dense();
    const Eigen::MatrixXd& om = warm->omega.dense();
    for (Index j = 0; j < d; ++j) {
      beta.col(j) = -om.col(j) / om(j, j);
      beta(j, j) = 0.0;
    }
  }
  w.diagonal() = s.diagonal();

  const double scale = s.diagonal().mean();
  const double outer_tol = options.tol * scale;
  const double inner_tol = 0.01 * outer_tol;

  PrecisionEstimate est;
  Eigen::VectorXd wb(d);
  for (int iter = 1; iter <= options.max_iter && d > 1; ++iter) {
    double max_change = 0.0;
    for (Index j = 0; j < d; ++j) {
      column_lasso(w, s, rho, j, inner_tol, beta.col(j), wb);
      for (Index k = 0; k < d; ++k) {
        if (k == j) continue;
        max_change = std::max(max_change, std::abs(wb(k) - w(k, j)));
        w(k, j) = wb(k);
        w(j, k) = wb(k);
      }
    }
    est.iterations = iter;
    if (max_change < outer_tol) {
      est.converged = true;
      break;
    }
  }
  if (d == 1) est.converged = true;

  Eigen::MatrixXd omega(d, d);
  for (Index j = 0; j < d; ++j) {
    double fitted = 0.0;
    for (Index k = 0; k < d; ++k) {
      if (k != j) fitted += w(k, j) * beta(k, j);
    }
    const double diag = 1.0 / (w(j, j) - fitted);
    omega.col(j) = -beta.col(j) * diag;
    omega(j, j) = diag;
  }
  omega = 0.5 * (omega + omega.transpose()).eval();
  est.support = Mask::Ones(d, d);
  for (Index j = 0; j < d; ++j) {
    for (Index i = 0; i < d; ++i) {
      if (i != j && std::abs(omega(i, j)) <= kZeroTol) {
        omega(i, j) = 0.0;
        est.support(i, j) = 0;
      }
    }
  }

  est.omega = SymMatrix::from_lower(omega);
  est.sigma = inv_pd(est.omega);
  est.weights = weights;
  est.lambda = rho.maxCoeff();
  est.loglik = gaussian_loglik(est.omega, s_tilde, 1.0);
  return est;
}

PrecisionEstimate mple(const PseudoSample& ps, const PenaltySpec& spec,
                       const SolverOptions& options,
                       const PrecisionEstimate* warm) {
  spec.validate();
  const Index d = ps.d();
  PenaltySpec lasso = spec;
  lasso.family = PenaltyFamily::lasso;
  PrecisionEstimate est =
      glasso_fit(ps.s_tilde, penalty_weights(lasso, d), options, warm);
  if (spec.family != PenaltyFamily::lasso) {
    for (int step = 0; step < spec.reweight_steps; ++step) {
      const SymMatrix w = penalty_weights(spec, d, &est.omega);
      est = glasso_fit(ps.s_tilde, w, options, &est);
    }
  }
  est.lambda = spec.lambda;
  est.loglik = gaussian_loglik(est.omega, ps.s_tilde, static_cast<double>(ps.n()));
  return est;
}

double gaussian_loglik(const SymMatrix& omega, const SymMatrix& s, double n) {
  return 0.5 * n * (logdet_pd(omega) - trace_product(s, omega));
}

double kkt_violation(const PrecisionEstimate& est, const SymMatrix& s_tilde) {
  const Eigen::MatrixXd r = est.sigma.dense() - s_tilde.dense();
  const Index d = s_tilde.order();
  double worst = 0.0;
  for (Index j = 0; j < d; ++j) {
    worst = std::max(worst, std::abs(r(j, j)));
    for (Index i = 0; i < j; ++i) {
      const double w = est.weights(i, j);
      const double om = est.omega(i, j);
      const double v = om != 0.0 ? std::abs(r(i, j) - w * (om > 0.0 ? 1.0 : -1.0))
                                 : std::max(0.0, std::abs(r(i, j)) - w);
      worst = std::max(worst, v);
    }
  }
  return worst;
}

double lambda_max(const SymMatrix& s_tilde) {
  const Index d = s_tilde.order();
  double best = 0.0;
  for (Index j = 1; j < d; ++j) {
    for (Index i = 0; i < j; ++i) best = std::max(best, std::abs(s_tilde(i, j)));
  }
  return best;
}

std::vector<double> lambda_grid(const SymMatrix& s_tilde, int r, double ratio) {
  if (r < 2) throw InvalidInput("grid needs at least 2 points");
  if (!(ratio > 0.0 && ratio < 1.0)) throw InvalidInput("grid ratio must be in (0,1)");
  const double top = lambda_max(s_tilde);
  if (!(top > 0.0)) throw InvalidInput("covariance has no off-diagonal mass");
  std::vector<double> grid(static_cast<std::size_t>(r));
  const double step = std::log(ratio) / static_cast<double>(r - 1);
  for (int i = 0; i < r; ++i) {
    grid[static_cast<std::size_t>(i)] = top * std::exp(step * i);
  }
  grid.front() = top;
  grid.back() = top * ratio;
  return grid;
}

std::vector<PrecisionEstimate> fit_path(const PseudoSample& ps,
                                        const PenaltySpec& spec,
                                        std::span<const double> grid,
                                        const SolverOptions& options) {
  std::vector<PrecisionEstimate> path;
  path.reserve(grid.size());
  PenaltySpec point = spec;
  for (double lambda : grid) {
    point.lambda = lambda;
    path.push_back(mple(ps, point, options, path.empty() ? nullptr : &path.back()));
  }
  return path;
}

}  // namespace gcgm
