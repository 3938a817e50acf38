#include <doctest.h>

#include <cmath>
#include <random>

#include "gcgm/copula.hpp"
#include "gcgm/criteria.hpp"
#include "gcgm/errors.hpp"
#include "gcgm/estimator.hpp"
#include "gcgm/simulation.hpp"
#include "oracles.hpp"

using namespace gcgm;

namespace {

PrecisionEstimate estimate_from(const SymMatrix& omega) {
  PrecisionEstimate est;
  est.omega = omega;
  est.sigma = inv_pd(omega);
  est.weights = SymMatrix(omega.order());
  est.support = Mask::Ones(omega.order(), omega.order());
  for (Index i = 0; i < omega.order(); ++i) {
    for (Index j = 0; j < omega.order(); ++j) {
      if (i != j && omega(i, j) == 0.0) est.support(i, j) = 0;
    }
  }
  return est;
}

PseudoSample random_sample(Index n, Index d, std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  Eigen::MatrixXd q(n, d);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < d; ++j) q(i, j) = normal(rng);
  }
  return pseudo_cov(q);
}

}  // namespace

TEST_CASE("commutation matrix transposes vec") {
  Eigen::MatrixXd a(3, 3);
  a << 1, 2, 3, 4, 5, 6, 7, 8, 9;
  CHECK(commutation_matrix(3) * vec(a) == vec(a.transpose()));
}

TEST_CASE("the symmetrizer leaves (W kron W) vec A unchanged") {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 30; ++trial) {
    const Index d = 2 + trial % 5;
    const Eigen::MatrixXd a = oracle::random_symmetric(d, rng);
    const Eigen::MatrixXd w = oracle::random_spd(d, rng);
    const Eigen::VectorXd plain = kronecker(w, w) * vec(a);
    const Eigen::VectorXd sym = symmetrizer(d) * plain;
    CHECK((plain - sym).cwiseAbs().maxCoeff() <= 1e-10 * plain.cwiseAbs().maxCoeff());
    const Mask ones = Mask::Ones(d, d);
    CHECK(masked_kronecker_form(a, w, ones, true) ==
          doctest::Approx(masked_kronecker_form(a, w, ones, false)).epsilon(1e-12));
  }
}

TEST_CASE("Kronecker bilinear form equals the four-index trace sum") {
  std::mt19937_64 rng(22);
  const Eigen::MatrixXd a = oracle::random_symmetric(4, rng);
  const Eigen::MatrixXd w = oracle::random_spd(4, rng);
  Mask mask = Mask::Ones(4, 4);
  mask(0, 2) = mask(2, 0) = 0;
  mask(1, 3) = mask(3, 1) = 0;
  const Eigen::MatrixXd masked = a.cwiseProduct(mask.cast<double>());
  CHECK(masked_kronecker_form(a, w, mask, true) ==
        doctest::Approx(oracle::masked_trace_loops(masked, w)).epsilon(1e-12));
}

TEST_CASE("df_gic with a single sample is zero") {
  std::mt19937_64 rng(23);
  const PseudoSample ps = random_sample(1, 4, rng);
  const PrecisionEstimate est = estimate_from(SymMatrix::from_lower(oracle::random_spd(4, rng)));
  CHECK(std::abs(df_gic(est, ps)) < 1e-10);
}

TEST_CASE("df_gic of a diagonal fit follows the scalar formula") {
  std::mt19937_64 rng(24);
  const Index n = 15, d = 4;
  const PseudoSample ps = random_sample(n, d, rng);
  const std::vector<double> diag{1.5, 0.7, 2.0, 1.1};
  const PrecisionEstimate est = estimate_from(SymMatrix::diagonal(diag));
  double expected = 0.0;
  for (Index i = 0; i < d; ++i) {
    const double fourth = ps.scores.col(i).array().pow(4).sum();
    const double sii = ps.s_tilde(i, i);
    expected += diag[i] * diag[i] * (fourth / (2.0 * n) - 0.5 * sii * sii);
  }
  CHECK(df_gic(est, ps) == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("df_gic matches the Kronecker oracle on fitted paths") {
  std::mt19937_64 rng(25);
  for (int trial = 0; trial < 12; ++trial) {
    const Index d = 3 + trial % 4;
    const Index n = 10 + 5 * (trial % 5);
    const PseudoSample ps = random_sample(n, d, rng);
    PenaltySpec spec;
    spec.family = static_cast<PenaltyFamily>(trial % 3);
    spec.lambda = 0.3 * lambda_max(ps.s_tilde);
    const PrecisionEstimate est = mple(ps, spec);
    CHECK(std::abs(df_gic(est, ps) - df_gic_naive(est, ps)) <= 1e-8);
  }
}

TEST_CASE("all-ones mask gives the unmasked maximum-likelihood bias") {
  std::mt19937_64 rng(26);
  const PseudoSample ps = random_sample(20, 4, rng);
  const PrecisionEstimate est = mple(ps, PenaltySpec{});
  REQUIRE(est.edge_count() == 6);
  const Eigen::MatrixXd kron = kronecker(est.omega.dense(), est.omega.dense());
  double per_sample = 0.0;
  for (Index k = 0; k < ps.n(); ++k) {
    const Eigen::VectorXd v = vec(ps.outer(k).dense());
    per_sample += v.dot(kron * v);
  }
  const Eigen::VectorXd v = vec(ps.s_tilde.dense());
  const double unmasked = per_sample / (2.0 * ps.n()) - 0.5 * v.dot(kron * v);
  CHECK(df_gic(est, ps) == doctest::Approx(unmasked).epsilon(1e-10));
  CHECK(df_gic_naive(est, ps) == doctest::Approx(unmasked).epsilon(1e-10));
}

TEST_CASE("df_gic_naive refuses large orders") {
  std::mt19937_64 rng(27);
  const PseudoSample ps = random_sample(5, 13, rng);
  const PrecisionEstimate est = estimate_from(SymMatrix::identity(13));
  CHECK_THROWS_AS(df_gic_naive(est, ps), DimensionTooLarge);
}

TEST_CASE("df_aic counts upper-triangle edges") {
  CHECK(df_aic(estimate_from(SymMatrix::identity(4))) == 0.0);
  CHECK(df_aic(estimate_from(SymMatrix::from_rows(
            {{2, 0.3, 0.2}, {0.3, 2, 0.1}, {0.2, 0.1, 2}}))) == 3.0);
  CHECK(df_aic(estimate_from(SymMatrix::from_rows(
            {{2, 0.3, 0}, {0.3, 2, 0.1}, {0, 0.1, 2}}))) == 2.0);
}

TEST_CASE("score compositions") {
  std::mt19937_64 rng(28);
  const PseudoSample ps = random_sample(25, 4, rng);
  PrecisionEstimate diag = mple(ps, PenaltySpec{PenaltyFamily::lasso, lambda_max(ps.s_tilde)});
  REQUIRE(diag.edge_count() == 0);
  CHECK(score(diag, ps, Criterion::aic).value == -2.0 * diag.loglik);

  ScoreContext ctx;
  ctx.sigma0 = &ps.s_tilde;
  CHECK(score(diag, ps, Criterion::kl_oracle, ctx).value == doctest::Approx(-2.0 * diag.loglik));

  CHECK_THROWS_AS(score(diag, ps, Criterion::kl_oracle), MissingContext);
  CHECK_THROWS_AS(score(diag, ps, Criterion::cv), MissingContext);

  const PrecisionEstimate fit = mple(ps, PenaltySpec{PenaltyFamily::lasso, 0.05});
  const auto gic = score(fit, ps, Criterion::gic);
  const auto gbic = score(fit, ps, Criterion::gbic);
  const auto bic = score(fit, ps, Criterion::bic);
  const auto aic = score(fit, ps, Criterion::aic);
  CHECK(gic.value == doctest::Approx(-2.0 * fit.loglik + 2.0 * df_gic(fit, ps)));
  CHECK(std::abs((gbic.value - bic.value) - std::log(25.0) * (gic.df - aic.df)) < 1e-10);
}

TEST_CASE("likelihood loss examples") {
  std::mt19937_64 rng(29);
  const SymMatrix s = SymMatrix::from_lower(oracle::random_spd(4, rng));
  double trace = 0.0;
  for (Index i = 0; i < 4; ++i) trace += s(i, i);
  CHECK(likelihood_loss(SymMatrix::identity(4), s) == doctest::Approx(trace));
  const double at_inverse = likelihood_loss(inv_pd(s), s);
  CHECK(at_inverse == doctest::Approx(4.0 + std::log(oracle::cofactor_det(s.dense()))));
  // Minimum over PD matrices: a perturbation only increases it.
  SymMatrix nudged = inv_pd(s);
  nudged.add_to_diagonal(0.05);
  CHECK(likelihood_loss(nudged, s) > at_inverse);
}

TEST_CASE("cv_score matches hand evaluation at two penalties") {
  std::mt19937_64 rng(30);
  const PseudoSample train = random_sample(30, 4, rng);
  const PseudoSample valid = random_sample(30, 4, rng);
  for (double lambda : {0.05, 0.2}) {
    PenaltySpec spec;
    spec.lambda = lambda;
    const PrecisionEstimate est = mple(train, spec);
    const Eigen::MatrixXd prod = est.omega.dense() * valid.s_tilde.dense();
    const double expected =
        prod.trace() - std::log(oracle::cofactor_det(est.omega.dense()));
    CHECK(cv_score(train, valid, spec) == doctest::Approx(expected).epsilon(1e-10));
  }
}

TEST_CASE("select_lambda takes the first minimum") {
  PathResult path;
  path.grid = {0.5, 0.3, 0.1};
  path.scores[Criterion::gic] = {{Criterion::gic, 3}, {Criterion::gic, 1}, {Criterion::gic, 2}};
  CHECK(select_lambda(path, Criterion::gic) == 1);
  path.scores[Criterion::aic] = {{Criterion::aic, 2}, {Criterion::aic, 2}, {Criterion::aic, 5}};
  CHECK(select_lambda(path, Criterion::aic) == 0);
  CHECK_THROWS_AS(select_lambda(path, Criterion::bic), EmptyPath);
  CHECK_THROWS_AS(select_lambda(PathResult{}, Criterion::gic), EmptyPath);
}

TEST_CASE("kl_oracle selects the argmin of the exact KL divergence") {
  const TrueModel truth = correlation_scaled(band_model(12));
  const PseudoSample ps = make_pseudo_sample(sample_mvn(truth, 80, 31));
  ScoreContext ctx;
  ctx.sigma0 = &truth.sigma0;
  const std::vector<Criterion> criteria{Criterion::kl_oracle};
  const PathResult path = fit_and_score(ps, PenaltySpec{},
                                        lambda_grid(ps.s_tilde, 30, 0.01), criteria, ctx);
  std::size_t best = 0;
  double best_kl = kl_divergence(truth.sigma0, path.estimates[0].omega);
  for (std::size_t i = 1; i < path.estimates.size(); ++i) {
    const double kl = kl_divergence(truth.sigma0, path.estimates[i].omega);
    if (kl < best_kl) {
      best_kl = kl;
      best = i;
    }
  }
  CHECK(path.selected.at(Criterion::kl_oracle) == best);
}
