#include <doctest.h>

#include <cmath>
#include <random>

#include "gcgm/copula.hpp"
#include "gcgm/errors.hpp"
#include "oracles.hpp"

using namespace gcgm;

namespace {

DataMatrix column(std::initializer_list<double> a, std::initializer_list<double> b) {
  DataMatrix x;
  x.values.resize(static_cast<Index>(a.size()), 2);
  Index i = 0;
  for (double v : a) x.values(i++, 0) = v;
  i = 0;
  for (double v : b) x.values(i++, 1) = v;
  return x;
}

DataMatrix gaussian_data(Index n, Index d, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  DataMatrix x;
  x.values.resize(n, d);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < d; ++j) x.values(i, j) = normal(rng);
  }
  return x;
}

}  // namespace

TEST_CASE("ecdf_transform uses rank / (n + 1)") {
  const Eigen::MatrixXd u = ecdf_transform(column({3.1, -0.5, 7.2}, {1, 2, 3}));
  CHECK(u(0, 0) == doctest::Approx(0.50));
  CHECK(u(1, 0) == doctest::Approx(0.25));
  CHECK(u(2, 0) == doctest::Approx(0.75));
}

TEST_CASE("ecdf_transform averages tied ranks") {
  const Eigen::MatrixXd u = ecdf_transform(column({2, 1, 2, 5}, {1, 2, 3, 4}));
  // ranks: 1 -> 1, the two 2s share (2+3)/2, 5 -> 4; n + 1 = 5.
  CHECK(u(0, 0) == doctest::Approx(0.5));
  CHECK(u(2, 0) == doctest::Approx(0.5));
  CHECK(u(1, 0) == doctest::Approx(0.2));
  CHECK(u(3, 0) == doctest::Approx(0.8));
}

TEST_CASE("ecdf_transform is invariant under increasing maps") {
  const DataMatrix x = gaussian_data(25, 3, 3);
  DataMatrix y = x;
  y.values = x.values.array().exp();
  CHECK(ecdf_transform(x) == ecdf_transform(y));
}

TEST_CASE("constant column is degenerate") {
  DataMatrix x = column({1, 1}, {1, 2});
  x.names = {"alpha", "beta"};
  try {
    ecdf_transform(x);
    FAIL("expected DegenerateColumn");
  } catch (const DegenerateColumn& e) {
    CHECK(e.column() == 0);
    CHECK(e.name() == "alpha");
  }
}

TEST_CASE("gaussianize matches the bisection quantile") {
  CHECK(normal_quantile(0.5) == 0.0);
  CHECK(std::abs(normal_quantile(0.975) - oracle::bisect_quantile(0.975)) < 1e-9);
  CHECK(normal_quantile(0.975) == doctest::Approx(1.959964).epsilon(1e-6));
  CHECK(normal_quantile(0.25) == doctest::Approx(-normal_quantile(0.75)).epsilon(1e-14));
  for (double p : {1e-10, 1e-5, 0.01, 0.02425, 0.1, 0.3, 0.7, 0.9, 0.99, 0.99999}) {
    CHECK(std::abs(normal_quantile(p) - oracle::bisect_quantile(p)) < 1e-9);
  }
}

TEST_CASE("gaussianize rejects values outside (0,1)") {
  Eigen::MatrixXd u(1, 2);
  u << 0.5, 1.0;
  CHECK_THROWS_AS(gaussianize(u), OutOfRange);
  u << 0.0, 0.5;
  CHECK_THROWS_AS(gaussianize(u), OutOfRange);
}

TEST_CASE("pseudo_cov examples") {
  Eigen::MatrixXd one(1, 2);
  one << 1.5, -2.0;
  const PseudoSample single = pseudo_cov(one);
  CHECK(single.s_tilde(0, 0) == doctest::Approx(2.25));
  CHECK(single.s_tilde(0, 1) == doctest::Approx(-3.0));
  CHECK(single.s_tilde(1, 1) == doctest::Approx(4.0));

  const PseudoSample two = pseudo_cov(Eigen::MatrixXd::Identity(2, 2));
  CHECK(two.s_tilde(0, 0) == doctest::Approx(0.5));
  CHECK(two.s_tilde(1, 1) == doctest::Approx(0.5));
  CHECK(two.s_tilde(0, 1) == 0.0);

  Eigen::MatrixXd same(3, 2);
  same << 1, 2, 1, 2, 1, 2;
  const PseudoSample rep = pseudo_cov(same);
  CHECK(rep.s_tilde(0, 1) == doctest::Approx(2.0));
  CHECK(rep.s_tilde(1, 1) == doctest::Approx(4.0));
}

TEST_CASE("pipeline is bit-identical under monotone column transforms") {
  const DataMatrix x = gaussian_data(60, 5, 11);
  DataMatrix cubed = x;
  cubed.values = x.values.array().cube();
  const PseudoSample a = make_pseudo_sample(x);
  const PseudoSample b = make_pseudo_sample(cubed);
  CHECK(a.scores == b.scores);
  CHECK(a.s_tilde == b.s_tilde);
}

TEST_CASE("rank-based second moments stay bounded") {
  for (Index n : {20, 50, 200}) {
    const PseudoSample ps = make_pseudo_sample(gaussian_data(n, 4, 100 + n));
    for (Index j = 0; j < 4; ++j) {
      CHECK(ps.s_tilde(j, j) > 0.0);
      CHECK(ps.s_tilde(j, j) < 1.2);
      CHECK(std::abs(ps.scores.col(j).mean()) < 1e-12);
    }
    CHECK(min_eigenvalue(ps.s_tilde) > -1e-12);
  }
}

TEST_CASE("standardize gives unit diagonal") {
  const PseudoSample ps = make_pseudo_sample(gaussian_data(30, 3, 5), false);
  for (Index j = 0; j < 3; ++j) CHECK(ps.s_tilde(j, j) == doctest::Approx(1.0));
}
