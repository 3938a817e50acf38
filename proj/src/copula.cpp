#include "gcgm/copula.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "gcgm/errors.hpp"

namespace gcgm {

namespace {

void require_shape(const DataMatrix& x) {
  if (x.n() < 2 || x.d() < 2) {
    throw InvalidDimension("data need at least 2 rows and 2 columns");
  }
  if (!x.names.empty() && static_cast<Index>(x.names.size()) != x.d()) {
    throw DimensionMismatch("column name count does not match data width");
  }
}

}  // namespace

std::string DataMatrix::column_name(Index j) const {
  if (!names.empty()) return names[static_cast<std::size_t>(j)];
  return "V" + std::to_string(j + 1);
}

SymMatrix PseudoSample::outer(Index k) const {
  const Eigen::VectorXd q = scores.row(k).transpose();
  return SymMatrix::from_lower(q * q.transpose());
}

Eigen::MatrixXd ecdf_transform(const DataMatrix& x) {
  require_shape(x);
  const Index n = x.n();
  Eigen::MatrixXd u(n, x.d());
  std::vector<Index> order(static_cast<std::size_t>(n));
  for (Index j = 0; j < x.d(); ++j) {
    const auto col = x.values.col(j);
    std::iota(order.begin(), order.end(), Index{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](Index a, Index b) { return col(a) < col(b); });
    if (col(order.front()) == col(order.back())) {
      throw DegenerateColumn(static_cast<std::size_t>(j),
                             x.names.empty() ? std::string{} : x.column_name(j));
    }
    std::size_t start = 0;
    while (start < order.size()) {
      std::size_t stop = start + 1;
      while (stop < order.size() && col(order[stop]) == col(order[start])) {
        ++stop;
      }
      // 1-based ranks start+1 .. stop share their mean.
      const double rank = 0.5 * static_cast<double>(start + 1 + stop);
      for (std::size_t t = start; t < stop; ++t) {
        u(order[t], j) = rank / static_cast<double>(n + 1);
      }
      start = stop;
    }
  }
  return u;
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    throw OutOfRange("normal quantile needs p in (0,1), got " +
                     std::to_string(p));
  }
  // Acklam's rational approximation followed by one Halley step.
  static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                 -2.759285104469687e+02, 1.383577518672690e+02,
                                 -3.066479806614716e+01, 2.506628277459239e+00};
  static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                 -1.556989798598866e+02, 6.680131188771972e+01,
                                 -1.328068155288572e+01};
  static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                 -2.400758277161838e+00, -2.549732539343734e+00,
                                 4.374664141464968e+00,  2.938163982698783e+00};
  static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                                 2.445134137142996e+00, 3.754408661907416e+00};
  constexpr double low = 0.02425;

  double x = 0.0;
  if (p < low) {
    const double q = std::sqrt(-2.0 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else if (p <= 1.0 - low) {
    const double q = p - 0.5;
    const double r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) *
        q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  } else {
    const double q = std::sqrt(-2.0 * std::log1p(-p));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }

  // Residual on the tail nearer to p keeps relative accuracy far out.
  const double e = p < 0.5 ? normal_cdf(x) - p : (1.0 - p) - normal_cdf(-x);
  const double u = e * std::sqrt(2.0 * M_PI) * std::exp(0.5 * x * x);
  return x - u / (1.0 + 0.5 * x * u);
}

Eigen::MatrixXd gaussianize(const Eigen::MatrixXd& u) {
  return u.unaryExpr([](double p) { return normal_quantile(p); });
}

PseudoSample pseudo_cov(const Eigen::MatrixXd& q) {
  if (q.rows() < 1 || q.cols() < 1) {
    throw InvalidDimension("scores must be non-empty");
  }
  if (!q.allFinite()) throw InvalidInput("scores must be finite");
  Eigen::MatrixXd s = Eigen::MatrixXd::Zero(q.cols(), q.cols());
  s.selfadjointView<Eigen::Lower>().rankUpdate(q.transpose(),
                                               1.0 / static_cast<double>(q.rows()));
  return PseudoSample{q, SymMatrix::from_lower(s)};
}

Eigen::MatrixXd standardize(const DataMatrix& x) {
  require_shape(x);
  Eigen::MatrixXd z = x.values.rowwise() - x.values.colwise().mean();
  for (Index j = 0; j < z.cols(); ++j) {
    const double sd = std::sqrt(z.col(j).squaredNorm() / static_cast<double>(z.rows()));
    if (!(sd > 0.0)) {
      throw DegenerateColumn(static_cast<std::size_t>(j),
                             x.names.empty() ? std::string{} : x.column_name(j));
    }
    z.col(j) /= sd;
  }
  return z;
}

PseudoSample make_pseudo_sample(const DataMatrix& x, bool copula) {
  if (copula) return pseudo_cov(gaussianize(ecdf_transform(x)));
  return pseudo_cov(standardize(x));
}

}  // namespace gcgm
