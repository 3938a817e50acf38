#include "gcgm/numerics.hpp"

#include <cmath>
#include <string>

#include "gcgm/errors.hpp"

namespace gcgm {

SymMatrix::SymMatrix(Index order) : data_(Eigen::MatrixXd::Zero(order, order)) {
  if (order < 1) throw InvalidDimension("matrix order must be positive");
}

SymMatrix SymMatrix::identity(Index order) {
  SymMatrix out(order);
  out.data_.diagonal().setOnes();
  return out;
}

SymMatrix SymMatrix::diagonal(std::span<const double> values) {
  SymMatrix out(static_cast<Index>(values.size()));
  for (std::size_t i = 0; i < values.size(); ++i) {
    out.data_(static_cast<Index>(i), static_cast<Index>(i)) = values[i];
  }
  return out;
}

SymMatrix SymMatrix::from_lower(const Eigen::MatrixXd& m) {
  if (m.rows() != m.cols()) throw DimensionMismatch("matrix is not square");
  SymMatrix out(m.rows());
  out.data_.triangularView<Eigen::Lower>() = m.triangularView<Eigen::Lower>();
  out.data_.triangularView<Eigen::StrictlyUpper>() =
      m.transpose().triangularView<Eigen::StrictlyUpper>();
  return out;
}

SymMatrix SymMatrix::symmetrized(const Eigen::MatrixXd& m) {
  if (m.rows() != m.cols()) throw DimensionMismatch("matrix is not square");
  Eigen::MatrixXd avg = 0.5 * (m + m.transpose());
  return from_lower(avg);
}

SymMatrix SymMatrix::from_rows(
    std::initializer_list<std::initializer_list<double>> rows) {
  const auto d = static_cast<Index>(rows.size());
  Eigen::MatrixXd m(d, d);
  Index i = 0;
  for (const auto& row : rows) {
    if (static_cast<Index>(row.size()) != d) {
      throw DimensionMismatch("ragged matrix literal");
    }
    Index j = 0;
    for (double v : row) m(i, j++) = v;
    ++i;
  }
  return from_lower(m);
}

Eigen::MatrixXd cholesky(const SymMatrix& m) {
  Eigen::LLT<Eigen::MatrixXd> llt(m.dense());
  if (llt.info() != Eigen::Success) {
    throw NotPositiveDefinite("matrix of order " + std::to_string(m.order()) +
                              " is not positive definite");
  }
  Eigen::MatrixXd lower = llt.matrixL();
  return lower;
}

double logdet_pd(const SymMatrix& m) {
  const Eigen::MatrixXd lower = cholesky(m);
  return 2.0 * lower.diagonal().array().log().sum();
}

SymMatrix inv_pd(const SymMatrix& m) {
  Eigen::LLT<Eigen::MatrixXd> llt(m.dense());
  if (llt.info() != Eigen::Success) {
    throw NotPositiveDefinite("matrix of order " + std::to_string(m.order()) +
                              " is not positive definite");
  }
  const Eigen::MatrixXd inv =
      llt.solve(Eigen::MatrixXd::Identity(m.order(), m.order()));
  return SymMatrix::symmetrized(inv);
}

double min_eigenvalue(const SymMatrix& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(
      m.dense(), Eigen::EigenvaluesOnly);
  return solver.eigenvalues()(0);
}

}  // namespace gcgm
