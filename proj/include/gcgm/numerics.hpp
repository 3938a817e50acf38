#pragma once

#include <initializer_list>
#include <span>

#include <Eigen/Dense>

namespace gcgm {

using Index = Eigen::Index;

/// Dense symmetric matrix. Symmetry holds exactly: every constructor mirrors
/// the lower triangle onto the upper one and set() writes both entries.
class SymMatrix {
 public:
  SymMatrix() = default;
  explicit SymMatrix(Index order);

  static SymMatrix identity(Index order);
  static SymMatrix diagonal(std::span<const double> values);
  /// Mirrors the lower triangle of m; the upper triangle is ignored.
  static SymMatrix from_lower(const Eigen::MatrixXd& m);
  /// Averages m and m^T. Use for results of floating-point products that
  /// are symmetric in exact arithmetic.
  static SymMatrix symmetrized(const Eigen::MatrixXd& m);
  static SymMatrix from_rows(
      std::initializer_list<std::initializer_list<double>> rows);

  Index order() const noexcept { return data_.rows(); }
  double operator()(Index i, Index j) const { return data_(i, j); }
  void set(Index i, Index j, double value) {
    data_(i, j) = value;
    data_(j, i) = value;
  }
  void add_to_diagonal(double shift) {
    data_.diagonal().array() += shift;
  }

  const Eigen::MatrixXd& dense() const noexcept { return data_; }

  friend bool operator==(const SymMatrix&, const SymMatrix&) = default;

 private:
  Eigen::MatrixXd data_;
};

/// Lower Cholesky factor L with L L^T = m. Throws NotPositiveDefinite.
Eigen::MatrixXd cholesky(const SymMatrix& m);

/// log|m| from the Cholesky diagonal.
double logdet_pd(const SymMatrix& m);

SymMatrix inv_pd(const SymMatrix& m);

double min_eigenvalue(const SymMatrix& m);

/// tr(A B) for symmetric A, B without forming the product.
inline double trace_product(const SymMatrix& a, const SymMatrix& b) {
  return a.dense().cwiseProduct(b.dense()).sum();
}

}  // namespace gcgm
