#pragma once

// Dense symmetric linear algebra shared by the solvers.

#include <Eigen/Dense>

#include <span>
#include <string_view>
#include <vector>

namespace golazo {

using Index = Eigen::Index;

/// Dense symmetric matrix with finite entries. Construction from an arbitrary
/// square matrix symmetrizes it as (S + S^T) / 2.
class SymMatrix {
 public:
  SymMatrix() = default;
  explicit SymMatrix(const Eigen::MatrixXd& m);

  static SymMatrix zero(Index dim);
  static SymMatrix identity(Index dim);
  static SymMatrix diagonal(const Eigen::VectorXd& diag);

  Index dim() const noexcept { return m_.rows(); }
  double operator()(Index i, Index j) const { return m_(i, j); }
  const Eigen::MatrixXd& matrix() const noexcept { return m_; }

  SymMatrix operator+(const SymMatrix& rhs) const;
  SymMatrix operator-(const SymMatrix& rhs) const;
  SymMatrix operator*(double c) const;
  friend SymMatrix operator*(double c, const SymMatrix& s) { return s * c; }

  /// Principal submatrix on `rows` x `rows`.
  SymMatrix block(std::span<const Index> rows) const;

 private:
  Eigen::MatrixXd m_;
};

/// Eigenvalues ascending; column i of `vectors` pairs with values[i].
struct EigenPair {
  Eigen::VectorXd values;
  Eigen::MatrixXd vectors;
};

enum class BasisFlavor { helmert, householder };

/// Orthonormal basis of the complement of the all-ones vector (d x (d-1)).
struct ProjectionBasis {
  Index dim = 0;
  Eigen::MatrixXd matrix;
};

EigenPair sym_eig(const SymMatrix& s, std::string_view role = "matrix");
EigenPair sym_eig(const Eigen::MatrixXd& s, std::string_view role = "matrix");

/// Nearest PSD matrix in Frobenius norm (negative eigenvalues clamped to 0).
SymMatrix psd_project(const SymMatrix& s);

/// Rebuilds V diag(f(values)) V^T.
template <typename F>
Eigen::MatrixXd spectral_map(const EigenPair& eig, F&& f) {
  Eigen::VectorXd mapped = eig.values.unaryExpr(f);
  Eigen::MatrixXd out = eig.vectors * mapped.asDiagonal() * eig.vectors.transpose();
  return 0.5 * (out + out.transpose());
}

ProjectionBasis ones_complement_basis(Index d, BasisFlavor flavor = BasisFlavor::helmert);

/// Zero threshold used for Laplacian rank checks: 1e-10 * max|entry|.
double laplacian_zero_threshold(const Eigen::MatrixXd& theta);

/// Checks that theta is a PSD signed Laplacian of rank d-1 and returns its
/// eigendecomposition. Throws Errc::singular otherwise.
EigenPair checked_laplacian_eig(const SymMatrix& theta);

/// Product of the nonzero eigenvalues of a rank d-1 Laplacian, i.e. det(P^T theta P).
double pseudo_det(const SymMatrix& theta, BasisFlavor flavor = BasisFlavor::helmert);
double log_pseudo_det(const SymMatrix& theta, BasisFlavor flavor = BasisFlavor::helmert);

/// M_OO - M_OH (M_HH)^{-1} M_HO.
SymMatrix schur_complement(const SymMatrix& m, std::span<const Index> observed,
                           std::span<const Index> hidden);

/// Maximum absolute row sum of `m`.
double max_abs_row_sum(const Eigen::MatrixXd& m);

bool all_finite(const Eigen::MatrixXd& m);

}  // namespace golazo
