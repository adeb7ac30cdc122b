#include "golazo/matcore.hpp"

#include "golazo/error.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace golazo {

namespace {

constexpr double kRowSumTolerance = 1e-8;
constexpr double kConditionLimit = 1e12;

void require_square(const Eigen::MatrixXd& m, std::string_view what) {
  if (m.rows() != m.cols()) {
    throw Error(Errc::invalid_dimension, std::string(what) + ": matrix is " +
                                             std::to_string(m.rows()) + "x" +
                                             std::to_string(m.cols()) + ", expected square");
  }
}

}  // namespace

const char* to_string(Errc code) noexcept {
  switch (code) {
    case Errc::invalid_argument: return "invalid-argument";
    case Errc::invalid_dimension: return "invalid-dimension";
    case Errc::invalid_step: return "invalid-step";
    case Errc::numeric_failure: return "numeric-failure";
    case Errc::singular: return "singular";
    case Errc::not_positive_definite: return "not-positive-definite";
    case Errc::divergence: return "divergence";
    case Errc::insufficient_exceedances: return "insufficient-exceedances";
    case Errc::data: return "data";
    case Errc::config: return "config";
  }
  return "unknown";
}

bool all_finite(const Eigen::MatrixXd& m) { return m.allFinite(); }

SymMatrix::SymMatrix(const Eigen::MatrixXd& m) {
  require_square(m, "SymMatrix");
  if (!m.allFinite()) throw Error(Errc::numeric_failure, "SymMatrix: non-finite entry");
  m_ = 0.5 * (m + m.transpose());
}

SymMatrix SymMatrix::zero(Index dim) { return SymMatrix(Eigen::MatrixXd::Zero(dim, dim)); }

SymMatrix SymMatrix::identity(Index dim) { return SymMatrix(Eigen::MatrixXd::Identity(dim, dim)); }

SymMatrix SymMatrix::diagonal(const Eigen::VectorXd& diag) {
  return SymMatrix(Eigen::MatrixXd(diag.asDiagonal()));
}

SymMatrix SymMatrix::operator+(const SymMatrix& rhs) const {
  if (rhs.dim() != dim()) throw Error(Errc::invalid_dimension, "SymMatrix +: dimension mismatch");
  return SymMatrix(m_ + rhs.m_);
}

SymMatrix SymMatrix::operator-(const SymMatrix& rhs) const {
  if (rhs.dim() != dim()) throw Error(Errc::invalid_dimension, "SymMatrix -: dimension mismatch");
  return SymMatrix(m_ - rhs.m_);
}

SymMatrix SymMatrix::operator*(double c) const { return SymMatrix(m_ * c); }

SymMatrix SymMatrix::block(std::span<const Index> rows) const {
  Eigen::MatrixXd out(rows.size(), rows.size());
  for (std::size_t a = 0; a < rows.size(); ++a) {
    for (std::size_t b = 0; b < rows.size(); ++b) out(a, b) = m_(rows[a], rows[b]);
  }
  return SymMatrix(out);
}

EigenPair sym_eig(const Eigen::MatrixXd& s, std::string_view role) {
  require_square(s, role);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(s);
  if (solver.info() != Eigen::Success) {
    throw Error(Errc::numeric_failure,
                "eigendecomposition of " + std::string(role) + " did not converge");
  }
  return {solver.eigenvalues(), solver.eigenvectors()};
}

EigenPair sym_eig(const SymMatrix& s, std::string_view role) { return sym_eig(s.matrix(), role); }

SymMatrix psd_project(const SymMatrix& s) {
  const EigenPair eig = sym_eig(s, "psd_project input");
  return SymMatrix(spectral_map(eig, [](double v) { return std::max(v, 0.0); }));
}

ProjectionBasis ones_complement_basis(Index d, BasisFlavor flavor) {
  if (d < 2) {
    throw Error(Errc::invalid_dimension,
                "ones_complement_basis: need d >= 2, got " + std::to_string(d));
  }
  Eigen::MatrixXd p = Eigen::MatrixXd::Zero(d, d - 1);
  if (flavor == BasisFlavor::helmert) {
    // Column k-1 has k leading entries 1/sqrt(k(k+1)) followed by -k/sqrt(k(k+1)).
    for (Index k = 1; k < d; ++k) {
      const double norm = std::sqrt(static_cast<double>(k) * static_cast<double>(k + 1));
      for (Index i = 0; i < k; ++i) p(i, k - 1) = 1.0 / norm;
      p(k, k - 1) = -static_cast<double>(k) / norm;
    }
  } else {
    // Householder reflector sending e_1 to 1/sqrt(d); its remaining columns
    // span the complement of the ones vector.
    Eigen::VectorXd v = Eigen::VectorXd::Constant(d, 1.0 / std::sqrt(static_cast<double>(d)));
    v(0) -= 1.0;
    const Eigen::MatrixXd h =
        Eigen::MatrixXd::Identity(d, d) - 2.0 * v * v.transpose() / v.squaredNorm();
    p = h.rightCols(d - 1);
  }
  return {d, p};
}

double laplacian_zero_threshold(const Eigen::MatrixXd& theta) {
  return 1e-10 * theta.cwiseAbs().maxCoeff();
}

double max_abs_row_sum(const Eigen::MatrixXd& m) {
  return m.rowwise().sum().cwiseAbs().maxCoeff();
}

EigenPair checked_laplacian_eig(const SymMatrix& theta) {
  const Index d = theta.dim();
  if (d < 2) throw Error(Errc::invalid_dimension, "Laplacian must have dimension >= 2");
  const double scale = std::max(1.0, theta.matrix().cwiseAbs().maxCoeff());
  const double row_sum = max_abs_row_sum(theta.matrix());
  if (row_sum > kRowSumTolerance * scale) {
    throw Error(Errc::singular,
                "matrix is not a signed Laplacian: max |row sum| = " + std::to_string(row_sum));
  }
  EigenPair eig = sym_eig(theta, "Laplacian");
  const double zero = laplacian_zero_threshold(theta.matrix());
  if (!(eig.values(1) > zero)) {
    throw Error(Errc::singular, "singular Laplacian: second eigenvalue " +
                                    std::to_string(eig.values(1)) + " is not above " +
                                    std::to_string(zero));
  }
  return eig;
}

double log_pseudo_det(const SymMatrix& theta, BasisFlavor flavor) {
  checked_laplacian_eig(theta);
  const ProjectionBasis basis = ones_complement_basis(theta.dim(), flavor);
  const Eigen::MatrixXd reduced = basis.matrix.transpose() * theta.matrix() * basis.matrix;
  const EigenPair eig = sym_eig(0.5 * (reduced + reduced.transpose()), "P^T theta P");
  return eig.values.array().log().sum();
}

double pseudo_det(const SymMatrix& theta, BasisFlavor flavor) {
  return std::exp(log_pseudo_det(theta, flavor));
}

SymMatrix schur_complement(const SymMatrix& m, std::span<const Index> observed,
                           std::span<const Index> hidden) {
  const Index d = m.dim();
  if (static_cast<Index>(observed.size() + hidden.size()) != d) {
    throw Error(Errc::invalid_argument, "schur_complement: O and H must partition the index set");
  }
  std::vector<int> seen(d, 0);
  for (Index i : observed) {
    if (i < 0 || i >= d) throw Error(Errc::invalid_argument, "schur_complement: index out of range");
    ++seen[i];
  }
  for (Index i : hidden) {
    if (i < 0 || i >= d) throw Error(Errc::invalid_argument, "schur_complement: index out of range");
    ++seen[i];
  }
  if (std::any_of(seen.begin(), seen.end(), [](int c) { return c != 1; })) {
    throw Error(Errc::invalid_argument, "schur_complement: O and H must be disjoint and cover [d]");
  }

  const Index no = static_cast<Index>(observed.size());
  const Index nh = static_cast<Index>(hidden.size());
  Eigen::MatrixXd m_oo(no, no), m_oh(no, nh), m_hh(nh, nh);
  for (Index a = 0; a < no; ++a) {
    for (Index b = 0; b < no; ++b) m_oo(a, b) = m(observed[a], observed[b]);
    for (Index b = 0; b < nh; ++b) m_oh(a, b) = m(observed[a], hidden[b]);
  }
  for (Index a = 0; a < nh; ++a) {
    for (Index b = 0; b < nh; ++b) m_hh(a, b) = m(hidden[a], hidden[b]);
  }
  if (nh == 0) return SymMatrix(m_oo);

  const EigenPair eig = sym_eig(m_hh, "M_HH");
  const double largest = eig.values.cwiseAbs().maxCoeff();
  const double smallest = eig.values.cwiseAbs().minCoeff();
  if (!(smallest > 0.0) || largest / smallest > kConditionLimit) {
    throw Error(Errc::singular, "schur_complement: M_HH is singular (condition number " +
                                    std::to_string(smallest > 0 ? largest / smallest : INFINITY) +
                                    ")");
  }
  const Eigen::MatrixXd inv_hh =
      eig.vectors * eig.values.cwiseInverse().asDiagonal() * eig.vectors.transpose();
  return SymMatrix(m_oo - m_oh * inv_hh * m_oh.transpose());
}

}  // namespace golazo
