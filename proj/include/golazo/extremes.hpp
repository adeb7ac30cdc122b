#pragma once

// Extreme-value pipeline: empirical variograms, the Fiedler-Bapat map between
// variograms and Laplacian precisions, and a Huesler-Reiss Pareto sampler.

#include "golazo/matcore.hpp"
#include "golazo/parallel.hpp"

#include <random>

namespace golazo {

/// Symmetric, zero-diagonal, nonnegative matrix. Conditional negative
/// definiteness is not enforced (empirical estimates may violate it) but can be
/// queried.
class VariogramMatrix {
 public:
  VariogramMatrix() = default;
  explicit VariogramMatrix(const Eigen::MatrixXd& m);

  Index dim() const noexcept { return m_.rows(); }
  double operator()(Index i, Index j) const { return m_(i, j); }
  const Eigen::MatrixXd& matrix() const noexcept { return m_; }

  /// Largest eigenvalue of P^T Gamma P; negative iff Gamma is strictly CND.
  double cnd_margin() const;
  bool is_conditionally_negative_definite() const { return cnd_margin() < 0.0; }

  VariogramMatrix block(std::span<const Index> rows) const;

 private:
  Eigen::MatrixXd m_;
};

/// Observations in rows, variables in columns, all finite.
struct SampleBlock {
  Eigen::MatrixXd values;

  SampleBlock() = default;
  explicit SampleBlock(Eigen::MatrixXd v);

  Index rows() const noexcept { return values.rows(); }
  Index cols() const noexcept { return values.cols(); }
  SampleBlock select_rows(std::span<const Index> rows) const;
};

/// Rank-based estimator: empirical CDFs with denominator n + 1 and average
/// ranks for ties; for each m the rows with F_m >= 1 - k/n are kept and the
/// sample variance of log(1 - F_i) - log(1 - F_j) is taken; the d estimates are
/// averaged.
VariogramMatrix empirical_variogram(const SampleBlock& x, Index k, Exec exec = Exec::parallel);

/// Estimator for data already on the multivariate Pareto scale with
/// exponential margins: for each m the rows with X_m > 0 are kept and the
/// sample variance of X_i - X_j is taken, without rank transformation.
VariogramMatrix empirical_variogram_pareto(const SampleBlock& x, Exec exec = Exec::parallel);

/// Effective sample size k = ceil((1 - a) n) for quantile threshold a in [0, 1).
Index exceedance_count(Index n, double a);

struct BorderedInverse {
  SymMatrix theta;
  Eigen::VectorXd border;
  double corner = 0.0;
};

/// Inverts [[-Gamma/2, 1], [1^T, 0]] and splits the result.
BorderedInverse fiedler_bapat(const VariogramMatrix& gamma);
SymMatrix gamma_to_theta(const VariogramMatrix& gamma);

/// Gamma_ij = T_ii + T_jj - 2 T_ij with T the pseudoinverse of theta.
VariogramMatrix theta_to_gamma(const SymMatrix& theta);

/// Draws n rows from the Huesler-Reiss multivariate Pareto distribution in
/// exponential margins. Every row has at least one positive entry.
SampleBlock sample_hr_pareto(const VariogramMatrix& gamma, Index n, std::mt19937_64& rng);

}  // namespace golazo
