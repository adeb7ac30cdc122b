#include "golazo/extremes.hpp"

#include "golazo/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

namespace golazo {

namespace {

/// Average ranks (1-based) of `col`.
Eigen::VectorXd average_ranks(const Eigen::VectorXd& col) {
  const Index n = col.size();
  std::vector<Index> order(n);
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) { return col(a) < col(b); });
  Eigen::VectorXd ranks(n);
  Index start = 0;
  while (start < n) {
    Index stop = start + 1;
    while (stop < n && col(order[stop]) == col(order[start])) ++stop;
    const double avg = 0.5 * static_cast<double>(start + 1 + stop);
    for (Index i = start; i < stop; ++i) ranks(order[i]) = avg;
    start = stop;
  }
  return ranks;
}

/// Sample variance (divisor count - 1) of column differences over the chosen rows.
Eigen::MatrixXd difference_variances(const Eigen::MatrixXd& t, const std::vector<Index>& rows) {
  const Index d = t.cols();
  const double count = static_cast<double>(rows.size());
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(d, d);
  for (Index i = 0; i < d; ++i) {
    for (Index j = i + 1; j < d; ++j) {
      double mean = 0.0;
      for (Index r : rows) mean += t(r, i) - t(r, j);
      mean /= count;
      double ss = 0.0;
      for (Index r : rows) {
        const double dev = t(r, i) - t(r, j) - mean;
        ss += dev * dev;
      }
      out(i, j) = out(j, i) = ss / (count - 1.0);
    }
  }
  return out;
}

/// Averages per-coordinate variogram estimates. `select(m)` returns the rows
/// used for coordinate m. Parallel and serial paths reduce in the same order.
template <typename Select>
VariogramMatrix average_over_coordinates(const Eigen::MatrixXd& t, Select&& select, Exec exec) {
  const Index d = t.cols();
  std::vector<Eigen::MatrixXd> per_m(d);
  std::vector<Index> counts(d, 0);

  auto body = [&](Index m) {
    const std::vector<Index> rows = select(m);
    counts[m] = static_cast<Index>(rows.size());
    if (rows.size() >= 2) per_m[m] = difference_variances(t, rows);
  };

  if (exec == Exec::parallel) {
#pragma omp parallel for schedule(dynamic)
    for (Index m = 0; m < d; ++m) body(m);
  } else {
    for (Index m = 0; m < d; ++m) body(m);
  }

  Eigen::MatrixXd total = Eigen::MatrixXd::Zero(d, d);
  for (Index m = 0; m < d; ++m) {
    if (counts[m] < 2) {
      throw Error(Errc::insufficient_exceedances,
                  "empirical variogram: coordinate " + std::to_string(m) + " has " +
                      std::to_string(counts[m]) + " exceedance rows, need at least 2");
    }
    total += per_m[m];
  }
  return VariogramMatrix(total / static_cast<double>(d));
}

}  // namespace

VariogramMatrix::VariogramMatrix(const Eigen::MatrixXd& m) {
  if (m.rows() != m.cols()) throw Error(Errc::invalid_dimension, "variogram must be square");
  if (!m.allFinite()) throw Error(Errc::invalid_argument, "variogram has non-finite entries");
  Eigen::MatrixXd sym = 0.5 * (m + m.transpose());
  const double tol = 1e-10 * std::max(1.0, sym.cwiseAbs().maxCoeff());
  for (Index i = 0; i < sym.rows(); ++i) {
    if (std::abs(sym(i, i)) > tol) {
      throw Error(Errc::invalid_argument, "variogram diagonal must be zero");
    }
    sym(i, i) = 0.0;
    for (Index j = 0; j < sym.cols(); ++j) {
      if (sym(i, j) < -tol) throw Error(Errc::invalid_argument, "variogram entries must be >= 0");
      sym(i, j) = std::max(sym(i, j), 0.0);
    }
  }
  m_ = std::move(sym);
}

double VariogramMatrix::cnd_margin() const {
  if (dim() < 2) return -INFINITY;
  const ProjectionBasis basis = ones_complement_basis(dim());
  const Eigen::MatrixXd reduced = basis.matrix.transpose() * m_ * basis.matrix;
  return sym_eig(0.5 * (reduced + reduced.transpose()), "P^T Gamma P").values.maxCoeff();
}

VariogramMatrix VariogramMatrix::block(std::span<const Index> rows) const {
  Eigen::MatrixXd out(rows.size(), rows.size());
  for (std::size_t a = 0; a < rows.size(); ++a) {
    for (std::size_t b = 0; b < rows.size(); ++b) out(a, b) = m_(rows[a], rows[b]);
  }
  return VariogramMatrix(out);
}

SampleBlock::SampleBlock(Eigen::MatrixXd v) : values(std::move(v)) {
  if (values.rows() < 1 || values.cols() < 1) throw Error(Errc::data, "sample block is empty");
  if (!values.allFinite()) throw Error(Errc::data, "sample block has non-finite entries");
}

SampleBlock SampleBlock::select_rows(std::span<const Index> rows) const {
  Eigen::MatrixXd out(rows.size(), cols());
  for (std::size_t r = 0; r < rows.size(); ++r) out.row(r) = values.row(rows[r]);
  return SampleBlock(std::move(out));
}

Index exceedance_count(Index n, double a) {
  if (!(a >= 0.0 && a < 1.0)) {
    throw Error(Errc::invalid_argument, "quantile threshold must lie in [0, 1)");
  }
  // Guard against (1 - a) n landing a hair above an integer.
  const double raw = (1.0 - a) * static_cast<double>(n);
  return static_cast<Index>(std::ceil(raw - 1e-9));
}

VariogramMatrix empirical_variogram(const SampleBlock& x, Index k, Exec exec) {
  const Index n = x.rows();
  const Index d = x.cols();
  if (d < 2) throw Error(Errc::invalid_dimension, "empirical_variogram: need at least 2 columns");
  if (n < 2) throw Error(Errc::data, "empirical_variogram: need at least 2 rows");
  if (k < 2 || k > n) {
    throw Error(Errc::invalid_argument, "empirical_variogram: need 2 <= k <= n, got k = " +
                                            std::to_string(k) + ", n = " + std::to_string(n));
  }

  // Rank transform; 2 * rank keeps half-integer average ranks exact.
  Eigen::MatrixXd twice_rank(n, d);
  Eigen::MatrixXd t(n, d);
  const double denom = static_cast<double>(n + 1);
  for (Index j = 0; j < d; ++j) {
    const Eigen::VectorXd r = average_ranks(x.values.col(j));
    twice_rank.col(j) = 2.0 * r;
    for (Index i = 0; i < n; ++i) t(i, j) = std::log(1.0 - r(i) / denom);
  }

  // F_m >= 1 - k/n  <=>  rank * n >= (n - k)(n + 1).
  const double threshold = 2.0 * static_cast<double>(n - k) * denom;
  auto select = [&](Index m) {
    std::vector<Index> rows;
    for (Index i = 0; i < n; ++i) {
      if (twice_rank(i, m) * static_cast<double>(n) >= threshold) rows.push_back(i);
    }
    return rows;
  };
  return average_over_coordinates(t, select, exec);
}

VariogramMatrix empirical_variogram_pareto(const SampleBlock& x, Exec exec) {
  if (x.cols() < 2) {
    throw Error(Errc::invalid_dimension, "empirical_variogram_pareto: need at least 2 columns");
  }
  const Eigen::MatrixXd& t = x.values;
  auto select = [&](Index m) {
    std::vector<Index> rows;
    for (Index i = 0; i < t.rows(); ++i) {
      if (t(i, m) > 0.0) rows.push_back(i);
    }
    return rows;
  };
  return average_over_coordinates(t, select, exec);
}

BorderedInverse fiedler_bapat(const VariogramMatrix& gamma) {
  const Index d = gamma.dim();
  if (d < 2) throw Error(Errc::invalid_dimension, "fiedler_bapat: need dimension >= 2");
  Eigen::MatrixXd bordered = Eigen::MatrixXd::Zero(d + 1, d + 1);
  bordered.topLeftCorner(d, d) = -0.5 * gamma.matrix();
  bordered.topRightCorner(d, 1).setOnes();
  bordered.bottomLeftCorner(1, d).setOnes();

  const Eigen::FullPivLU<Eigen::MatrixXd> lu(bordered);
  if (!lu.isInvertible() || lu.rcond() < 1e-14) {
    throw Error(Errc::singular,
                "fiedler_bapat: bordered variogram matrix is singular (Gamma not strictly CND)");
  }
  const Eigen::MatrixXd inv = lu.inverse();
  return {SymMatrix(inv.topLeftCorner(d, d)), inv.topRightCorner(d, 1), inv(d, d)};
}

SymMatrix gamma_to_theta(const VariogramMatrix& gamma) { return fiedler_bapat(gamma).theta; }

VariogramMatrix theta_to_gamma(const SymMatrix& theta) {
  const EigenPair eig = checked_laplacian_eig(theta);
  const Index d = theta.dim();
  Eigen::VectorXd inv = Eigen::VectorXd::Zero(d);
  for (Index i = 1; i < d; ++i) inv(i) = 1.0 / eig.values(i);
  const Eigen::MatrixXd pinv = eig.vectors * inv.asDiagonal() * eig.vectors.transpose();
  Eigen::MatrixXd g(d, d);
  for (Index i = 0; i < d; ++i) {
    for (Index j = 0; j < d; ++j) g(i, j) = pinv(i, i) + pinv(j, j) - 2.0 * pinv(i, j);
  }
  return VariogramMatrix(g);
}

SampleBlock sample_hr_pareto(const VariogramMatrix& gamma, Index n, std::mt19937_64& rng) {
  const Index d = gamma.dim();
  if (d < 2) throw Error(Errc::invalid_dimension, "sample_hr_pareto: need dimension >= 2");
  if (n < 1) throw Error(Errc::invalid_argument, "sample_hr_pareto: need n >= 1");
  const Eigen::MatrixXd& g = gamma.matrix();

  // Gaussian increments relative to coordinate m: mean -Gamma_{.m}/2 and
  // covariance (Gamma_im + Gamma_jm - Gamma_ij)/2, which vanishes on row/column m.
  std::vector<Eigen::MatrixXd> factors(d);
  std::vector<Eigen::VectorXd> means(d);
  for (Index m = 0; m < d; ++m) {
    Eigen::MatrixXd cov(d, d);
    for (Index i = 0; i < d; ++i) {
      for (Index j = 0; j < d; ++j) cov(i, j) = 0.5 * (g(i, m) + g(j, m) - g(i, j));
    }
    const EigenPair eig = sym_eig(cov, "HR increment covariance");
    const double tol = 1e-10 * std::max(1.0, eig.values.cwiseAbs().maxCoeff());
    if (eig.values.minCoeff() < -tol) {
      throw Error(Errc::invalid_argument,
                  "sample_hr_pareto: increment covariance for coordinate " + std::to_string(m) +
                      " is not PSD (invalid variogram)");
    }
    factors[m] = eig.vectors * eig.values.cwiseMax(0.0).cwiseSqrt().asDiagonal();
    means[m] = -0.5 * g.col(m);
  }

  std::uniform_int_distribution<Index> pick(0, d - 1);
  std::exponential_distribution<double> expo(1.0);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);

  Eigen::MatrixXd out(n, d);
  Eigen::VectorXd z(d);
  Index filled = 0;
  while (filled < n) {
    const Index m = pick(rng);
    const double radius = expo(rng);
    for (Index i = 0; i < d; ++i) z(i) = normal(rng);
    Eigen::VectorXd y = means[m] + factors[m] * z;
    y(m) = 0.0;
    y.array() += radius;
    // The uniform mixture over m over-weights points exceeding in several
    // coordinates; accepting with probability 1/#exceedances corrects it.
    const auto exceed = (y.array() > 0.0).count();
    if (unif(rng) * static_cast<double>(exceed) < 1.0) out.row(filled++) = y.transpose();
  }
  return SampleBlock(std::move(out));
}

}  // namespace golazo
