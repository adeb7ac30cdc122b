#pragma once

// Random problem instances shared by the unit and acceptance tests.

#include "golazo/penalty.hpp"

#include <Eigen/Dense>

#include <random>

namespace testing_support {

inline Eigen::MatrixXd random_symmetric(Eigen::Index d, std::mt19937_64& rng, double scale = 1.0) {
  std::normal_distribution<double> normal(0.0, scale);
  Eigen::MatrixXd m(d, d);
  for (Eigen::Index i = 0; i < m.size(); ++i) m(i) = normal(rng);
  return 0.5 * (m + m.transpose());
}

inline Eigen::MatrixXd random_spd(Eigen::Index d, std::mt19937_64& rng, double floor = 0.5) {
  const Eigen::MatrixXd g = random_symmetric(d, rng);
  return g * g + floor * Eigen::MatrixXd::Identity(d, d);
}

/// Second-moment matrix of 3d Gaussian draws with a random correlated factor.
inline Eigen::MatrixXd random_covariance(Eigen::Index d, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  const Eigen::Index n = 3 * d;
  Eigen::MatrixXd x(n, d);
  for (Eigen::Index i = 0; i < x.size(); ++i) x(i) = normal(rng);
  const Eigen::MatrixXd mix = Eigen::MatrixXd::Identity(d, d) + 0.5 * random_symmetric(d, rng);
  x = x * mix;
  return x.transpose() * x / static_cast<double>(n);
}

/// Squared Euclidean distances of random points: a strictly CND variogram.
inline Eigen::MatrixXd random_variogram(Eigen::Index d, std::mt19937_64& rng, Eigen::Index dim = 3) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::MatrixXd pts(d, std::max<Eigen::Index>(dim, d));
  for (Eigen::Index i = 0; i < pts.size(); ++i) pts(i) = normal(rng);
  Eigen::MatrixXd g(d, d);
  for (Eigen::Index i = 0; i < d; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) g(i, j) = (pts.row(i) - pts.row(j)).squaredNorm();
  }
  return g;
}

/// Random PSD signed Laplacian of rank d - 1 with positive edge weights.
inline Eigen::MatrixXd random_laplacian(Eigen::Index d, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> weight(0.2, 2.0);
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(d, d);
  for (Eigen::Index i = 0; i < d; ++i) {
    for (Eigen::Index j = i + 1; j < d; ++j) w(i, j) = w(j, i) = weight(rng);
  }
  Eigen::MatrixXd theta = -w;
  theta.diagonal() = w.rowwise().sum();
  return theta;
}

/// Finite symmetric bounds with L in [-spread, 0], U in [0, spread] and a zero diagonal.
inline golazo::GolazoBounds random_finite_bounds(Eigen::Index d, std::mt19937_64& rng,
                                                 double spread = 0.4) {
  std::uniform_real_distribution<double> unif(0.0, spread);
  golazo::GolazoBounds b = golazo::GolazoBounds::zeros(d);
  for (Eigen::Index i = 0; i < d; ++i) {
    for (Eigen::Index j = i + 1; j < d; ++j) {
      b.lower(i, j) = b.lower(j, i) = -unif(rng);
      b.upper(i, j) = b.upper(j, i) = unif(rng);
    }
  }
  return b;
}

}  // namespace testing_support
