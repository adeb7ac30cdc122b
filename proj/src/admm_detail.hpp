#pragma once

// Steps shared by the Gaussian and Laplacian ADMM loops, on raw Eigen storage.

#include "golazo/admm_params.hpp"
#include "golazo/penalty.hpp"

#include <string_view>

namespace golazo::detail {

inline Eigen::MatrixXd symmetrize(const Eigen::MatrixXd& m) { return 0.5 * (m + m.transpose()); }

/// Solves the log-det quadratic subproblem for inner matrix V.
/// Returns the minimizer and writes sum(log x) to `logdet`.
Eigen::MatrixXd logdet_prox(const Eigen::MatrixXd& inner, double sigma, double rho,
                            double& logdet, std::string_view role);

struct TailStep {
  Eigen::MatrixXd dual_half;
  Eigen::MatrixXd a;
  Eigen::MatrixXd b;
  Eigen::MatrixXd dual;
};

/// Dual half-step, A prox, B projection and full dual step, given the new primal.
TailStep admm_tail(const Eigen::MatrixXd& primal_next, const Eigen::MatrixXd& a,
                   const Eigen::MatrixXd& b, const Eigen::MatrixXd& dual,
                   const GolazoBounds& bounds, const AdmmParams& params);

Eigen::MatrixXd b_step(const Eigen::MatrixXd& b, const Eigen::MatrixXd& dual_half,
                       const AdmmParams& params);

inline double rel_change(const Eigen::MatrixXd& next, const Eigen::MatrixXd& prev) {
  return (next - prev).norm() / (1.0 + prev.norm());
}

void check_finite(int iteration, const Eigen::MatrixXd& primal, const TailStep& step);

}  // namespace golazo::detail
