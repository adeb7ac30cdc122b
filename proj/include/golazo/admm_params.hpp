#pragma once

#include "golazo/matcore.hpp"

#include <functional>
#include <vector>

namespace golazo {

/// Hyperparameters of the multi-block ADMM. The proximal weights follow the
/// practical choice tau = varsigma (2 + alpha) / 2 and r1 = r2 = varsigma sigma,
/// which satisfies tau > (2 + alpha) / 2 and r1, r2 > sigma whenever varsigma > 1.
struct AdmmParams {
  double sigma = 1.0;
  double alpha = 1.0;
  double varsigma = 1.01;
  double rho = 0.0;
  double lambda = 0.1;
  double eps_rel = 1e-5;
  double eps_feas = 1e-5;
  int max_iter = 10000;

  double tau() const noexcept { return varsigma * (2.0 + alpha) / 2.0; }
  double r1() const noexcept { return varsigma * sigma; }
  double r2() const noexcept { return varsigma * sigma; }

  /// Throws Errc::invalid_argument when a convergence condition is violated.
  void validate() const;
};

enum class SolveStatus { converged, max_iterations };

struct SolverTrace {
  std::vector<double> rel_chg;
  std::vector<double> ier;
  std::vector<double> objective;
};

struct AdmmResult {
  SymMatrix m;
  SymMatrix a;
  SymMatrix b;
  int iterations = 0;
  SolverTrace trace;
  bool converged = false;

  double final_rel_chg() const { return trace.rel_chg.empty() ? 0.0 : trace.rel_chg.back(); }
  double final_ier() const { return trace.ier.empty() ? 0.0 : trace.ier.back(); }
};

/// Called after every sweep with (iteration, primal, A, B); primal is M or Theta.
using IterationObserver = std::function<void(int, const Eigen::MatrixXd&, const Eigen::MatrixXd&,
                                             const Eigen::MatrixXd&)>;

/// Eigenvalue map of the log-det quadratic subproblem:
/// x = (-v + sqrt(v^2 + 4 (rho + 1) sigma)) / (2 (rho + 1) sigma).
double logdet_root(double v, double sigma, double rho) noexcept;

}  // namespace golazo
