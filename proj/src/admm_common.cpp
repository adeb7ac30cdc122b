#include "admm_detail.hpp"

#include "golazo/error.hpp"

#include <cmath>
#include <string>

namespace golazo {

void AdmmParams::validate() const {
  auto fail = [](const std::string& what) { throw Error(Errc::invalid_argument, "AdmmParams: " + what); };
  if (!(sigma > 0.0) || !std::isfinite(sigma)) fail("sigma must be positive");
  if (!(alpha > 0.0 && alpha < 2.0)) fail("alpha must lie in (0, 2)");
  if (!(varsigma > 1.0) || !std::isfinite(varsigma)) fail("varsigma must exceed 1");
  if (!(rho >= 0.0) || !std::isfinite(rho)) fail("rho must be >= 0");
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) fail("lambda must be >= 0");
  if (!(eps_rel >= 0.0) || !(eps_feas >= 0.0)) fail("tolerances must be >= 0");
  if (max_iter < 1) fail("max_iter must be >= 1");
}

double logdet_root(double v, double sigma, double rho) noexcept {
  const double a = (rho + 1.0) * sigma;
  const double disc = std::sqrt(v * v + 4.0 * a);
  // Both branches equal (-v + disc) / (2a); pick the one without cancellation.
  return v > 0.0 ? 2.0 / (v + disc) : (disc - v) / (2.0 * a);
}

namespace detail {

Eigen::MatrixXd logdet_prox(const Eigen::MatrixXd& inner, double sigma, double rho,
                            double& logdet, std::string_view role) {
  const EigenPair eig = sym_eig(inner, role);
  Eigen::VectorXd x(eig.values.size());
  logdet = 0.0;
  for (Index i = 0; i < x.size(); ++i) {
    x(i) = logdet_root(eig.values(i), sigma, rho);
    logdet += std::log(x(i));
  }
  return symmetrize(eig.vectors * x.asDiagonal() * eig.vectors.transpose());
}

Eigen::MatrixXd b_step(const Eigen::MatrixXd& b, const Eigen::MatrixXd& dual_half,
                       const AdmmParams& params) {
  const Index d = b.rows();
  const Eigen::MatrixXd target =
      b + (dual_half - params.lambda * Eigen::MatrixXd::Identity(d, d)) / (params.tau() * params.r2());
  if (!target.allFinite()) throw Error(Errc::divergence, "ADMM diverged: non-finite B-update input");
  return psd_project(SymMatrix(target)).matrix();
}

TailStep admm_tail(const Eigen::MatrixXd& primal_next, const Eigen::MatrixXd& a,
                   const Eigen::MatrixXd& b, const Eigen::MatrixXd& dual,
                   const GolazoBounds& bounds, const AdmmParams& params) {
  TailStep out;
  out.dual_half = symmetrize(dual - params.alpha * params.sigma * (primal_next - a + b));

  const double step = 1.0 / (params.tau() * params.r1());
  out.a = a - out.dual_half * step;
  golazo_prox_inplace(out.a, bounds, step);

  out.b = b_step(b, out.dual_half, params);

  out.dual = symmetrize(out.dual_half + params.sigma * (out.a - a) - params.sigma * (out.b - b));
  return out;
}

void check_finite(int iteration, const Eigen::MatrixXd& primal, const TailStep& step) {
  if (!primal.allFinite() || !step.a.allFinite() || !step.b.allFinite() ||
      !step.dual.allFinite()) {
    throw Error(Errc::divergence,
                "ADMM diverged: non-finite iterate at iteration " + std::to_string(iteration));
  }
}

}  // namespace detail
}  // namespace golazo
