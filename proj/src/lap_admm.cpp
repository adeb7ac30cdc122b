#include "golazo/lap_admm.hpp"

#include "admm_detail.hpp"
#include "golazo/error.hpp"
#include "golazo/extremes.hpp"

#include <cmath>
#include <limits>

namespace golazo {

namespace {

Eigen::MatrixXd xi_inner(const Eigen::MatrixXd& s_in, const Eigen::MatrixXd& a,
                         const Eigen::MatrixXd& b, const Eigen::MatrixXd& dual,
                         const Eigen::MatrixXd& xi_prev, const Eigen::MatrixXd& p,
                         const AdmmParams& params) {
  const Eigen::MatrixXd pt = p.transpose();
  return pt * (s_in + params.sigma * (b - a) - dual) * p - params.rho * params.sigma * xi_prev;
}

void check_basis(const ProjectionBasis& basis, Index d) {
  if (basis.dim != d || basis.matrix.rows() != d || basis.matrix.cols() != d - 1) {
    throw Error(Errc::invalid_dimension, "projection basis does not match dimension " +
                                             std::to_string(d));
  }
}

}  // namespace

XiStep xi_update(const SymMatrix& s_in, const SymMatrix& a, const SymMatrix& b,
                 const SymMatrix& dual, const SymMatrix& xi_prev, const ProjectionBasis& basis,
                 const AdmmParams& params) {
  params.validate();
  const Index d = s_in.dim();
  check_basis(basis, d);
  if (a.dim() != d || b.dim() != d || dual.dim() != d || xi_prev.dim() != d - 1) {
    throw Error(Errc::invalid_dimension, "xi_update: dimension mismatch");
  }
  double logdet = 0.0;
  const Eigen::MatrixXd xi = detail::logdet_prox(
      detail::symmetrize(xi_inner(s_in.matrix(), a.matrix(), b.matrix(), dual.matrix(),
                                  xi_prev.matrix(), basis.matrix, params)),
      params.sigma, params.rho, logdet, "Xi-update matrix");
  return {SymMatrix(xi), SymMatrix(basis.matrix * xi * basis.matrix.transpose())};
}

LaplacianResult solve_latent_laplacian(const SymMatrix& s_in, const GolazoBounds& bounds,
                                       const AdmmParams& params, const ProjectionBasis& basis,
                                       const IterationObserver& observer) {
  params.validate();
  bounds.validate();
  const Index d = s_in.dim();
  if (d < 2) throw Error(Errc::invalid_dimension, "solve_latent_laplacian: need dimension >= 2");
  if (bounds.dim() != d) {
    throw Error(Errc::invalid_dimension, "solve_latent_laplacian: bounds dimension " +
                                             std::to_string(bounds.dim()) + " != input dimension " +
                                             std::to_string(d));
  }
  check_basis(basis, d);

  const Eigen::MatrixXd& sm = s_in.matrix();
  const Eigen::MatrixXd& p = basis.matrix;
  Eigen::MatrixXd xi = Eigen::MatrixXd::Identity(d - 1, d - 1);
  Eigen::MatrixXd theta = p * p.transpose();
  Eigen::MatrixXd a = Eigen::MatrixXd::Identity(d, d);
  Eigen::MatrixXd b = Eigen::MatrixXd::Zero(d, d);
  Eigen::MatrixXd dual = Eigen::MatrixXd::Zero(d, d);

  LaplacianResult result;
  for (int k = 0; k < params.max_iter; ++k) {
    double logdet = 0.0;
    Eigen::MatrixXd xi_next =
        detail::logdet_prox(detail::symmetrize(xi_inner(sm, a, b, dual, xi, p, params)),
                            params.sigma, params.rho, logdet, "Xi-update matrix");
    Eigen::MatrixXd theta_next = detail::symmetrize(p * xi_next * p.transpose());
    detail::TailStep step = detail::admm_tail(theta_next, a, b, dual, bounds, params);
    detail::check_finite(k + 1, theta_next, step);

    const double rel =
        std::max({detail::rel_change(theta_next, theta), detail::rel_change(step.a, a),
                  detail::rel_change(step.b, b)});
    const Eigen::MatrixXd resid = theta_next - step.a + step.b;
    const double ier = resid.norm();
    const double objective = -logdet + theta_next.cwiseProduct(sm).sum() +
                             golazo_value(step.a, bounds) + params.lambda * step.b.trace() +
                             0.5 * params.sigma * resid.squaredNorm();

    result.trace.rel_chg.push_back(rel);
    result.trace.ier.push_back(ier);
    result.trace.objective.push_back(objective);

    xi = std::move(xi_next);
    theta = std::move(theta_next);
    a = std::move(step.a);
    b = std::move(step.b);
    dual = std::move(step.dual);
    result.iterations = k + 1;
    if (observer) observer(k + 1, theta, a, b);

    if (rel < params.eps_rel && ier < params.eps_feas) {
      result.converged = true;
      break;
    }
  }
  result.theta = SymMatrix(theta);
  result.a = SymMatrix(a);
  result.b = SymMatrix(b);
  result.xi = SymMatrix(xi);
  return result;
}

LaplacianResult solve_latent_laplacian(const SymMatrix& s_in, const GolazoBounds& bounds,
                                       const AdmmParams& params) {
  return solve_latent_laplacian(s_in, bounds, params, ones_complement_basis(s_in.dim()));
}

double lcggm_loglik(const SymMatrix& theta, const SymMatrix& s) {
  if (theta.dim() != s.dim()) throw Error(Errc::invalid_dimension, "lcggm_loglik: dimension mismatch");
  return log_pseudo_det(theta) - theta.matrix().cwiseProduct(s.matrix()).sum();
}

double surrogate_loglik(const SymMatrix& theta, const VariogramMatrix& gamma) {
  if (theta.dim() != gamma.dim()) {
    throw Error(Errc::invalid_dimension, "surrogate_loglik: dimension mismatch");
  }
  return log_pseudo_det(theta) + 0.5 * theta.matrix().cwiseProduct(gamma.matrix()).sum();
}

double latent_laplacian_objective(const SymMatrix& s_in, const SymMatrix& theta,
                                  const SymMatrix& a, const SymMatrix& b,
                                  const GolazoBounds& bounds, double lambda) {
  double nll = 0.0;
  try {
    nll = -lcggm_loglik(theta, s_in);
  } catch (const Error& e) {
    if (e.code() != Errc::singular) throw;
    return std::numeric_limits<double>::infinity();
  }
  return nll + golazo_value(a, bounds) + lambda * b.matrix().trace();
}

}  // namespace golazo
