#include "golazo/gauss_admm.hpp"

#include "admm_detail.hpp"
#include "golazo/error.hpp"

#include <cmath>
#include <limits>

namespace golazo {

namespace {

void require_same_dim(Index d, std::initializer_list<const SymMatrix*> mats, const char* op) {
  for (const SymMatrix* m : mats) {
    if (m->dim() != d) throw Error(Errc::invalid_dimension, std::string(op) + ": dimension mismatch");
  }
}

Eigen::MatrixXd m_inner(const Eigen::MatrixXd& s, const Eigen::MatrixXd& a,
                        const Eigen::MatrixXd& b, const Eigen::MatrixXd& dual,
                        const Eigen::MatrixXd& m_prev, const AdmmParams& p) {
  return s + p.sigma * (b - a) - dual - p.rho * p.sigma * m_prev;
}

}  // namespace

double gaussian_loglik(const SymMatrix& k, const SymMatrix& s) {
  if (k.dim() != s.dim()) throw Error(Errc::invalid_dimension, "gaussian_loglik: dimension mismatch");
  const Eigen::LLT<Eigen::MatrixXd> llt(k.matrix());
  if (llt.info() != Eigen::Success) {
    throw Error(Errc::not_positive_definite, "gaussian_loglik: K is not positive definite");
  }
  const double logdet = 2.0 * llt.matrixLLT().diagonal().array().log().sum();
  return logdet - (k.matrix().cwiseProduct(s.matrix())).sum();
}

SymMatrix m_update(const SymMatrix& s, const SymMatrix& a, const SymMatrix& b,
                   const SymMatrix& dual, const SymMatrix& m_prev, const AdmmParams& params) {
  params.validate();
  require_same_dim(s.dim(), {&a, &b, &dual, &m_prev}, "m_update");
  double logdet = 0.0;
  return SymMatrix(detail::logdet_prox(
      m_inner(s.matrix(), a.matrix(), b.matrix(), dual.matrix(), m_prev.matrix(), params),
      params.sigma, params.rho, logdet, "M-update matrix"));
}

SymMatrix b_update(const SymMatrix& b, const SymMatrix& dual_half, const AdmmParams& params) {
  params.validate();
  require_same_dim(b.dim(), {&dual_half}, "b_update");
  return SymMatrix(detail::b_step(b.matrix(), dual_half.matrix(), params));
}

double latent_gaussian_objective(const SymMatrix& s, const SymMatrix& a, const SymMatrix& b,
                                 const GolazoBounds& bounds, double lambda) {
  double nll = 0.0;
  try {
    nll = -gaussian_loglik(a - b, s);
  } catch (const Error& e) {
    if (e.code() != Errc::not_positive_definite) throw;
    return std::numeric_limits<double>::infinity();
  }
  return nll + golazo_value(a, bounds) + lambda * b.matrix().trace();
}

AdmmResult solve_latent_gaussian(const SymMatrix& s, const GolazoBounds& bounds,
                                 const AdmmParams& params, const IterationObserver& observer) {
  params.validate();
  bounds.validate();
  const Index d = s.dim();
  if (d < 1) throw Error(Errc::invalid_dimension, "solve_latent_gaussian: empty covariance");
  if (bounds.dim() != d) {
    throw Error(Errc::invalid_dimension, "solve_latent_gaussian: bounds dimension " +
                                             std::to_string(bounds.dim()) + " != covariance dimension " +
                                             std::to_string(d));
  }

  const Eigen::MatrixXd& sm = s.matrix();
  Eigen::MatrixXd m = Eigen::MatrixXd::Identity(d, d);
  Eigen::MatrixXd a = Eigen::MatrixXd::Identity(d, d);
  Eigen::MatrixXd b = Eigen::MatrixXd::Zero(d, d);
  Eigen::MatrixXd dual = Eigen::MatrixXd::Zero(d, d);

  AdmmResult result;
  for (int k = 0; k < params.max_iter; ++k) {
    double logdet = 0.0;
    Eigen::MatrixXd m_next = detail::logdet_prox(m_inner(sm, a, b, dual, m, params), params.sigma,
                                                 params.rho, logdet, "M-update matrix");
    detail::TailStep step = detail::admm_tail(m_next, a, b, dual, bounds, params);
    detail::check_finite(k + 1, m_next, step);

    const double rel = std::max({detail::rel_change(m_next, m), detail::rel_change(step.a, a),
                                 detail::rel_change(step.b, b)});
    const Eigen::MatrixXd resid = m_next - step.a + step.b;
    const double ier = resid.norm();
    const double objective = -(logdet - m_next.cwiseProduct(sm).sum()) +
                             golazo_value(step.a, bounds) + params.lambda * step.b.trace() +
                             0.5 * params.sigma * resid.squaredNorm();

    result.trace.rel_chg.push_back(rel);
    result.trace.ier.push_back(ier);
    result.trace.objective.push_back(objective);

    m = std::move(m_next);
    a = std::move(step.a);
    b = std::move(step.b);
    dual = std::move(step.dual);
    result.iterations = k + 1;
    if (observer) observer(k + 1, m, a, b);

    if (rel < params.eps_rel && ier < params.eps_feas) {
      result.converged = true;
      break;
    }
  }
  result.m = SymMatrix(m);
  result.a = SymMatrix(a);
  result.b = SymMatrix(b);
  return result;
}

}  // namespace golazo
