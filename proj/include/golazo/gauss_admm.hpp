#pragma once

// Multi-block ADMM for the latent Gaussian problem
//   min -loglik(M; S) + ||A||_LU + lambda tr(B)  s.t.  M = A - B, M > 0, B >= 0.

#include "golazo/admm_params.hpp"
#include "golazo/penalty.hpp"

namespace golazo {

/// log det K - tr(K S). Throws Errc::not_positive_definite unless K > 0.
double gaussian_loglik(const SymMatrix& k, const SymMatrix& s);

/// Closed-form M step: solves (rho+1) sigma M^2 + V M - I = 0 with
/// V = S + sigma (B - A) - Lambda - rho sigma M_prev.
SymMatrix m_update(const SymMatrix& s, const SymMatrix& a, const SymMatrix& b,
                   const SymMatrix& dual, const SymMatrix& m_prev, const AdmmParams& params);

/// PSD projection of B + (Lambda_half - lambda I) / (tau r2).
SymMatrix b_update(const SymMatrix& b, const SymMatrix& dual_half, const AdmmParams& params);

/// Objective -loglik(A - B; S) + ||A||_LU + lambda tr(B); +inf outside the domain.
double latent_gaussian_objective(const SymMatrix& s, const SymMatrix& a, const SymMatrix& b,
                                 const GolazoBounds& bounds, double lambda);

AdmmResult solve_latent_gaussian(const SymMatrix& s, const GolazoBounds& bounds,
                                 const AdmmParams& params,
                                 const IterationObserver& observer = {});

}  // namespace golazo
