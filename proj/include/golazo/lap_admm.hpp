#pragma once

// Laplacian-constrained variant of the latent ADMM. The primal block is
// Theta = P Xi P^T with P an orthonormal basis of the complement of 1, so every
// iterate is an exact signed Laplacian. Input S is a covariance (LCGGM) or
// -Gamma/2 for a Huesler-Reiss variogram Gamma.

#include "golazo/admm_params.hpp"
#include "golazo/penalty.hpp"

namespace golazo {

class VariogramMatrix;

struct LaplacianResult {
  SymMatrix theta;
  SymMatrix a;
  SymMatrix b;
  SymMatrix xi;
  int iterations = 0;
  SolverTrace trace;
  bool converged = false;

  double final_rel_chg() const { return trace.rel_chg.empty() ? 0.0 : trace.rel_chg.back(); }
  double final_ier() const { return trace.ier.empty() ? 0.0 : trace.ier.back(); }
};

struct XiStep {
  SymMatrix xi;
  SymMatrix theta;
};

XiStep xi_update(const SymMatrix& s_in, const SymMatrix& a, const SymMatrix& b,
                 const SymMatrix& dual, const SymMatrix& xi_prev, const ProjectionBasis& basis,
                 const AdmmParams& params);

LaplacianResult solve_latent_laplacian(const SymMatrix& s_in, const GolazoBounds& bounds,
                                       const AdmmParams& params, const ProjectionBasis& basis,
                                       const IterationObserver& observer = {});

/// Convenience overload using the Helmert basis.
LaplacianResult solve_latent_laplacian(const SymMatrix& s_in, const GolazoBounds& bounds,
                                       const AdmmParams& params);

/// log Det(Theta) - tr(Theta S): LCGGM log-likelihood of a mean-zero sample
/// with second-moment matrix S.
double lcggm_loglik(const SymMatrix& theta, const SymMatrix& s);

/// Huesler-Reiss surrogate log-likelihood log Det(Theta) + tr(Theta Gamma) / 2.
double surrogate_loglik(const SymMatrix& theta, const VariogramMatrix& gamma);

/// Objective -log Det(Theta) + tr(Theta S) + ||A||_LU + lambda tr(B), evaluated at
/// the Laplacian `theta` and the split (A, B).
double latent_laplacian_objective(const SymMatrix& s_in, const SymMatrix& theta,
                                  const SymMatrix& a, const SymMatrix& b,
                                  const GolazoBounds& bounds, double lambda);

}  // namespace golazo
