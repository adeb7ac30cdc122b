#include "barrier_oracle.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace oracle {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

struct SymIndex {
  int i, j;
};

std::vector<SymIndex> sym_coords(int n) {
  std::vector<SymIndex> out;
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) out.push_back({i, j});
  }
  return out;
}

MatrixXd unit(int n, SymIndex k) {
  MatrixXd e = MatrixXd::Zero(n, n);
  e(k.i, k.j) = 1.0;
  e(k.j, k.i) = 1.0;
  return e;
}

MatrixXd unpack(const VectorXd& x, int offset, const std::vector<SymIndex>& coords, int n) {
  MatrixXd m(n, n);
  for (std::size_t k = 0; k < coords.size(); ++k) {
    m(coords[k].i, coords[k].j) = x(offset + static_cast<int>(k));
    m(coords[k].j, coords[k].i) = x(offset + static_cast<int>(k));
  }
  return m;
}

// tr(X E_k) for the symmetric unit E_k.
double trace_with_unit(const MatrixXd& x, SymIndex k) {
  return k.i == k.j ? x(k.i, k.i) : x(k.i, k.j) + x(k.j, k.i);
}

// Gradient and Hessian of -log det X over symmetric coordinates, or false when
// X is not positive definite.
bool neg_logdet(const MatrixXd& x, const std::vector<SymIndex>& coords, double& value,
                VectorXd& grad, MatrixXd& hess) {
  Eigen::LLT<MatrixXd> llt(x);
  if (llt.info() != Eigen::Success) return false;
  const MatrixXd l = llt.matrixL();
  if (!(l.diagonal().array() > 0.0).all()) return false;
  value = -2.0 * l.diagonal().array().log().sum();
  const int n = static_cast<int>(x.rows());
  const MatrixXd w = llt.solve(MatrixXd::Identity(n, n));
  const int nk = static_cast<int>(coords.size());
  grad.resize(nk);
  hess.resize(nk, nk);
  std::vector<MatrixXd> wew(nk);
  for (int k = 0; k < nk; ++k) {
    grad(k) = -trace_with_unit(w, coords[k]);
    wew[k] = w * unit(n, coords[k]) * w;
  }
  for (int k = 0; k < nk; ++k) {
    for (int l = 0; l < nk; ++l) hess(k, l) = trace_with_unit(wew[k], coords[l]);
  }
  return true;
}

struct LinearConstraint {
  VectorXd g;  // constraint value is g . x >= 0
};

struct Layout {
  int d = 0, q = 0;
  MatrixXd basis;  // d x q
  std::vector<SymIndex> core_coords, b_coords;
  int nc = 0, nb = 0, ns = 0;
  int size() const { return nc + nb + ns; }
  VectorXd cost;  // linear part of the objective
  std::vector<LinearConstraint> cons;
  // Gradient of A_ij with respect to (core, B) coordinates, zero-padded.
  VectorXd entry_gradient(int i, int j) const {
    VectorXd g = VectorXd::Zero(size());
    for (int k = 0; k < nc; ++k) {
      const MatrixXd e = basis * unit(q, core_coords[k]) * basis.transpose();
      g(k) = e(i, j);
    }
    for (int k = 0; k < nb; ++k) {
      const SymIndex c = b_coords[k];
      if ((c.i == i && c.j == j) || (c.i == j && c.j == i)) g(nc + k) = 1.0;
    }
    return g;
  }
};

MatrixXd ones_complement(int d) {
  MatrixXd ones = MatrixXd::Zero(d, d);
  ones.col(0).setOnes();
  for (int k = 1; k < d; ++k) ones(k, k) = 1.0;
  Eigen::HouseholderQR<MatrixXd> qr(ones);
  const MatrixXd q = qr.householderQ() * MatrixXd::Identity(d, d);
  return q.rightCols(d - 1);
}

Layout build(const Problem& p) {
  Layout lay;
  lay.d = static_cast<int>(p.s.rows());
  if (p.laplacian) {
    lay.basis = ones_complement(lay.d);
  } else {
    lay.basis = MatrixXd::Identity(lay.d, lay.d);
  }
  lay.q = static_cast<int>(lay.basis.cols());
  lay.core_coords = sym_coords(lay.q);
  lay.b_coords = sym_coords(lay.d);
  lay.nc = static_cast<int>(lay.core_coords.size());
  lay.nb = static_cast<int>(lay.b_coords.size());

  struct Pending {
    int i, j;
    double l, u, w;
  };
  std::vector<Pending> epi;
  std::vector<std::pair<VectorXd, double>> linear_terms;  // objective += coef * A_ij
  std::vector<std::pair<int, int>> nonpos, nonneg;
  for (int i = 0; i < lay.d; ++i) {
    for (int j = i; j < lay.d; ++j) {
      const double l = p.lower(i, j), u = p.upper(i, j), w = i == j ? 1.0 : 2.0;
      if (std::isinf(l) && std::isinf(u)) throw std::invalid_argument("oracle: free-zero entries unsupported");
      if (l == 0.0 && u == 0.0) continue;
      if (std::isinf(u)) {
        nonpos.emplace_back(i, j);
        if (l != 0.0) linear_terms.emplace_back(VectorXd::Constant(1, i * lay.d + j), w * l);
      } else if (std::isinf(l)) {
        nonneg.emplace_back(i, j);
        if (u != 0.0) linear_terms.emplace_back(VectorXd::Constant(1, i * lay.d + j), w * u);
      } else {
        epi.push_back({i, j, l, u, w});
      }
    }
  }
  lay.ns = static_cast<int>(epi.size());
  const int n = lay.size();

  lay.cost = VectorXd::Zero(n);
  const MatrixXd qsq = lay.basis.transpose() * p.s * lay.basis;
  for (int k = 0; k < lay.nc; ++k) lay.cost(k) = trace_with_unit(qsq, lay.core_coords[k]);
  for (int k = 0; k < lay.nb; ++k) {
    if (lay.b_coords[k].i == lay.b_coords[k].j) lay.cost(lay.nc + k) += p.lambda;
  }
  for (const auto& [code, coef] : linear_terms) {
    const int flat = static_cast<int>(code(0));
    lay.cost += coef * lay.entry_gradient(flat / lay.d, flat % lay.d);
  }
  for (int e = 0; e < lay.ns; ++e) {
    lay.cost(lay.nc + lay.nb + e) = epi[e].w;
    const VectorXd ga = lay.entry_gradient(epi[e].i, epi[e].j);
    for (double bound : {epi[e].l, epi[e].u}) {
      VectorXd g = -bound * ga;
      g(lay.nc + lay.nb + e) = 1.0;
      lay.cons.push_back({g});
    }
  }
  for (auto [i, j] : nonpos) lay.cons.push_back({-lay.entry_gradient(i, j)});
  for (auto [i, j] : nonneg) lay.cons.push_back({lay.entry_gradient(i, j)});
  return lay;
}

struct Eval {
  bool feasible = false;
  double value = 0.0;
  VectorXd grad;
  MatrixXd hess;
};

Eval evaluate(const Layout& lay, const VectorXd& x, double t, bool derivatives) {
  Eval ev;
  const int n = lay.size();
  const MatrixXd core = unpack(x, 0, lay.core_coords, lay.q);
  const MatrixXd b = unpack(x, lay.nc, lay.b_coords, lay.d);
  double vc = 0.0, vb = 0.0;
  VectorXd gc, gb;
  MatrixXd hc, hb;
  if (!neg_logdet(core, lay.core_coords, vc, gc, hc)) return ev;
  if (!neg_logdet(b, lay.b_coords, vb, gb, hb)) return ev;
  std::vector<double> slack(lay.cons.size());
  for (std::size_t c = 0; c < lay.cons.size(); ++c) {
    slack[c] = lay.cons[c].g.dot(x);
    if (!(slack[c] > 0.0)) return ev;
  }
  ev.feasible = true;
  ev.value = t * (lay.cost.dot(x) + vc) + vb;
  for (double s : slack) ev.value -= std::log(s);
  if (!derivatives) return ev;

  ev.grad = t * lay.cost;
  ev.hess = MatrixXd::Zero(n, n);
  ev.grad.head(lay.nc) += t * gc;
  ev.hess.topLeftCorner(lay.nc, lay.nc) += t * hc;
  ev.grad.segment(lay.nc, lay.nb) += gb;
  ev.hess.block(lay.nc, lay.nc, lay.nb, lay.nb) += hb;
  for (std::size_t c = 0; c < lay.cons.size(); ++c) {
    const VectorXd& g = lay.cons[c].g;
    ev.grad -= g / slack[c];
    ev.hess += g * g.transpose() / (slack[c] * slack[c]);
  }
  return ev;
}

VectorXd start_point(const Problem& p, const Layout& lay) {
  VectorXd x = VectorXd::Zero(lay.size());
  for (int k = 0; k < lay.nc; ++k) {
    if (lay.core_coords[k].i == lay.core_coords[k].j) x(k) = 1.0;
  }
  // B = (d + 1) I plus a +-1 pattern that makes every sign constraint strict.
  for (int k = 0; k < lay.nb; ++k) {
    const SymIndex c = lay.b_coords[k];
    if (c.i == c.j) {
      x(lay.nc + k) = lay.d + 1.0;
    } else if (std::isinf(p.upper(c.i, c.j))) {
      x(lay.nc + k) = -1.0;
    } else if (std::isinf(p.lower(c.i, c.j))) {
      x(lay.nc + k) = 1.0;
    }
  }
  // Epigraph variables start one unit above max(L a, U a).
  for (int e = 0; e < lay.ns; ++e) {
    const int col = lay.nc + lay.nb + e;
    double need = 0.0;
    for (std::size_t c = 0; c < lay.cons.size(); ++c) {
      if (lay.cons[c].g(col) != 1.0) continue;
      VectorXd g = lay.cons[c].g;
      g(col) = 0.0;
      need = std::max(need, -g.dot(x));
    }
    x(col) = need + 1.0;
  }
  return x;
}

}  // namespace

Solution solve(const Problem& p, double gap_tol) {
  const Layout lay = build(p);
  VectorXd x = start_point(p, lay);
  const double m = lay.d + static_cast<double>(lay.cons.size());
  double t = 1.0;
  int steps = 0;
  while (true) {
    for (int it = 0; it < 500; ++it) {
      const Eval ev = evaluate(lay, x, t, true);
      if (!ev.feasible) throw std::runtime_error("oracle: lost feasibility");
      const VectorXd dx = ev.hess.ldlt().solve(-ev.grad);
      const double dec = -ev.grad.dot(dx);
      ++steps;
      if (dec / 2.0 < 1e-12) break;
      double step = 1.0;
      while (step > 1e-20) {
        const Eval trial = evaluate(lay, x + step * dx, t, false);
        if (trial.feasible && trial.value <= ev.value - 0.25 * step * dec) break;
        step *= 0.5;
      }
      if (step <= 1e-20) break;
      x += step * dx;
    }
    if (m / t < gap_tol) break;
    t *= 8.0;
  }

  Solution sol;
  sol.core = unpack(x, 0, lay.core_coords, lay.q);
  sol.b = unpack(x, lay.nc, lay.b_coords, lay.d);
  sol.primal = lay.basis * sol.core * lay.basis.transpose();
  sol.a = sol.primal + sol.b;
  sol.objective = objective(p, sol.primal, sol.a, sol.b);
  sol.gap = m / t;
  sol.newton_steps = steps;
  return sol;
}

double objective(const Problem& p, const MatrixXd& primal, const MatrixXd& a, const MatrixXd& b) {
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(0.5 * (primal + primal.transpose()));
  Eigen::VectorXd ev = es.eigenvalues();
  double logdet = 0.0;
  // The Laplacian primal has exactly one null direction; it is the smallest.
  for (Eigen::Index k = p.laplacian ? 1 : 0; k < ev.size(); ++k) {
    if (!(ev(k) > 0.0)) return std::numeric_limits<double>::infinity();
    logdet += std::log(ev(k));
  }
  double pen = 0.0;
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      const double v = a(i, j);
      if (v > 0.0) pen += std::isinf(p.upper(i, j)) ? std::numeric_limits<double>::infinity() : p.upper(i, j) * v;
      if (v < 0.0) pen += std::isinf(p.lower(i, j)) ? std::numeric_limits<double>::infinity() : p.lower(i, j) * v;
    }
  }
  return -logdet + (primal * p.s).trace() + pen + p.lambda * b.trace();
}

}  // namespace oracle
