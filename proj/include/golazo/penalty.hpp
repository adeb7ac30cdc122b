#pragma once

// Golazo penalty ||K||_LU = sum_ij max{L_ij K_ij, U_ij K_ij} with L <= 0 <= U.
// Bounds may be infinite; 0 * inf is taken to be 0.

#include "golazo/matcore.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace golazo {

struct GolazoBounds {
  Eigen::MatrixXd lower;
  Eigen::MatrixXd upper;

  Index dim() const noexcept { return lower.rows(); }

  static GolazoBounds zeros(Index dim);

  /// Throws Errc::invalid_argument unless L <= 0 <= U, both symmetric and square.
  void validate() const;
};

enum class PenaltyKind {
  lasso,
  asymmetric,
  positive_lasso,
  mtp2,
  sparse_positive,
  zero_pattern,
  custom,
};

std::string_view to_string(PenaltyKind kind) noexcept;
PenaltyKind parse_penalty_kind(std::string_view tag);

using Edge = std::pair<Index, Index>;

struct PenaltySpec {
  PenaltyKind kind = PenaltyKind::lasso;
  /// Kind the zero pattern is layered over (zero_pattern only).
  PenaltyKind base = PenaltyKind::lasso;
  std::vector<Edge> zero_edges;
  /// Nonnegative d x d weights (asymmetric only).
  std::optional<Eigen::MatrixXd> weights;
  /// Bounds used verbatim by the custom kind.
  std::optional<GolazoBounds> custom;
  /// Apply the kind's off-diagonal bounds to the diagonal as well.
  bool penalize_diagonal = false;
  /// Label used in reports; defaults to the kind tag.
  std::string name;

  std::string label() const;
};

/// Every pair (i, j), i < j, with i and j in different groups.
std::vector<Edge> crossing_edges(const std::vector<std::vector<Index>>& groups);

double golazo_value(const SymMatrix& k, const GolazoBounds& b);
double golazo_value(const Eigen::MatrixXd& k, const GolazoBounds& b);

/// argmin_x t * max{l x, u x} + (x - z)^2 / 2.
inline double golazo_prox_scalar(double z, double l, double u, double t) {
  const double neg = std::isinf(l) ? 0.0 : std::min(z - t * l, 0.0);
  const double pos = std::isinf(u) ? 0.0 : std::max(z - t * u, 0.0);
  return neg + pos;
}

SymMatrix golazo_prox(const SymMatrix& z, const GolazoBounds& b, double t);
/// In-place entrywise variant used inside the solvers.
void golazo_prox_inplace(Eigen::MatrixXd& z, const GolazoBounds& b, double t);

GolazoBounds compile_penalty(const PenaltySpec& spec, Index dim, double lambda, double gamma);

}  // namespace golazo
