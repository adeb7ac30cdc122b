#include "golazo/penalty.hpp"

#include "golazo/error.hpp"

#include <limits>
#include <string>

namespace golazo {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct PairBounds {
  double lower;
  double upper;
};

PairBounds base_bounds(PenaltyKind kind, double scale) {
  switch (kind) {
    case PenaltyKind::lasso: return {-scale, scale};
    case PenaltyKind::positive_lasso: return {0.0, scale};
    case PenaltyKind::mtp2: return {0.0, kInf};
    case PenaltyKind::sparse_positive: return {-scale, kInf};
    default: break;
  }
  throw Error(Errc::invalid_argument,
              std::string("penalty kind '") + std::string(to_string(kind)) +
                  "' cannot be used as a uniform base");
}

void check_edges(const std::vector<Edge>& edges, Index dim) {
  for (const auto& [i, j] : edges) {
    if (i < 0 || j < 0 || i >= dim || j >= dim) {
      throw Error(Errc::invalid_argument, "zero edge (" + std::to_string(i) + "," +
                                              std::to_string(j) + ") out of range for dimension " +
                                              std::to_string(dim));
    }
  }
}

}  // namespace

GolazoBounds GolazoBounds::zeros(Index dim) {
  return {Eigen::MatrixXd::Zero(dim, dim), Eigen::MatrixXd::Zero(dim, dim)};
}

void GolazoBounds::validate() const {
  if (lower.rows() != lower.cols() || upper.rows() != upper.cols() ||
      lower.rows() != upper.rows()) {
    throw Error(Errc::invalid_dimension, "GolazoBounds: L and U must be square of equal size");
  }
  for (Index i = 0; i < lower.rows(); ++i) {
    for (Index j = 0; j < lower.cols(); ++j) {
      const double l = lower(i, j);
      const double u = upper(i, j);
      if (std::isnan(l) || std::isnan(u) || l > 0.0 || u < 0.0) {
        throw Error(Errc::invalid_argument, "GolazoBounds: need L <= 0 <= U at (" +
                                                std::to_string(i) + "," + std::to_string(j) + ")");
      }
      if (l != lower(j, i) || u != upper(j, i)) {
        throw Error(Errc::invalid_argument, "GolazoBounds: L and U must be symmetric");
      }
    }
  }
}

std::string_view to_string(PenaltyKind kind) noexcept {
  switch (kind) {
    case PenaltyKind::lasso: return "lasso";
    case PenaltyKind::asymmetric: return "asymmetric";
    case PenaltyKind::positive_lasso: return "positive_lasso";
    case PenaltyKind::mtp2: return "mtp2";
    case PenaltyKind::sparse_positive: return "sparse_positive";
    case PenaltyKind::zero_pattern: return "zero_pattern";
    case PenaltyKind::custom: return "custom";
  }
  return "unknown";
}

PenaltyKind parse_penalty_kind(std::string_view tag) {
  for (PenaltyKind k : {PenaltyKind::lasso, PenaltyKind::asymmetric, PenaltyKind::positive_lasso,
                        PenaltyKind::mtp2, PenaltyKind::sparse_positive, PenaltyKind::zero_pattern,
                        PenaltyKind::custom}) {
    if (tag == to_string(k)) return k;
  }
  // Aliases used by the extremal presets.
  if (tag == "emtp2") return PenaltyKind::mtp2;
  if (tag == "lasso_emtp2") return PenaltyKind::sparse_positive;
  throw Error(Errc::config, "unknown penalty kind '" + std::string(tag) + "'");
}

std::string PenaltySpec::label() const {
  if (!name.empty()) return name;
  if (kind == PenaltyKind::zero_pattern) return "zero_pattern:" + std::string(to_string(base));
  return std::string(to_string(kind));
}

std::vector<Edge> crossing_edges(const std::vector<std::vector<Index>>& groups) {
  std::vector<Edge> out;
  for (std::size_t g = 0; g < groups.size(); ++g) {
    for (std::size_t h = g + 1; h < groups.size(); ++h) {
      for (Index i : groups[g]) {
        for (Index j : groups[h]) out.emplace_back(std::min(i, j), std::max(i, j));
      }
    }
  }
  return out;
}

double golazo_value(const Eigen::MatrixXd& k, const GolazoBounds& b) {
  if (k.rows() != b.dim() || k.cols() != b.dim()) {
    throw Error(Errc::invalid_dimension, "golazo_value: dimension mismatch");
  }
  double total = 0.0;
  for (Index j = 0; j < k.cols(); ++j) {
    for (Index i = 0; i < k.rows(); ++i) {
      const double x = k(i, j);
      if (x > 0.0) {
        total += b.upper(i, j) * x;
      } else if (x < 0.0) {
        total += b.lower(i, j) * x;
      }
    }
  }
  return total;
}

double golazo_value(const SymMatrix& k, const GolazoBounds& b) { return golazo_value(k.matrix(), b); }

void golazo_prox_inplace(Eigen::MatrixXd& z, const GolazoBounds& b, double t) {
  if (!(t > 0.0) || !std::isfinite(t)) {
    throw Error(Errc::invalid_step, "golazo_prox: step must be positive and finite, got " +
                                        std::to_string(t));
  }
  if (z.rows() != b.dim() || z.cols() != b.dim()) {
    throw Error(Errc::invalid_dimension, "golazo_prox: dimension mismatch");
  }
  for (Index j = 0; j < z.cols(); ++j) {
    for (Index i = 0; i < z.rows(); ++i) {
      z(i, j) = golazo_prox_scalar(z(i, j), b.lower(i, j), b.upper(i, j), t);
    }
  }
}

SymMatrix golazo_prox(const SymMatrix& z, const GolazoBounds& b, double t) {
  Eigen::MatrixXd out = z.matrix();
  golazo_prox_inplace(out, b, t);
  return SymMatrix(out);
}

GolazoBounds compile_penalty(const PenaltySpec& spec, Index dim, double lambda, double gamma) {
  if (dim < 1) throw Error(Errc::invalid_dimension, "compile_penalty: dimension must be >= 1");
  if (!(lambda >= 0.0) || !(gamma >= 0.0)) {
    throw Error(Errc::invalid_argument, "compile_penalty: lambda and gamma must be nonnegative");
  }
  const bool edges_allowed =
      spec.kind == PenaltyKind::zero_pattern || spec.kind == PenaltyKind::custom;
  if (!spec.zero_edges.empty() && !edges_allowed) {
    throw Error(Errc::invalid_argument, "zero_edges are only valid with zero_pattern or custom");
  }
  if (spec.weights && spec.kind != PenaltyKind::asymmetric) {
    throw Error(Errc::invalid_argument, "weights are only valid with the asymmetric kind");
  }
  check_edges(spec.zero_edges, dim);

  const double scale = lambda * gamma;
  GolazoBounds out = GolazoBounds::zeros(dim);
  auto fill_uniform = [&](PairBounds pb) {
    for (Index i = 0; i < dim; ++i) {
      for (Index j = 0; j < dim; ++j) {
        if (i == j && !spec.penalize_diagonal) continue;
        out.lower(i, j) = pb.lower;
        out.upper(i, j) = pb.upper;
      }
    }
  };

  switch (spec.kind) {
    case PenaltyKind::asymmetric: {
      if (!spec.weights) throw Error(Errc::invalid_argument, "asymmetric penalty requires weights");
      const Eigen::MatrixXd& w = *spec.weights;
      if (w.rows() != dim || w.cols() != dim) {
        throw Error(Errc::invalid_dimension, "asymmetric penalty: weights must be d x d");
      }
      if (!w.allFinite() || (w.array() < 0.0).any()) {
        throw Error(Errc::invalid_argument, "asymmetric penalty: weights must be finite and >= 0");
      }
      for (Index i = 0; i < dim; ++i) {
        for (Index j = 0; j < dim; ++j) {
          if (i == j && !spec.penalize_diagonal) continue;
          const double wij = 0.5 * (w(i, j) + w(j, i));
          out.lower(i, j) = -scale * wij;
          out.upper(i, j) = scale * wij;
        }
      }
      break;
    }
    case PenaltyKind::zero_pattern:
      if (spec.base == PenaltyKind::zero_pattern || spec.base == PenaltyKind::custom ||
          spec.base == PenaltyKind::asymmetric) {
        throw Error(Errc::invalid_argument, "zero_pattern base must be a uniform kind");
      }
      fill_uniform(base_bounds(spec.base, scale));
      break;
    case PenaltyKind::custom:
      if (!spec.custom) throw Error(Errc::invalid_argument, "custom penalty requires bounds");
      if (spec.custom->dim() != dim) {
        throw Error(Errc::invalid_dimension, "custom penalty: bounds dimension mismatch");
      }
      out = *spec.custom;
      break;
    default:
      fill_uniform(base_bounds(spec.kind, scale));
      break;
  }

  for (const auto& [i, j] : spec.zero_edges) {
    out.lower(i, j) = out.lower(j, i) = -kInf;
    out.upper(i, j) = out.upper(j, i) = kInf;
  }
  out.validate();
  return out;
}

}  // namespace golazo
