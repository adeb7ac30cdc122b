#pragma once

// Generators for the latent simulation designs and Gaussian sampling helpers.

#include "golazo/extremes.hpp"
#include "golazo/penalty.hpp"

#include <cstdint>
#include <optional>
#include <random>
#include <vector>

namespace golazo {

enum class ModelFamily { gaussian, huesler_reiss };

struct LatentModel {
  ModelFamily family = ModelFamily::gaussian;
  /// Precision K (Gaussian) or signed Laplacian Theta (HR) on observed + hidden.
  SymMatrix full;
  std::vector<Index> observed;
  std::vector<Index> hidden;
  /// full restricted to the observed block.
  SymMatrix a_true;
  /// Schur subtrahend full_OH (full_HH)^{-1} full_HO.
  SymMatrix b_true;
  std::vector<Edge> edges_true;
  /// Marginal variogram of the observed block (HR only).
  std::optional<VariogramMatrix> gamma_oo;
};

/// Two disjoint cycles of `p_per_cycle` observed nodes plus one hidden node
/// (last index) coupled to every observed node.
LatentModel two_cycle_gaussian(Index p_per_cycle, double k_diag = 5.0, double k_edge = -2.0,
                               std::optional<double> k_hidden = std::nullopt);

/// Observed cycle with edge weight 2; observed node i is attached to hidden
/// node i mod h with weight drawn uniformly from [50, 75] / sqrt(p / h).
LatentModel latent_cycle_hr(Index p, Index h, std::mt19937_64& rng);

/// Weighted-graph signed Laplacian: Theta_ij = -w_ij, Theta_ii = sum_j w_ij.
SymMatrix graph_laplacian(const Eigen::MatrixXd& weights);

/// n i.i.d. draws from N(0, K^{-1}).
SampleBlock sample_gaussian(const SymMatrix& k, Index n, std::mt19937_64& rng);

/// (1/n) X_O^T X_O; no mean subtraction.
SymMatrix observed_cov(const SampleBlock& x, std::span<const Index> observed);
SymMatrix observed_cov(const SampleBlock& x);

/// Derives an independent stream seed for trial `stream` from a base seed.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) noexcept;

}  // namespace golazo
