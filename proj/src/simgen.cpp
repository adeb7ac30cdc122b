#include "golazo/simgen.hpp"

#include "golazo/error.hpp"

#include <cmath>
#include <numeric>
#include <string>

namespace golazo {

namespace {

std::vector<Index> range(Index begin, Index end) {
  std::vector<Index> out(end - begin);
  std::iota(out.begin(), out.end(), begin);
  return out;
}

void fill_latent_blocks(LatentModel& model) {
  const Index no = static_cast<Index>(model.observed.size());
  const Index nh = static_cast<Index>(model.hidden.size());
  Eigen::MatrixXd k_oh(no, nh);
  for (Index a = 0; a < no; ++a) {
    for (Index b = 0; b < nh; ++b) k_oh(a, b) = model.full(model.observed[a], model.hidden[b]);
  }
  const Eigen::MatrixXd k_hh = model.full.block(model.hidden).matrix();
  model.a_true = model.full.block(model.observed);
  model.b_true = SymMatrix(k_oh * k_hh.llt().solve(k_oh.transpose()));
}

}  // namespace

LatentModel two_cycle_gaussian(Index p_per_cycle, double k_diag, double k_edge,
                               std::optional<double> k_hidden) {
  if (p_per_cycle < 3) {
    throw Error(Errc::invalid_argument, "two_cycle_gaussian: need at least 3 nodes per cycle");
  }
  const Index p = 2 * p_per_cycle;
  const Index d = p + 1;
  const double hidden_weight = k_hidden.value_or(5.0 / static_cast<double>(p));

  LatentModel model;
  model.family = ModelFamily::gaussian;
  Eigen::MatrixXd k = Eigen::MatrixXd::Zero(d, d);
  k.diagonal().setConstant(k_diag);
  for (Index cycle = 0; cycle < 2; ++cycle) {
    const Index offset = cycle * p_per_cycle;
    for (Index i = 0; i < p_per_cycle; ++i) {
      const Index u = offset + i;
      const Index v = offset + (i + 1) % p_per_cycle;
      k(u, v) = k(v, u) = k_edge;
      if (k_edge != 0.0) model.edges_true.emplace_back(std::min(u, v), std::max(u, v));
    }
  }
  for (Index i = 0; i < p; ++i) k(i, p) = k(p, i) = hidden_weight;

  const double min_eig = sym_eig(k, "two-cycle precision").values.minCoeff();
  if (!(min_eig > 0.0)) {
    throw Error(Errc::not_positive_definite,
                "two_cycle_gaussian: precision is not positive definite (min eigenvalue " +
                    std::to_string(min_eig) + ")");
  }
  model.full = SymMatrix(k);
  model.observed = range(0, p);
  model.hidden = {p};
  fill_latent_blocks(model);
  return model;
}

SymMatrix graph_laplacian(const Eigen::MatrixXd& weights) {
  if (weights.rows() != weights.cols()) {
    throw Error(Errc::invalid_dimension, "graph_laplacian: weights must be square");
  }
  Eigen::MatrixXd w = 0.5 * (weights + weights.transpose());
  w.diagonal().setZero();
  Eigen::MatrixXd theta = -w;
  theta.diagonal() = w.rowwise().sum();
  return SymMatrix(theta);
}

LatentModel latent_cycle_hr(Index p, Index h, std::mt19937_64& rng) {
  if (p < 3) throw Error(Errc::invalid_argument, "latent_cycle_hr: need p >= 3");
  if (h < 1 || h >= p) throw Error(Errc::invalid_argument, "latent_cycle_hr: need 1 <= h < p");

  const Index d = p + h;
  const double scale = std::sqrt(static_cast<double>(p) / static_cast<double>(h));
  std::uniform_real_distribution<double> hidden_weight(50.0 / scale, 75.0 / scale);

  LatentModel model;
  model.family = ModelFamily::huesler_reiss;
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(d, d);
  for (Index i = 0; i < p; ++i) {
    const Index j = (i + 1) % p;
    w(i, j) = w(j, i) = 2.0;
    model.edges_true.emplace_back(std::min(i, j), std::max(i, j));
  }
  for (Index i = 0; i < p; ++i) {
    const Index hid = p + i % h;
    w(i, hid) = w(hid, i) = hidden_weight(rng);
  }
  model.full = graph_laplacian(w);
  model.observed = range(0, p);
  model.hidden = range(p, d);
  fill_latent_blocks(model);
  model.gamma_oo = theta_to_gamma(model.full).block(model.observed);
  return model;
}

SampleBlock sample_gaussian(const SymMatrix& k, Index n, std::mt19937_64& rng) {
  if (n < 1) throw Error(Errc::invalid_argument, "sample_gaussian: need n >= 1");
  const Eigen::LLT<Eigen::MatrixXd> k_llt(k.matrix());
  if (k_llt.info() != Eigen::Success) {
    throw Error(Errc::not_positive_definite, "sample_gaussian: K is not positive definite");
  }
  const Index d = k.dim();
  const Eigen::MatrixXd cov = k_llt.solve(Eigen::MatrixXd::Identity(d, d));
  const Eigen::LLT<Eigen::MatrixXd> cov_llt(0.5 * (cov + cov.transpose()));
  if (cov_llt.info() != Eigen::Success) {
    throw Error(Errc::not_positive_definite, "sample_gaussian: covariance is not positive definite");
  }
  const Eigen::MatrixXd lower = cov_llt.matrixL();

  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::MatrixXd z(n, d);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < d; ++j) z(i, j) = normal(rng);
  }
  return SampleBlock(z * lower.transpose());
}

SymMatrix observed_cov(const SampleBlock& x, std::span<const Index> observed) {
  Eigen::MatrixXd xo(x.rows(), observed.size());
  for (std::size_t c = 0; c < observed.size(); ++c) {
    if (observed[c] < 0 || observed[c] >= x.cols()) {
      throw Error(Errc::invalid_argument, "observed_cov: column index out of range");
    }
    xo.col(c) = x.values.col(observed[c]);
  }
  return SymMatrix(xo.transpose() * xo / static_cast<double>(x.rows()));
}

SymMatrix observed_cov(const SampleBlock& x) {
  return SymMatrix(x.values.transpose() * x.values / static_cast<double>(x.rows()));
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) noexcept {
  // splitmix64 finalizer over a stream-offset state.
  std::uint64_t z = base + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace golazo
