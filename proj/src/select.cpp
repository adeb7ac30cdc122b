#include "golazo/select.hpp"

#include "golazo/error.hpp"
#include "golazo/gauss_admm.hpp"
#include "golazo/lap_admm.hpp"
#include "golazo/simgen.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <optional>
#include <random>

namespace golazo {

namespace {

struct PreparedSplit {
  int fold = 0;
  std::optional<FoldStatistic> train;
  std::optional<FoldStatistic> validation;
  std::string error;
};

PreparedSplit prepare_split(const SampleBlock& train, const SampleBlock& validation, int fold,
                            const CvOptions& options) {
  PreparedSplit split;
  split.fold = fold;
  try {
    split.train = fold_statistic(train, options.mode, options.variogram);
    split.validation = fold_statistic(validation, options.mode, options.variogram);
  } catch (const Error& e) {
    split.train.reset();
    split.validation.reset();
    split.error = std::string(to_string(e.code())) + ": " + e.what();
  }
  return split;
}

double validation_score(FitMode mode, const SymMatrix& primal, const SymMatrix& a,
                        const SymMatrix& b, const FoldStatistic& val) {
  switch (mode) {
    case FitMode::gaussian: return gaussian_loglik(a - b, val.solver_input);
    case FitMode::lcggm: return lcggm_loglik(primal, val.solver_input);
    case FitMode::hr: return surrogate_loglik(primal, *val.variogram);
  }
  return NAN;
}

CvCell run_cell(const PreparedSplit& split, const PenaltySpec& spec, double lambda,
                const CvOptions& options) {
  CvCell cell;
  cell.spec = spec.label();
  cell.lambda = lambda;
  cell.fold = split.fold;
  if (!split.train) {
    cell.status = split.error;
    return cell;
  }
  try {
    const SymMatrix& input = split.train->solver_input;
    const GolazoBounds bounds = compile_penalty(spec, input.dim(), lambda, options.grid.gamma);
    AdmmParams params = options.params;
    params.lambda = lambda;

    SymMatrix primal, a, b;
    if (options.mode == FitMode::gaussian) {
      AdmmResult fit = solve_latent_gaussian(input, bounds, params);
      cell.iterations = fit.iterations;
      cell.converged = fit.converged;
      cell.objective = latent_gaussian_objective(input, fit.a, fit.b, bounds, lambda);
      primal = std::move(fit.m);
      a = std::move(fit.a);
      b = std::move(fit.b);
    } else {
      LaplacianResult fit = solve_latent_laplacian(input, bounds, params);
      cell.iterations = fit.iterations;
      cell.converged = fit.converged;
      cell.objective = latent_laplacian_objective(input, fit.theta, fit.a, fit.b, bounds, lambda);
      primal = std::move(fit.theta);
      a = std::move(fit.a);
      b = std::move(fit.b);
    }
    cell.edges = count_edges(a, options.edge_tol);
    cell.rank = estimate_rank(b, options.rank_tol);
    cell.status = cell.converged ? "converged" : "max-iterations";
    cell.score = validation_score(options.mode, primal, a, b, *split.validation);
    cell.valid = std::isfinite(cell.score);
    if (!cell.valid) cell.status = "score-undefined";
  } catch (const Error& e) {
    cell.valid = false;
    cell.status = e.code() == Errc::divergence ? std::string("diverged")
                                               : std::string(to_string(e.code())) + ": " + e.what();
  }
  return cell;
}

std::vector<CvCell> run_cells(const std::vector<PreparedSplit>& splits, const CvOptions& options,
                              Exec exec) {
  const std::vector<double> grid = lambda_grid(options.grid);
  const std::size_t per_split = options.specs.size() * grid.size();
  const std::size_t total = splits.size() * per_split;
  std::vector<CvCell> cells(total);

  auto body = [&](std::size_t idx) {
    const std::size_t s = idx / per_split;
    const std::size_t rest = idx % per_split;
    const std::size_t spec = rest / grid.size();
    const std::size_t l = rest % grid.size();
    cells[idx] = run_cell(splits[s], options.specs[spec], grid[l], options);
  };

  if (exec == Exec::parallel) {
    const auto n = static_cast<std::int64_t>(total);
#pragma omp parallel for schedule(dynamic)
    for (std::int64_t idx = 0; idx < n; ++idx) body(static_cast<std::size_t>(idx));
  } else {
    for (std::size_t idx = 0; idx < total; ++idx) body(idx);
  }
  return cells;
}

void check_options(const CvOptions& options) {
  options.grid.validate();
  options.params.validate();
  if (options.specs.empty()) throw Error(Errc::invalid_argument, "cross-validation needs a penalty spec");
}

}  // namespace

void GridSpec::validate() const {
  if (!(lambda_min > 0.0) || !(lambda_max > 0.0) || !std::isfinite(lambda_max)) {
    throw Error(Errc::invalid_argument, "grid: lambda bounds must be positive and finite");
  }
  if (lambda_min > lambda_max) throw Error(Errc::invalid_argument, "grid: lambda_min > lambda_max");
  if (count < 1) throw Error(Errc::invalid_argument, "grid: count must be >= 1");
  if (!(gamma >= 0.0)) throw Error(Errc::invalid_argument, "grid: gamma must be >= 0");
}

std::vector<double> lambda_grid(const GridSpec& spec) {
  spec.validate();
  std::vector<double> out(spec.count);
  if (spec.count == 1) {
    out[0] = std::max(spec.lambda_min, kLambdaFloor);
    return out;
  }
  const double steps = static_cast<double>(spec.count - 1);
  if (spec.scale == GridScale::log) {
    const double lo = std::log(spec.lambda_min);
    const double hi = std::log(spec.lambda_max);
    for (int i = 0; i < spec.count; ++i) out[i] = std::exp(lo + (hi - lo) * i / steps);
  } else {
    for (int i = 0; i < spec.count; ++i) {
      out[i] = spec.lambda_min + (spec.lambda_max - spec.lambda_min) * i / steps;
    }
  }
  out.front() = spec.lambda_min;
  out.back() = spec.lambda_max;
  for (double& v : out) v = std::max(v, kLambdaFloor);
  return out;
}

std::string_view to_string(FitMode mode) noexcept {
  switch (mode) {
    case FitMode::gaussian: return "gaussian";
    case FitMode::hr: return "hr";
    case FitMode::lcggm: return "lcggm";
  }
  return "unknown";
}

FitMode parse_fit_mode(std::string_view tag) {
  if (tag == "gaussian") return FitMode::gaussian;
  if (tag == "hr") return FitMode::hr;
  if (tag == "lcggm") return FitMode::lcggm;
  throw Error(Errc::config, "unknown mode '" + std::string(tag) + "'");
}

FoldStatistic fold_statistic(const SampleBlock& rows, FitMode mode, const VariogramOptions& vo,
                             Exec exec) {
  if (mode != FitMode::hr) return {observed_cov(rows), std::nullopt};
  VariogramMatrix gamma =
      vo.scale == VariogramScale::pareto
          ? empirical_variogram_pareto(rows, exec)
          : empirical_variogram(rows, exceedance_count(rows.rows(), vo.threshold), exec);
  SymMatrix input(-0.5 * gamma.matrix());
  return {std::move(input), std::move(gamma)};
}

std::vector<CvCell> evaluate_split(const SampleBlock& train, const SampleBlock& validation,
                                   int fold, const CvOptions& options, Exec exec) {
  check_options(options);
  return run_cells({prepare_split(train, validation, fold, options)}, options, exec);
}

CvReport kfold_cv(const SampleBlock& data, const CvOptions& options, Exec exec) {
  check_options(options);
  const Index n = data.rows();
  if (options.folds < 2) throw Error(Errc::invalid_argument, "kfold_cv: need at least 2 folds");
  if (n < options.folds) throw Error(Errc::invalid_argument, "kfold_cv: fewer rows than folds");

  std::vector<Index> order(n);
  std::iota(order.begin(), order.end(), Index{0});
  std::mt19937_64 rng(options.seed);
  std::shuffle(order.begin(), order.end(), rng);

  std::vector<PreparedSplit> splits(options.folds);
  auto prepare = [&](int f) {
    std::vector<Index> train, val;
    for (Index pos = 0; pos < n; ++pos) {
      (pos % options.folds == f ? val : train).push_back(order[pos]);
    }
    std::sort(train.begin(), train.end());
    std::sort(val.begin(), val.end());
    splits[f] = prepare_split(data.select_rows(train), data.select_rows(val), f, options);
  };
  if (exec == Exec::parallel) {
#pragma omp parallel for schedule(dynamic)
    for (int f = 0; f < options.folds; ++f) prepare(f);
  } else {
    for (int f = 0; f < options.folds; ++f) prepare(f);
  }
  return {run_cells(splits, options, exec)};
}

CvReport holdout_cv(const SampleBlock& train, const SampleBlock& validation,
                    const CvOptions& options, Exec exec) {
  return {evaluate_split(train, validation, 0, options, exec)};
}

std::vector<CvCurvePoint> CvReport::curve() const {
  std::vector<CvCurvePoint> out;
  std::map<std::pair<std::string, double>, std::size_t> index;
  for (const CvCell& c : cells) {
    const auto key = std::make_pair(c.spec, c.lambda);
    auto it = index.find(key);
    if (it == index.end()) {
      it = index.emplace(key, out.size()).first;
      out.push_back({c.spec, c.lambda, 0.0, 0.0, 0.0, 0, 0});
    }
    CvCurvePoint& p = out[it->second];
    ++p.total;
    if (c.valid && c.converged) {
      ++p.converged;
      p.mean_score += c.score;
      p.mean_edges += c.edges;
      p.mean_rank += c.rank;
    }
  }
  for (CvCurvePoint& p : out) {
    if (p.converged > 0) {
      p.mean_score /= p.converged;
      p.mean_edges /= p.converged;
      p.mean_rank /= p.converged;
    } else {
      p.mean_score = p.mean_edges = p.mean_rank = NAN;
    }
  }
  return out;
}

int count_edges(const SymMatrix& a, double tol) {
  const Eigen::MatrixXd& m = a.matrix();
  const double cutoff = tol * std::max(1.0, m.cwiseAbs().maxCoeff());
  int edges = 0;
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = i + 1; j < m.cols(); ++j) {
      if (std::abs(m(i, j)) > cutoff) ++edges;
    }
  }
  return edges;
}

int estimate_rank(const SymMatrix& b, double tol) {
  const EigenPair eig = sym_eig(b, "rank estimate");
  const double spectral = eig.values.cwiseAbs().maxCoeff();
  const double cutoff = tol * std::max(1.0, spectral);
  return static_cast<int>((eig.values.array() > cutoff).count());
}

}  // namespace golazo
