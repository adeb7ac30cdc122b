#pragma once

// Model selection: lambda grids, cross-validation over (penalty, lambda, fold)
// cells, and structure diagnostics.

#include "golazo/admm_params.hpp"
#include "golazo/extremes.hpp"
#include "golazo/parallel.hpp"
#include "golazo/penalty.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace golazo {

enum class GridScale { log, linear };

struct GridSpec {
  double lambda_min = 1e-8;
  double lambda_max = 1.0;
  int count = 50;
  GridScale scale = GridScale::log;
  double gamma = 0.5;

  void validate() const;
};

inline constexpr double kLambdaFloor = 1e-10;

std::vector<double> lambda_grid(const GridSpec& spec);

enum class FitMode { gaussian, hr, lcggm };

std::string_view to_string(FitMode mode) noexcept;
FitMode parse_fit_mode(std::string_view tag);

enum class VariogramScale { ranks, pareto };

/// How the HR summary statistic is computed from raw rows.
struct VariogramOptions {
  VariogramScale scale = VariogramScale::ranks;
  /// Quantile threshold a; k = ceil((1 - a) n) (rank scale only).
  double threshold = 0.95;
};

struct CvOptions {
  FitMode mode = FitMode::gaussian;
  GridSpec grid;
  std::vector<PenaltySpec> specs;
  AdmmParams params;
  VariogramOptions variogram;
  int folds = 5;
  std::uint64_t seed = 0;
  double edge_tol = 1e-4;
  double rank_tol = 1e-6;
};

struct CvCell {
  std::string spec;
  double lambda = 0.0;
  int fold = 0;
  double score = 0.0;
  int edges = 0;
  int rank = 0;
  int iterations = 0;
  bool converged = false;
  /// False when the fit or its validation score could not be computed.
  bool valid = false;
  std::string status;
  double objective = 0.0;
};

struct CvCurvePoint {
  std::string spec;
  double lambda = 0.0;
  double mean_score = 0.0;
  double mean_edges = 0.0;
  double mean_rank = 0.0;
  int converged = 0;
  int total = 0;
};

struct CvReport {
  std::vector<CvCell> cells;

  /// Per (spec, lambda) means over valid converged cells, in grid order.
  std::vector<CvCurvePoint> curve() const;
};

/// Summary statistic handed to the solver for one block of rows.
struct FoldStatistic {
  SymMatrix solver_input;
  std::optional<VariogramMatrix> variogram;
};

FoldStatistic fold_statistic(const SampleBlock& rows, FitMode mode, const VariogramOptions& vo,
                             Exec exec = Exec::serial);

/// Fits on `train` and scores on `validation` for every (spec, lambda).
/// Cells are tagged with `fold`.
std::vector<CvCell> evaluate_split(const SampleBlock& train, const SampleBlock& validation,
                                   int fold, const CvOptions& options, Exec exec = Exec::parallel);

/// k-fold cross-validation with a seeded row shuffle.
CvReport kfold_cv(const SampleBlock& data, const CvOptions& options, Exec exec = Exec::parallel);

/// Single train/validation split (the two-sample protocol).
CvReport holdout_cv(const SampleBlock& train, const SampleBlock& validation,
                    const CvOptions& options, Exec exec = Exec::parallel);

/// #{i < j : |A_ij| > tol * max(1, max |A|)}.
int count_edges(const SymMatrix& a, double tol = 1e-4);
/// #{eigenvalues of B > tol * max(1, ||B||_2)}.
int estimate_rank(const SymMatrix& b, double tol = 1e-6);

}  // namespace golazo
