#pragma once

// Command-line front end. Configuration is a flat set of `section.key` values
// resolved in three layers: built-in defaults, an optional INI file, then
// command-line flags. The resolved set is echoed into every manifest.

#include "golazo/admm_params.hpp"
#include "golazo/error.hpp"
#include "golazo/penalty.hpp"
#include "golazo/select.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace golazo::cli {

enum ExitCode : int { kOk = 0, kConfigError = 2, kDataError = 3, kDivergence = 4 };

int exit_code(Errc code) noexcept;

enum class InputKind { samples, covariance, variogram };
enum class CvProtocol { kfold, holdout, none };
enum class SimModel { two_cycle, latent_cycle_hr };

struct SimulateConfig {
  SimModel model = SimModel::two_cycle;
  /// Nodes per cycle (two_cycle) or observed nodes (latent_cycle_hr).
  Index p = 25;
  Index hidden = 1;
  /// Zero means the model default: 100 for two_cycle, 1000 for latent_cycle_hr.
  Index n = 0;
  Index n_validation = 0;
  double k_diag = 5.0;
  double k_edge = -2.0;
  /// Non-positive means the default 5 / (2 p).
  double k_hidden = 0.0;
};

struct RunConfig {
  FitMode mode = FitMode::gaussian;
  std::uint64_t seed = 0;
  std::filesystem::path output = "golazo-out";

  std::filesystem::path input;
  InputKind input_kind = InputKind::samples;
  std::filesystem::path validation;
  bool center = false;

  std::vector<PenaltyKind> penalties{PenaltyKind::lasso};
  PenaltyKind base = PenaltyKind::lasso;
  double gamma = 0.5;
  std::vector<Edge> zero_edges;
  std::vector<std::vector<Index>> zero_groups;
  std::filesystem::path weights;
  bool penalize_diagonal = false;
  Index dim = 0;

  double lambda = 0.1;
  GridSpec grid;
  AdmmParams admm;

  CvProtocol protocol = CvProtocol::kfold;
  int folds = 5;
  double edge_tol = 1e-4;
  double rank_tol = 1e-6;

  VariogramOptions variogram;
  SimulateConfig simulate;
};

using KeyValues = std::map<std::string, std::string>;

/// Every recognized key with its command-line flag and help text.
struct KeyInfo {
  const char* key;
  const char* flag;
  const char* help;
};
const std::vector<KeyInfo>& known_keys();

KeyValues read_ini(const std::filesystem::path& path);
KeyValues to_key_values(const RunConfig& config);
std::string to_ini(const KeyValues& values);
/// Applies `values` on top of the defaults. Throws Errc::config on unknown keys
/// or unparsable values.
RunConfig resolve(const KeyValues& values);

/// Penalty specs named by the config, with zero patterns and weights attached.
std::vector<PenaltySpec> penalty_specs(const RunConfig& config);

int cmd_fit(const RunConfig& config, std::ostream& log);
int cmd_simulate(const RunConfig& config, std::ostream& log);
int cmd_cv(const RunConfig& config, std::ostream& log);
int cmd_variogram(const RunConfig& config, std::ostream& log);
int cmd_presets(const RunConfig& config, std::ostream& out);

/// Parses argv and dispatches; never throws.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace golazo::cli
