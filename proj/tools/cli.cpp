#include "cli.hpp"

#include "golazo/csv.hpp"
#include "golazo/extremes.hpp"
#include "golazo/gauss_admm.hpp"
#include "golazo/lap_admm.hpp"
#include "golazo/simgen.hpp"

#include <CLI11.hpp>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <json.hpp>

#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

namespace golazo::cli {

namespace {

using json = nlohmann::ordered_json;
namespace fs = std::filesystem;

constexpr const char* kToolVersion = "golazo 0.1.0";

[[noreturn]] void config_error(const std::string& what) { throw Error(Errc::config, what); }

std::string trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return std::string(s);
}

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= s.size()) {
    const std::size_t pos = s.find(sep, start);
    const std::string part = trim(s.substr(start, pos == std::string_view::npos ? s.npos : pos - start));
    if (!part.empty()) out.push_back(part);
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

template <typename T>
T parse_number(const std::string& key, const std::string& raw) {
  const std::string s = trim(raw);
  T value{};
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) {
    config_error(key + ": cannot parse '" + raw + "'");
  }
  return value;
}

bool parse_bool(const std::string& key, const std::string& raw) {
  const std::string s = trim(raw);
  if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
  if (s == "false" || s == "0" || s == "no" || s == "off") return false;
  config_error(key + ": expected a boolean, got '" + raw + "'");
}

template <typename E>
E parse_enum(const std::string& key, const std::string& raw,
             std::initializer_list<std::pair<const char*, E>> table) {
  const std::string s = trim(raw);
  std::string options;
  for (const auto& [name, value] : table) {
    if (s == name) return value;
    options += std::string(options.empty() ? "" : ", ") + name;
  }
  config_error(key + ": unknown value '" + raw + "' (expected one of " + options + ")");
}

template <typename E>
std::string enum_name(E value, std::initializer_list<std::pair<const char*, E>> table) {
  for (const auto& [name, v] : table) {
    if (v == value) return name;
  }
  return "unknown";
}

const std::initializer_list<std::pair<const char*, InputKind>> kInputKinds{
    {"samples", InputKind::samples}, {"covariance", InputKind::covariance}, {"variogram", InputKind::variogram}};
const std::initializer_list<std::pair<const char*, CvProtocol>> kProtocols{
    {"kfold", CvProtocol::kfold}, {"holdout", CvProtocol::holdout}, {"none", CvProtocol::none}};
const std::initializer_list<std::pair<const char*, SimModel>> kModels{
    {"two_cycle", SimModel::two_cycle}, {"latent_cycle_hr", SimModel::latent_cycle_hr}};
const std::initializer_list<std::pair<const char*, GridScale>> kScales{{"log", GridScale::log},
                                                                       {"linear", GridScale::linear}};
const std::initializer_list<std::pair<const char*, VariogramScale>> kVarioScales{
    {"ranks", VariogramScale::ranks}, {"pareto", VariogramScale::pareto}};

std::vector<Edge> parse_edges(const std::string& key, const std::string& raw) {
  std::vector<Edge> out;
  for (const std::string& pair : split(raw, ';')) {
    const auto ends = split(pair, '-');
    if (ends.size() != 2) config_error(key + ": edges are written i-j, got '" + pair + "'");
    out.emplace_back(parse_number<Index>(key, ends[0]), parse_number<Index>(key, ends[1]));
  }
  return out;
}

std::vector<std::vector<Index>> parse_groups(const std::string& key, const std::string& raw) {
  std::vector<std::vector<Index>> out;
  for (const std::string& group : split(raw, ';')) {
    std::vector<Index> members;
    for (const std::string& m : split(group, ',')) members.push_back(parse_number<Index>(key, m));
    out.push_back(std::move(members));
  }
  return out;
}

std::string edges_to_string(const std::vector<Edge>& edges) {
  std::string out;
  for (const auto& [i, j] : edges) {
    out += (out.empty() ? "" : ";") + std::to_string(i) + "-" + std::to_string(j);
  }
  return out;
}

std::string groups_to_string(const std::vector<std::vector<Index>>& groups) {
  std::string out;
  for (std::size_t g = 0; g < groups.size(); ++g) {
    if (g > 0) out += ";";
    for (std::size_t m = 0; m < groups[g].size(); ++m) {
      out += (m > 0 ? "," : "") + std::to_string(groups[g][m]);
    }
  }
  return out;
}

json number(double v) {
  if (std::isfinite(v)) return v;
  return format_double(v);
}

json matrix_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Index j = 0; j < m.cols(); ++j) row.push_back(number(m(i, j)));
    rows.push_back(std::move(row));
  }
  return rows;
}

void write_json(const fs::path& path, const json& j) { write_file_atomic(path, j.dump(2) + "\n"); }

std::uint64_t fnv1a(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::data, "cannot read " + path.string());
  std::uint64_t h = 0xcbf29ce484222325ULL;
  char buf[4096];
  while (in.read(buf, sizeof buf) || in.gcount() > 0) {
    for (std::streamsize i = 0; i < in.gcount(); ++i) {
      h ^= static_cast<unsigned char>(buf[i]);
      h *= 0x100000001b3ULL;
    }
  }
  return h;
}

std::string hex(std::uint64_t v) {
  std::ostringstream os;
  os << std::hex << v;
  return os.str();
}

json file_record(const fs::path& path) {
  return json{{"path", path.string()}, {"fnv1a64", hex(fnv1a(path))}};
}

std::string samples_csv(const Eigen::MatrixXd& x) {
  std::string out;
  for (Index j = 0; j < x.cols(); ++j) out += (j > 0 ? ",x" : "x") + std::to_string(j + 1);
  out += '\n';
  return out + matrix_to_csv(x);
}

SampleBlock read_samples(const fs::path& path, bool center) {
  CsvTable t = read_csv(path);
  if (t.values.rows() == 0) throw Error(Errc::data, path.string() + ": no data rows");
  if (center) t.values.rowwise() -= t.values.colwise().mean();
  return SampleBlock(std::move(t.values));
}

// Solver input, plus what the manifest should say about how it was obtained.
struct LoadedInput {
  SymMatrix solver_input;
  std::optional<VariogramMatrix> variogram;
  json record;
};

LoadedInput load_input(const RunConfig& c, std::ostream& log) {
  if (c.input.empty()) config_error("input.path is required");
  LoadedInput in;
  in.record = file_record(c.input);
  in.record["kind"] = enum_name(c.input_kind, kInputKinds);

  switch (c.input_kind) {
    case InputKind::samples: {
      const SampleBlock x = read_samples(c.input, c.center);
      in.record["rows"] = x.rows();
      in.record["cols"] = x.cols();
      if (c.mode == FitMode::hr && c.variogram.scale == VariogramScale::ranks) {
        in.record["exceedances_k"] = exceedance_count(x.rows(), c.variogram.threshold);
      }
      FoldStatistic st = fold_statistic(x, c.mode, c.variogram);
      in.solver_input = std::move(st.solver_input);
      in.variogram = std::move(st.variogram);
      if (in.variogram) {
        const bool cnd = in.variogram->is_conditionally_negative_definite();
        in.record["variogram_cnd"] = cnd;
        if (!cnd) log << "warning: empirical variogram is not conditionally negative definite; fitting it as is\n";
      }
      break;
    }
    case InputKind::covariance: {
      const Eigen::MatrixXd m = read_matrix_csv(c.input);
      if (!m.allFinite()) throw Error(Errc::data, c.input.string() + ": non-finite entries");
      const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
      if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-8 * scale) {
        throw Error(Errc::data, c.input.string() + ": covariance is not symmetric");
      }
      SymMatrix s(m);
      const double min_eig = sym_eig(s, "input covariance").values.minCoeff();
      const bool repair = min_eig < -1e-10 * scale;
      if (repair) {
        log << "warning: covariance has eigenvalue " << min_eig
            << "; using its nearest PSD matrix instead\n";
        s = psd_project(s);
      }
      in.record["rows"] = m.rows();
      in.record["min_eigenvalue"] = number(min_eig);
      in.record["repaired_psd"] = repair;
      in.solver_input = std::move(s);
      break;
    }
    case InputKind::variogram: {
      const Eigen::MatrixXd m = read_matrix_csv(c.input);
      try {
        in.variogram = VariogramMatrix(m);
      } catch (const Error& e) {
        throw Error(Errc::data, c.input.string() + ": " + e.what());
      }
      in.record["rows"] = m.rows();
      in.solver_input = SymMatrix(-0.5 * in.variogram->matrix());
      break;
    }
  }
  return in;
}

json config_json(const RunConfig& c) {
  json out = json::object();
  for (const auto& [k, v] : to_key_values(c)) out[k] = v;
  return out;
}

json base_manifest(const std::string& command, const RunConfig& c) {
  return json{{"tool", kToolVersion}, {"command", command}, {"config", config_json(c)}};
}

void emit_config(const RunConfig& c) { write_file_atomic(c.output / "config.ini", to_ini(to_key_values(c))); }

json edges_json(const SymMatrix& a, double tol) {
  const Eigen::MatrixXd& m = a.matrix();
  const double cutoff = tol * std::max(1.0, m.cwiseAbs().maxCoeff());
  json edges = json::array();
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = i + 1; j < m.cols(); ++j) {
      if (std::abs(m(i, j)) > cutoff) edges.push_back(json{{"i", i}, {"j", j}, {"weight", m(i, j)}});
    }
  }
  return edges;
}

}  // namespace

int exit_code(Errc code) noexcept {
  switch (code) {
    case Errc::config:
    case Errc::invalid_argument:
    case Errc::invalid_step: return kConfigError;
    case Errc::data:
    case Errc::invalid_dimension:
    case Errc::insufficient_exceedances:
    case Errc::not_positive_definite:
    case Errc::singular: return kDataError;
    case Errc::divergence:
    case Errc::numeric_failure: return kDivergence;
  }
  return kDataError;
}

const std::vector<KeyInfo>& known_keys() {
  static const std::vector<KeyInfo> keys{
      {"run.mode", "--mode", "gaussian | hr | lcggm"},
      {"run.seed", "--seed", "base seed for every random stream"},
      {"run.output", "-o,--output", "output directory"},
      {"input.path", "-i,--input", "input CSV"},
      {"input.kind", "--input-kind", "samples | covariance | variogram"},
      {"input.validation", "--validation", "validation samples for the holdout protocol"},
      {"input.center", "--center", "subtract column means from samples"},
      {"penalty.kinds", "--penalty",
       "comma-separated kinds: lasso, asymmetric, positive_lasso, mtp2 (emtp2), sparse_positive "
       "(lasso_emtp2), zero_pattern"},
      {"penalty.base", "--base", "kind under a zero_pattern"},
      {"penalty.gamma", "--gamma", "penalty scale factor; bounds use lambda * gamma"},
      {"penalty.zero_edges", "--zero-edges", "forced-zero edges, e.g. 0-3;1-4 (0-based)"},
      {"penalty.zero_groups", "--zero-groups", "node groups with no edges between them, e.g. 0,1,2;3,4,5"},
      {"penalty.weights", "--weights", "weights CSV for the asymmetric kind"},
      {"penalty.penalize_diagonal", "--penalize-diagonal", "apply the bounds to the diagonal too"},
      {"penalty.dim", "--dim", "dimension for the presets command"},
      {"grid.lambda", "--lambda", "lambda used by fit"},
      {"grid.lambda_min", "--lambda-min", "smallest grid lambda"},
      {"grid.lambda_max", "--lambda-max", "largest grid lambda"},
      {"grid.count", "--grid-count", "number of grid points"},
      {"grid.scale", "--grid-scale", "log | linear"},
      {"admm.sigma", "--sigma", "augmented Lagrangian weight"},
      {"admm.alpha", "--alpha", "dual step size in (0, 2)"},
      {"admm.varsigma", "--varsigma", "proximal weight factor (> 1)"},
      {"admm.rho", "--rho", "proximal weight of the log-det block"},
      {"admm.eps_rel", "--eps-rel", "relative-change tolerance"},
      {"admm.eps_feas", "--eps-feas", "infeasibility tolerance"},
      {"admm.max_iter", "--max-iter", "iteration cap"},
      {"cv.protocol", "--cv", "kfold | holdout | none"},
      {"cv.folds", "--folds", "number of folds"},
      {"cv.edge_tol", "--edge-tol", "relative threshold for counting edges"},
      {"cv.rank_tol", "--rank-tol", "relative threshold for the rank of B"},
      {"hr.threshold", "--threshold", "quantile threshold a; k = ceil((1 - a) n)"},
      {"hr.scale", "--variogram-scale", "ranks | pareto"},
      {"simulate.model", "--model", "two_cycle | latent_cycle_hr"},
      {"simulate.p", "--p", "nodes per cycle (two_cycle) or observed nodes (latent_cycle_hr)"},
      {"simulate.hidden", "--hidden", "hidden nodes (latent_cycle_hr)"},
      {"simulate.n", "--n", "training sample size; 0 means 100 (two_cycle) or 1000 (latent_cycle_hr)"},
      {"simulate.n_validation", "--n-validation", "validation sample size (0 for none)"},
      {"simulate.k_diag", "--k-diag", "precision diagonal (two_cycle)"},
      {"simulate.k_edge", "--k-edge", "cycle edge precision (two_cycle)"},
      {"simulate.k_hidden", "--k-hidden", "hidden coupling (two_cycle); <= 0 means 5 / (2 p)"},
  };
  return keys;
}

KeyValues read_ini(const fs::path& path) {
  boost::property_tree::ptree tree;
  try {
    boost::property_tree::ini_parser::read_ini(path.string(), tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    config_error(std::string("config file: ") + e.what());
  }
  KeyValues out;
  for (const auto& [section, body] : tree) {
    if (body.empty()) config_error("config file: key '" + section + "' is outside a section");
    for (const auto& [key, value] : body) out[section + "." + key] = value.get_value<std::string>();
  }
  return out;
}

KeyValues to_key_values(const RunConfig& c) {
  KeyValues kv;
  kv["run.mode"] = std::string(to_string(c.mode));
  kv["run.seed"] = std::to_string(c.seed);
  kv["run.output"] = c.output.string();
  kv["input.path"] = c.input.string();
  kv["input.kind"] = enum_name(c.input_kind, kInputKinds);
  kv["input.validation"] = c.validation.string();
  kv["input.center"] = c.center ? "true" : "false";
  std::string kinds;
  for (PenaltyKind k : c.penalties) kinds += (kinds.empty() ? "" : ",") + std::string(to_string(k));
  kv["penalty.kinds"] = kinds;
  kv["penalty.base"] = std::string(to_string(c.base));
  kv["penalty.gamma"] = format_double(c.gamma);
  kv["penalty.zero_edges"] = edges_to_string(c.zero_edges);
  kv["penalty.zero_groups"] = groups_to_string(c.zero_groups);
  kv["penalty.weights"] = c.weights.string();
  kv["penalty.penalize_diagonal"] = c.penalize_diagonal ? "true" : "false";
  kv["penalty.dim"] = std::to_string(c.dim);
  kv["grid.lambda"] = format_double(c.lambda);
  kv["grid.lambda_min"] = format_double(c.grid.lambda_min);
  kv["grid.lambda_max"] = format_double(c.grid.lambda_max);
  kv["grid.count"] = std::to_string(c.grid.count);
  kv["grid.scale"] = enum_name(c.grid.scale, kScales);
  kv["admm.sigma"] = format_double(c.admm.sigma);
  kv["admm.alpha"] = format_double(c.admm.alpha);
  kv["admm.varsigma"] = format_double(c.admm.varsigma);
  kv["admm.rho"] = format_double(c.admm.rho);
  kv["admm.eps_rel"] = format_double(c.admm.eps_rel);
  kv["admm.eps_feas"] = format_double(c.admm.eps_feas);
  kv["admm.max_iter"] = std::to_string(c.admm.max_iter);
  kv["cv.protocol"] = enum_name(c.protocol, kProtocols);
  kv["cv.folds"] = std::to_string(c.folds);
  kv["cv.edge_tol"] = format_double(c.edge_tol);
  kv["cv.rank_tol"] = format_double(c.rank_tol);
  kv["hr.threshold"] = format_double(c.variogram.threshold);
  kv["hr.scale"] = enum_name(c.variogram.scale, kVarioScales);
  kv["simulate.model"] = enum_name(c.simulate.model, kModels);
  kv["simulate.p"] = std::to_string(c.simulate.p);
  kv["simulate.hidden"] = std::to_string(c.simulate.hidden);
  kv["simulate.n"] = std::to_string(c.simulate.n);
  kv["simulate.n_validation"] = std::to_string(c.simulate.n_validation);
  kv["simulate.k_diag"] = format_double(c.simulate.k_diag);
  kv["simulate.k_edge"] = format_double(c.simulate.k_edge);
  kv["simulate.k_hidden"] = format_double(c.simulate.k_hidden);
  return kv;
}

std::string to_ini(const KeyValues& values) {
  std::string out;
  std::string section;
  for (const auto& [key, value] : values) {
    const std::size_t dot = key.find('.');
    const std::string sec = key.substr(0, dot);
    if (sec != section) {
      out += (out.empty() ? "[" : "\n[") + sec + "]\n";
      section = sec;
    }
    out += key.substr(dot + 1) + " = " + value + "\n";
  }
  return out;
}

RunConfig resolve(const KeyValues& values) {
  RunConfig c;
  for (const auto& [key, raw] : values) {
    const std::string v = trim(raw);
    if (key == "run.mode") {
      c.mode = parse_fit_mode(v);
    } else if (key == "run.seed") {
      c.seed = parse_number<std::uint64_t>(key, v);
    } else if (key == "run.output") {
      c.output = v;
    } else if (key == "input.path") {
      c.input = v;
    } else if (key == "input.kind") {
      c.input_kind = parse_enum(key, v, kInputKinds);
    } else if (key == "input.validation") {
      c.validation = v;
    } else if (key == "input.center") {
      c.center = parse_bool(key, v);
    } else if (key == "penalty.kinds") {
      c.penalties.clear();
      for (const std::string& tag : split(v, ',')) c.penalties.push_back(parse_penalty_kind(tag));
      if (c.penalties.empty()) config_error("penalty.kinds is empty");
    } else if (key == "penalty.base") {
      c.base = parse_penalty_kind(v);
    } else if (key == "penalty.gamma") {
      c.gamma = parse_number<double>(key, v);
    } else if (key == "penalty.zero_edges") {
      c.zero_edges = parse_edges(key, v);
    } else if (key == "penalty.zero_groups") {
      c.zero_groups = parse_groups(key, v);
    } else if (key == "penalty.weights") {
      c.weights = v;
    } else if (key == "penalty.penalize_diagonal") {
      c.penalize_diagonal = parse_bool(key, v);
    } else if (key == "penalty.dim") {
      c.dim = parse_number<Index>(key, v);
    } else if (key == "grid.lambda") {
      c.lambda = parse_number<double>(key, v);
    } else if (key == "grid.lambda_min") {
      c.grid.lambda_min = parse_number<double>(key, v);
    } else if (key == "grid.lambda_max") {
      c.grid.lambda_max = parse_number<double>(key, v);
    } else if (key == "grid.count") {
      c.grid.count = parse_number<int>(key, v);
    } else if (key == "grid.scale") {
      c.grid.scale = parse_enum(key, v, kScales);
    } else if (key == "admm.sigma") {
      c.admm.sigma = parse_number<double>(key, v);
    } else if (key == "admm.alpha") {
      c.admm.alpha = parse_number<double>(key, v);
    } else if (key == "admm.varsigma") {
      c.admm.varsigma = parse_number<double>(key, v);
    } else if (key == "admm.rho") {
      c.admm.rho = parse_number<double>(key, v);
    } else if (key == "admm.eps_rel") {
      c.admm.eps_rel = parse_number<double>(key, v);
    } else if (key == "admm.eps_feas") {
      c.admm.eps_feas = parse_number<double>(key, v);
    } else if (key == "admm.max_iter") {
      c.admm.max_iter = parse_number<int>(key, v);
    } else if (key == "cv.protocol") {
      c.protocol = parse_enum(key, v, kProtocols);
    } else if (key == "cv.folds") {
      c.folds = parse_number<int>(key, v);
    } else if (key == "cv.edge_tol") {
      c.edge_tol = parse_number<double>(key, v);
    } else if (key == "cv.rank_tol") {
      c.rank_tol = parse_number<double>(key, v);
    } else if (key == "hr.threshold") {
      c.variogram.threshold = parse_number<double>(key, v);
    } else if (key == "hr.scale") {
      c.variogram.scale = parse_enum(key, v, kVarioScales);
    } else if (key == "simulate.model") {
      c.simulate.model = parse_enum(key, v, kModels);
    } else if (key == "simulate.p") {
      c.simulate.p = parse_number<Index>(key, v);
    } else if (key == "simulate.hidden") {
      c.simulate.hidden = parse_number<Index>(key, v);
    } else if (key == "simulate.n") {
      c.simulate.n = parse_number<Index>(key, v);
    } else if (key == "simulate.n_validation") {
      c.simulate.n_validation = parse_number<Index>(key, v);
    } else if (key == "simulate.k_diag") {
      c.simulate.k_diag = parse_number<double>(key, v);
    } else if (key == "simulate.k_edge") {
      c.simulate.k_edge = parse_number<double>(key, v);
    } else if (key == "simulate.k_hidden") {
      c.simulate.k_hidden = parse_number<double>(key, v);
    } else {
      config_error("unknown config key '" + key + "'");
    }
  }

  if (c.input_kind == InputKind::variogram && c.mode == FitMode::gaussian) {
    config_error("variogram input requires mode hr or lcggm");
  }
  if (c.input_kind == InputKind::covariance && c.mode != FitMode::gaussian) {
    config_error("covariance input requires mode gaussian");
  }
  if (!(c.variogram.threshold >= 0.0 && c.variogram.threshold < 1.0)) {
    config_error("hr.threshold must lie in [0, 1)");
  }
  if (!(c.lambda >= 0.0) || !std::isfinite(c.lambda)) config_error("grid.lambda must be >= 0");
  if (!(c.gamma >= 0.0) || !std::isfinite(c.gamma)) config_error("penalty.gamma must be >= 0");
  if (c.folds < 2 && c.protocol == CvProtocol::kfold) config_error("cv.folds must be >= 2");
  return c;
}

std::vector<PenaltySpec> penalty_specs(const RunConfig& c) {
  std::vector<PenaltySpec> out;
  for (PenaltyKind kind : c.penalties) {
    PenaltySpec spec;
    spec.kind = kind;
    spec.penalize_diagonal = c.penalize_diagonal;
    if (kind == PenaltyKind::custom) config_error("the custom penalty kind is only available from the library");
    if (kind == PenaltyKind::zero_pattern) {
      spec.base = c.base;
      spec.zero_edges = c.zero_edges;
      for (const Edge& e : crossing_edges(c.zero_groups)) spec.zero_edges.push_back(e);
      if (spec.zero_edges.empty()) config_error("zero_pattern needs penalty.zero_edges or penalty.zero_groups");
    }
    if (kind == PenaltyKind::asymmetric) {
      if (c.weights.empty()) config_error("the asymmetric kind needs penalty.weights");
      spec.weights = read_matrix_csv(c.weights);
    }
    out.push_back(std::move(spec));
  }
  const bool uses_pattern = !c.zero_edges.empty() || !c.zero_groups.empty();
  const bool has_pattern_kind =
      std::find(c.penalties.begin(), c.penalties.end(), PenaltyKind::zero_pattern) != c.penalties.end();
  if (uses_pattern && !has_pattern_kind) {
    config_error("penalty.zero_edges / zero_groups need the zero_pattern kind");
  }
  return out;
}

int cmd_fit(const RunConfig& c, std::ostream& log) {
  const std::vector<PenaltySpec> specs = penalty_specs(c);
  if (specs.size() != 1) config_error("fit takes exactly one penalty kind");
  const LoadedInput in = load_input(c, log);
  const Index d = in.solver_input.dim();
  const GolazoBounds bounds = compile_penalty(specs[0], d, c.lambda, c.gamma);
  AdmmParams params = c.admm;
  params.lambda = c.lambda;

  SymMatrix primal, a, b;
  int iterations = 0;
  bool converged = false;
  double rel = 0.0, ier = 0.0, objective = 0.0;
  json extra = json::object();
  if (c.mode == FitMode::gaussian) {
    const AdmmResult r = solve_latent_gaussian(in.solver_input, bounds, params);
    primal = r.m;
    a = r.a;
    b = r.b;
    iterations = r.iterations;
    converged = r.converged;
    rel = r.final_rel_chg();
    ier = r.final_ier();
    objective = latent_gaussian_objective(in.solver_input, a, b, bounds, c.lambda);
    extra["train_loglik"] = number(gaussian_loglik(a - b, in.solver_input));
  } else {
    const LaplacianResult r = solve_latent_laplacian(in.solver_input, bounds, params);
    primal = r.theta;
    a = r.a;
    b = r.b;
    iterations = r.iterations;
    converged = r.converged;
    rel = r.final_rel_chg();
    ier = r.final_ier();
    objective = latent_laplacian_objective(in.solver_input, primal, a, b, bounds, c.lambda);
    if (in.variogram) extra["train_surrogate_loglik"] = number(surrogate_loglik(primal, *in.variogram));
  }

  fs::create_directories(c.output);
  write_matrix_csv(c.output / "A.csv", a.matrix());
  write_matrix_csv(c.output / "B.csv", b.matrix());
  const char* primal_name = c.mode == FitMode::gaussian ? "M.csv" : "Theta.csv";
  write_matrix_csv(c.output / primal_name, primal.matrix());
  if (in.variogram) write_matrix_csv(c.output / "Gamma.csv", in.variogram->matrix());
  write_json(c.output / "edges.json", edges_json(a, c.edge_tol));

  int positive = 0, negative = 0;
  for (Index i = 0; i < d; ++i) {
    for (Index j = i + 1; j < d; ++j) {
      if (a(i, j) > 0.0) ++positive;
      if (a(i, j) < 0.0) ++negative;
    }
  }
  json m = base_manifest("fit", c);
  m["input"] = in.record;
  m["penalty"] = specs[0].label();
  m["solver"] = json{{"iterations", iterations},
                     {"converged", converged},
                     {"final_rel_chg", number(rel)},
                     {"final_ier", number(ier)},
                     {"objective", number(objective)}};
  json diag{{"edges", count_edges(a, c.edge_tol)},
            {"rank_b", estimate_rank(b, c.rank_tol)},
            {"positive_offdiag_a", positive},
            {"negative_offdiag_a", negative},
            {"trace_b", number(b.matrix().trace())}};
  for (auto& [k, v] : extra.items()) diag[k] = v;
  m["diagnostics"] = std::move(diag);
  m["outputs"] = json::array({"A.csv", "B.csv", primal_name, "edges.json", "config.ini"});
  if (in.variogram) m["outputs"].push_back("Gamma.csv");
  write_json(c.output / "manifest.json", m);
  emit_config(c);

  log << "fit: " << iterations << " iterations, " << (converged ? "converged" : "NOT converged")
      << ", objective " << format_double(objective) << "\n";
  return converged ? kOk : kDivergence;
}

int cmd_simulate(const RunConfig& c, std::ostream& log) {
  SimulateConfig s = c.simulate;
  if (s.n == 0) s.n = s.model == SimModel::two_cycle ? 100 : 1000;
  if (s.n < 1) config_error("simulate.n must be >= 0");
  if (s.n_validation < 0) config_error("simulate.n_validation must be >= 0");
  fs::create_directories(c.output);
  std::mt19937_64 model_rng(derive_seed(c.seed, 0));
  std::mt19937_64 train_rng(derive_seed(c.seed, 1));
  std::mt19937_64 val_rng(derive_seed(c.seed, 2));

  json m = base_manifest("simulate", c);
  json files = json::array();
  auto emit = [&](const std::string& name, const std::string& contents) {
    write_file_atomic(c.output / name, contents);
    files.push_back(name);
  };

  LatentModel model;
  if (s.model == SimModel::two_cycle) {
    const std::optional<double> kh = s.k_hidden > 0.0 ? std::optional<double>(s.k_hidden) : std::nullopt;
    model = two_cycle_gaussian(s.p, s.k_diag, s.k_edge, kh);
    emit("K.csv", matrix_to_csv(model.full.matrix()));
    auto draw = [&](Index n, std::mt19937_64& rng) {
      const SampleBlock full = sample_gaussian(model.full, n, rng);
      Eigen::MatrixXd obs(n, static_cast<Index>(model.observed.size()));
      for (std::size_t k = 0; k < model.observed.size(); ++k) obs.col(k) = full.values.col(model.observed[k]);
      return obs;
    };
    emit("samples.csv", samples_csv(draw(s.n, train_rng)));
    if (s.n_validation > 0) emit("validation.csv", samples_csv(draw(s.n_validation, val_rng)));
  } else {
    model = latent_cycle_hr(s.p, s.hidden, model_rng);
    emit("Theta.csv", matrix_to_csv(model.full.matrix()));
    emit("Gamma.csv", matrix_to_csv(model.gamma_oo->matrix()));
    emit("samples.csv", samples_csv(sample_hr_pareto(*model.gamma_oo, s.n, train_rng).values));
    if (s.n_validation > 0) {
      emit("validation.csv", samples_csv(sample_hr_pareto(*model.gamma_oo, s.n_validation, val_rng).values));
    }
  }
  emit("A_true.csv", matrix_to_csv(model.a_true.matrix()));
  emit("B_true.csv", matrix_to_csv(model.b_true.matrix()));

  json edges = json::array();
  for (const auto& [i, j] : model.edges_true) edges.push_back(json::array({i, j}));
  m["model"] = json{{"family", model.family == ModelFamily::gaussian ? "gaussian" : "huesler_reiss"},
                    {"full_dim", model.full.dim()},
                    {"observed", model.observed},
                    {"hidden", model.hidden},
                    {"edges_true", edges},
                    {"rank_b_true", estimate_rank(model.b_true, 1e-8)}};
  m["outputs"] = files;
  m["outputs"].push_back("config.ini");
  write_json(c.output / "manifest.json", m);
  emit_config(c);
  log << "simulate: wrote " << files.size() << " files to " << c.output.string() << "\n";
  return kOk;
}

int cmd_cv(const RunConfig& c, std::ostream& log) {
  if (c.input_kind != InputKind::samples) config_error("cv needs raw samples (input.kind = samples)");
  if (c.input.empty()) config_error("input.path is required");
  CvOptions opt;
  opt.mode = c.mode;
  opt.grid = c.grid;
  opt.grid.gamma = c.gamma;
  opt.specs = penalty_specs(c);
  opt.params = c.admm;
  opt.variogram = c.variogram;
  opt.folds = c.folds;
  opt.seed = c.seed;
  opt.edge_tol = c.edge_tol;
  opt.rank_tol = c.rank_tol;

  const SampleBlock data = read_samples(c.input, c.center);
  json m = base_manifest("cv", c);
  json inputs{{"train", file_record(c.input)}};
  inputs["train"]["rows"] = data.rows();
  inputs["train"]["cols"] = data.cols();

  CvReport report;
  switch (c.protocol) {
    case CvProtocol::kfold: report = kfold_cv(data, opt); break;
    case CvProtocol::holdout: {
      if (c.validation.empty()) config_error("the holdout protocol needs input.validation");
      const SampleBlock val = read_samples(c.validation, c.center);
      if (val.cols() != data.cols()) throw Error(Errc::data, "validation file has a different column count");
      inputs["validation"] = file_record(c.validation);
      inputs["validation"]["rows"] = val.rows();
      report = holdout_cv(data, val, opt);
      break;
    }
    case CvProtocol::none: config_error("cv needs cv.protocol = kfold or holdout");
  }

  fs::create_directories(c.output);
  std::string cells = "spec,lambda,fold,score,edges,rank,iterations,converged,valid,status,objective\n";
  for (const CvCell& cell : report.cells) {
    cells += cell.spec + "," + format_double(cell.lambda) + "," + std::to_string(cell.fold) + "," +
             format_double(cell.score) + "," + std::to_string(cell.edges) + "," + std::to_string(cell.rank) +
             "," + std::to_string(cell.iterations) + "," + (cell.converged ? "true" : "false") + "," +
             (cell.valid ? "true" : "false") + ",\"" + cell.status + "\"," + format_double(cell.objective) +
             "\n";
  }
  write_file_atomic(c.output / "cells.csv", cells);

  const std::vector<CvCurvePoint> curve = report.curve();
  std::string curves = "spec,lambda,mean_score,mean_edges,mean_rank,converged,total\n";
  for (const CvCurvePoint& p : curve) {
    curves += p.spec + "," + format_double(p.lambda) + "," + format_double(p.mean_score) + "," +
              format_double(p.mean_edges) + "," + format_double(p.mean_rank) + "," +
              std::to_string(p.converged) + "," + std::to_string(p.total) + "\n";
  }
  write_file_atomic(c.output / "curves.csv", curves);

  json summary = json::array();
  for (const PenaltySpec& spec : opt.specs) {
    json rows = json::array();
    const CvCurvePoint* best = nullptr;
    for (const CvCurvePoint& p : curve) {
      if (p.spec != spec.label()) continue;
      rows.push_back(json{{"lambda", p.lambda},
                          {"mean_score", number(p.mean_score)},
                          {"mean_edges", number(p.mean_edges)},
                          {"mean_rank", number(p.mean_rank)},
                          {"converged", p.converged},
                          {"total", p.total}});
      if (std::isfinite(p.mean_score) && (!best || p.mean_score > best->mean_score)) best = &p;
    }
    json entry{{"spec", spec.label()}, {"curve", rows}};
    if (best) {
      entry["best"] = json{{"lambda", best->lambda},
                           {"mean_score", best->mean_score},
                           {"mean_edges", number(best->mean_edges)},
                           {"mean_rank", number(best->mean_rank)}};
    } else {
      entry["best"] = nullptr;
    }
    summary.push_back(std::move(entry));
  }
  write_json(c.output / "summary.json", json{{"specs", summary}});

  int converged = 0;
  for (const CvCell& cell : report.cells) converged += cell.converged ? 1 : 0;
  m["inputs"] = inputs;
  m["cells"] = json{{"total", report.cells.size()}, {"converged", converged}};
  m["outputs"] = json::array({"cells.csv", "curves.csv", "summary.json", "config.ini"});
  write_json(c.output / "manifest.json", m);
  emit_config(c);
  log << "cv: " << report.cells.size() << " cells, " << converged << " converged\n";
  return kOk;
}

int cmd_variogram(const RunConfig& c, std::ostream& log) {
  if (c.input_kind != InputKind::samples) config_error("variogram needs raw samples (input.kind = samples)");
  if (c.input.empty()) config_error("input.path is required");
  const SampleBlock x = read_samples(c.input, c.center);
  json m = base_manifest("variogram", c);
  m["input"] = file_record(c.input);
  m["input"]["rows"] = x.rows();
  m["input"]["cols"] = x.cols();
  VariogramMatrix g;
  if (c.variogram.scale == VariogramScale::ranks) {
    const Index k = exceedance_count(x.rows(), c.variogram.threshold);
    m["exceedances_k"] = k;
    g = empirical_variogram(x, k);
  } else {
    g = empirical_variogram_pareto(x);
  }
  m["cnd_margin"] = number(g.cnd_margin());
  if (!g.is_conditionally_negative_definite()) log << "warning: variogram is not conditionally negative definite\n";
  fs::create_directories(c.output);
  write_matrix_csv(c.output / "Gamma.csv", g.matrix());
  m["outputs"] = json::array({"Gamma.csv", "config.ini"});
  write_json(c.output / "manifest.json", m);
  emit_config(c);
  log << "variogram: " << g.dim() << " x " << g.dim() << " written\n";
  return kOk;
}

int cmd_presets(const RunConfig& c, std::ostream& out) {
  Index d = c.dim;
  if (d < 1 && !c.input.empty()) {
    const CsvTable t = read_csv(c.input);
    d = c.input_kind == InputKind::samples ? t.values.cols() : t.values.rows();
  }
  if (d < 1) config_error("presets needs penalty.dim or an input file");
  json list = json::array();
  for (const PenaltySpec& spec : penalty_specs(c)) {
    const GolazoBounds b = compile_penalty(spec, d, c.lambda, c.gamma);
    list.push_back(json{{"spec", spec.label()},
                        {"dim", d},
                        {"lambda", c.lambda},
                        {"gamma", c.gamma},
                        {"lower", matrix_json(b.lower)},
                        {"upper", matrix_json(b.upper)}});
  }
  out << list.dump(2) << "\n";
  return kOk;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Latent graphical model estimation with Golazo penalties"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kToolVersion);

  struct Command {
    const char* name;
    const char* help;
    int (*fn)(const RunConfig&, std::ostream&);
  };
  const std::vector<Command> commands{
      {"fit", "fit one lambda and write the estimates", cmd_fit},
      {"simulate", "generate a latent model and samples", cmd_simulate},
      {"cv", "cross-validate over a lambda grid and penalty kinds", cmd_cv},
      {"variogram", "estimate the empirical variogram of samples", cmd_variogram},
      {"presets", "print compiled penalty bounds as JSON", cmd_presets},
  };

  std::string config_path;
  std::map<std::string, std::string> flag_values;
  std::vector<std::pair<CLI::App*, std::vector<std::pair<std::string, CLI::Option*>>>> bound;
  for (const Command& cmd : commands) {
    CLI::App* sub = app.add_subcommand(cmd.name, cmd.help);
    sub->add_option("--config", config_path, "INI file; flags override its values");
    std::vector<std::pair<std::string, CLI::Option*>> opts;
    for (const KeyInfo& k : known_keys()) {
      opts.emplace_back(k.key, sub->add_option(k.flag, flag_values[k.key], k.help));
    }
    bound.emplace_back(sub, std::move(opts));
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kConfigError;
  }

  try {
    for (std::size_t i = 0; i < commands.size(); ++i) {
      CLI::App* sub = bound[i].first;
      if (!sub->parsed()) continue;
      KeyValues values;
      if (!config_path.empty()) values = read_ini(config_path);
      for (const auto& [key, opt] : bound[i].second) {
        if (opt->count() > 0) values[key] = flag_values[key];
      }
      const RunConfig config = resolve(values);
      std::ostream& sink = std::string(commands[i].name) == "presets" ? out : err;
      return commands[i].fn(config, sink);
    }
  } catch (const Error& e) {
    err << "error (" << to_string(e.code()) << "): " << e.what() << "\n";
    return exit_code(e.code());
  } catch (const fs::filesystem_error& e) {
    err << "error (io): " << e.what() << "\n";
    return kDataError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kDataError;
  }
  return kConfigError;
}

}  // namespace golazo::cli
