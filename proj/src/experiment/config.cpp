#include "visc/experiment/config.hpp"

#include <yaml-cpp/yaml.h>

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace visc::experiment {

std::string to_string(TrainingMode mode) { return mode == TrainingMode::per_step ? "per_step" : "global"; }

namespace {

TrainingMode mode_from_string(const std::string& name) {
  if (name == "per_step") return TrainingMode::per_step;
  if (name == "global") return TrainingMode::global;
  throw ConfigError("training.mode: expected per_step or global, got '" + name + "'");
}

void reject_unknown_keys(const YAML::Node& node, const std::string& where, const std::set<std::string>& allowed) {
  if (!node.IsMap()) throw ConfigError(where + ": expected a mapping");
  for (const auto& kv : node) {
    const auto key = kv.first.as<std::string>();
    if (!allowed.contains(key)) throw ConfigError(where + ": unknown key '" + key + "'");
  }
}

template <typename T>
T read(const YAML::Node& node, const std::string& key, const std::string& where) {
  try {
    return node[key].as<T>();
  } catch (const YAML::Exception&) {
    throw ConfigError(where + "." + key + ": invalid value");
  }
}

template <typename T>
void read_optional(const YAML::Node& node, const std::string& key, const std::string& where, T& out) {
  if (node[key]) out = read<T>(node, key, where);
}

InitialProfile parse_initial(const YAML::Node& node) {
  const std::string where = "initial_condition";
  if (!node.IsMap() || !node["type"]) throw ConfigError(where + ": needs a 'type' (hat or sine)");
  const auto type = read<std::string>(node, "type", where);
  if (type == "hat") {
    reject_unknown_keys(node, where, {"type", "lo", "hi", "amplitude"});
    HatProfile hat;
    read_optional(node, "lo", where, hat.lo);
    read_optional(node, "hi", where, hat.hi);
    read_optional(node, "amplitude", where, hat.amplitude);
    return hat;
  }
  if (type == "sine") {
    reject_unknown_keys(node, where, {"type", "wavenumber", "amplitude"});
    SineProfile sine;
    read_optional(node, "wavenumber", where, sine.wavenumber);
    read_optional(node, "amplitude", where, sine.amplitude);
    return sine;
  }
  throw ConfigError(where + ".type: expected hat or sine, got '" + type + "'");
}

TrainingConfig parse_training(const YAML::Node& node) {
  const std::string where = "training";
  reject_unknown_keys(node, where,
                      {"mode", "learning_rate", "n_iters", "mu_min", "mu_max", "l2_penalty", "smooth_penalty",
                       "init_mu", "seed", "warm_start"});
  TrainingConfig t;
  if (node["mode"]) t.mode = mode_from_string(read<std::string>(node, "mode", where));
  auto& o = t.optimizer;
  read_optional(node, "learning_rate", where, o.learning_rate);
  read_optional(node, "n_iters", where, o.n_iters);
  read_optional(node, "mu_min", where, o.mu_min);
  read_optional(node, "mu_max", where, o.mu_max);
  read_optional(node, "l2_penalty", where, o.l2_penalty);
  read_optional(node, "smooth_penalty", where, o.smooth_penalty);
  if (node["init_mu"]) o.init_mu = read<double>(node, "init_mu", where);
  read_optional(node, "seed", where, o.seed);
  read_optional(node, "warm_start", where, o.warm_start);
  return t;
}

OutputConfig parse_outputs(const YAML::Node& node) {
  const std::string where = "outputs";
  reject_unknown_keys(node, where, {"directory", "solution", "error", "entropy", "mu"});
  OutputConfig out;
  read_optional(node, "directory", where, out.directory);
  read_optional(node, "solution", where, out.solution);
  read_optional(node, "error", where, out.error);
  read_optional(node, "entropy", where, out.entropy);
  read_optional(node, "mu", where, out.mu);
  return out;
}

bool finite_positive(double v) { return std::isfinite(v) && v > 0.0; }

}  // namespace

void ExperimentConfig::validate() const {
  if (n_cells < 3) throw ConfigError("n_cells must be >= 3");
  if (!finite_positive(length)) throw ConfigError("length must be positive");
  if (!finite_positive(dt)) throw ConfigError("dt must be positive");
  if (!std::isfinite(c)) throw ConfigError("c must be finite");
  if (!(t_final >= 0.0) || !std::isfinite(t_final)) throw ConfigError("t_final must be >= 0");
  const double ratio = t_final / dt;
  // A few ULPs of slack so that decimal inputs such as 0.3 / 0.1 are accepted.
  const double ulp = std::nextafter(std::abs(ratio), INFINITY) - std::abs(ratio);
  if (std::abs(ratio - std::round(ratio)) > 4.0 * ulp)
    throw ConfigError("t_final must be a whole number of time steps");
  if (const auto* hat = std::get_if<HatProfile>(&initial_condition)) {
    if (!(hat->lo >= 0.0 && hat->lo < hat->hi && hat->hi <= length) || !std::isfinite(hat->amplitude))
      throw ConfigError("initial_condition: need 0 <= lo < hi <= length");
  } else {
    const auto& sine = std::get<SineProfile>(initial_condition);
    if (!std::isfinite(sine.amplitude)) throw ConfigError("initial_condition: amplitude must be finite");
  }
  if (mu && !std::isfinite(*mu)) throw ConfigError("mu must be finite");
  if (training) {
    try {
      training->optimizer.validate();
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string("training: ") + e.what());
    }
  }
  if (outputs.directory.empty()) throw ConfigError("outputs.directory must not be empty");
}

Index ExperimentConfig::n_steps() const { return static_cast<Index>(std::llround(t_final / dt)); }

SchemeConfig ExperimentConfig::scheme_config() const { return SchemeConfig(Grid1D(n_cells, length), c, dt); }

double ExperimentConfig::run_mu() const { return mu ? *mu : scheme_config().upwind_viscosity(); }

ExperimentConfig parse_config(const std::string& text) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::Exception& e) {
    throw ConfigError(std::string("config: malformed YAML: ") + e.what());
  }
  if (!root || root.IsNull()) throw ConfigError("config: empty document");
  const std::string where = "config";
  reject_unknown_keys(root, where,
                      {"scheme", "n_cells", "length", "c", "dt", "t_final", "mu", "initial_condition", "training",
                       "outputs"});
  ExperimentConfig cfg;
  if (root["scheme"]) {
    try {
      cfg.scheme = scheme_from_string(read<std::string>(root, "scheme", where));
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string("config.scheme: ") + e.what());
    }
  }
  read_optional(root, "n_cells", where, cfg.n_cells);
  read_optional(root, "length", where, cfg.length);
  read_optional(root, "c", where, cfg.c);
  read_optional(root, "dt", where, cfg.dt);
  read_optional(root, "t_final", where, cfg.t_final);
  if (root["mu"]) cfg.mu = read<double>(root, "mu", where);
  if (root["initial_condition"]) cfg.initial_condition = parse_initial(root["initial_condition"]);
  if (root["training"]) cfg.training = parse_training(root["training"]);
  if (root["outputs"]) cfg.outputs = parse_outputs(root["outputs"]);
  cfg.validate();
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string to_yaml(const ExperimentConfig& cfg) {
  YAML::Emitter out;
  out.SetDoublePrecision(17);
  out << YAML::BeginMap;
  out << YAML::Key << "scheme" << YAML::Value << to_string(cfg.scheme);
  out << YAML::Key << "n_cells" << YAML::Value << static_cast<long long>(cfg.n_cells);
  out << YAML::Key << "length" << YAML::Value << cfg.length;
  out << YAML::Key << "c" << YAML::Value << cfg.c;
  out << YAML::Key << "dt" << YAML::Value << cfg.dt;
  out << YAML::Key << "t_final" << YAML::Value << cfg.t_final;
  if (cfg.mu) out << YAML::Key << "mu" << YAML::Value << *cfg.mu;

  out << YAML::Key << "initial_condition" << YAML::Value << YAML::BeginMap;
  if (const auto* hat = std::get_if<HatProfile>(&cfg.initial_condition)) {
    out << YAML::Key << "type" << YAML::Value << "hat";
    out << YAML::Key << "lo" << YAML::Value << hat->lo;
    out << YAML::Key << "hi" << YAML::Value << hat->hi;
    out << YAML::Key << "amplitude" << YAML::Value << hat->amplitude;
  } else {
    const auto& sine = std::get<SineProfile>(cfg.initial_condition);
    out << YAML::Key << "type" << YAML::Value << "sine";
    out << YAML::Key << "wavenumber" << YAML::Value << sine.wavenumber;
    out << YAML::Key << "amplitude" << YAML::Value << sine.amplitude;
  }
  out << YAML::EndMap;

  if (cfg.training) {
    const auto& o = cfg.training->optimizer;
    out << YAML::Key << "training" << YAML::Value << YAML::BeginMap;
    out << YAML::Key << "mode" << YAML::Value << to_string(cfg.training->mode);
    out << YAML::Key << "learning_rate" << YAML::Value << o.learning_rate;
    out << YAML::Key << "n_iters" << YAML::Value << o.n_iters;
    out << YAML::Key << "mu_min" << YAML::Value << o.mu_min;
    out << YAML::Key << "mu_max" << YAML::Value << o.mu_max;
    out << YAML::Key << "l2_penalty" << YAML::Value << o.l2_penalty;
    out << YAML::Key << "smooth_penalty" << YAML::Value << o.smooth_penalty;
    if (o.init_mu) out << YAML::Key << "init_mu" << YAML::Value << *o.init_mu;
    out << YAML::Key << "seed" << YAML::Value << static_cast<unsigned long long>(o.seed);
    out << YAML::Key << "warm_start" << YAML::Value << o.warm_start;
    out << YAML::EndMap;
  }

  out << YAML::Key << "outputs" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "directory" << YAML::Value << cfg.outputs.directory;
  out << YAML::Key << "solution" << YAML::Value << cfg.outputs.solution;
  out << YAML::Key << "error" << YAML::Value << cfg.outputs.error;
  out << YAML::Key << "entropy" << YAML::Value << cfg.outputs.entropy;
  out << YAML::Key << "mu" << YAML::Value << cfg.outputs.mu;
  out << YAML::EndMap;

  out << YAML::EndMap;
  return std::string(out.c_str()) + "\n";
}

bool is_preset(const std::string& name) {
  return name == "paper-hat" || name == "paper-hat-nonneg" || name == "sine-smooth";
}

ExperimentConfig preset_config(const std::string& name) {
  if (!is_preset(name)) throw ConfigError("unknown preset '" + name + "' (paper-hat, paper-hat-nonneg, sine-smooth)");
  ExperimentConfig cfg;
  cfg.scheme = Scheme::ftcs_mu;
  cfg.n_cells = 100;
  cfg.length = 1.0;
  cfg.c = 1.0;
  cfg.dt = 1e-3;
  cfg.t_final = 0.15;
  cfg.initial_condition = HatProfile{0.4, 0.6, 1.0};

  TrainingConfig training;
  training.mode = TrainingMode::per_step;
  training.optimizer.learning_rate = 0.1;
  training.optimizer.n_iters = 500;
  training.optimizer.mu_min = -5e-3;
  training.optimizer.mu_max = 9.5e-2;
  if (name == "paper-hat-nonneg") training.optimizer.mu_min = 0.0;
  if (name == "sine-smooth") cfg.initial_condition = SineProfile{1, 1.0};
  cfg.training = training;
  cfg.outputs.directory = name;
  return cfg;
}

}  // namespace visc::experiment
