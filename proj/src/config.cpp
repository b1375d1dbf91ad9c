#include "cdhrl/config.hpp"

#include <fstream>
#include <sstream>

namespace cdhrl {

using nlohmann::json;
using nn::ConfigError;

json default_config_json() {
  return {
      {"env",
       {{"name", "chaincraft"},
        {"seed", nullptr},
        {"episode_length", nullptr},
        {"chain_length", 4},
        {"cardinality", 2},
        {"success_prob", 1.0},
        {"distractor_count", 2},
        {"distractor_cardinality", 2},
        {"distractor_move_prob", 0.1},
        {"grid_size", 7},
        {"weather_cardinality", 3},
        {"weather_move_prob", 0.1},
        {"hidden_vars", json::array()}}},
      {"scm",
       {{"T", 50},
        {"Fs", 1000},
        {"Qs", 100},
        {"K", 25},
        {"batch", 256},
        {"edge_threshold", 0.8},
        {"lr_theta", 5e-3},
        {"lr_eta", 5e-2},
        {"hidden", 128},
        {"holdout", 0.25},
        {"sparsity", 0.2}}},
      {"hrl",
       {{"epsilon", 0.05},
        {"batch", 128},
        {"H", 8},
        {"gamma_goal", 0.9},
        {"gamma_task", 0.95},
        {"lr", 1e-4},
        {"phi", 0.6},
        {"T_goal", 10000},
        {"target_sync", 200},
        {"replay", 50000},
        {"eval_episodes", 100},
        {"q_hidden", {64, 64}}}},
      {"driver",
       {{"max_iterations", nullptr},
        {"samples_per_var", nullptr},
        {"max_attempts", 5},
        {"follow_cap", 32},
        {"episodes_per_sample", 4},
        {"adaptation_steps", 50000},
        {"recollect_bootstrap", true}}},
      {"ablation", {{"mode", "none"}, {"dropout_ratio", 0.0}}},
      {"eval", {{"episodes", 1000}}},
      {"seed", 0},
      {"out_dir", "runs/cdhrl"},
  };
}

namespace {

void merge(json& base, const json& user, const std::string& path) {
  if (!user.is_object()) throw ConfigError("config section '" + path + "' must be an object");
  for (auto it = user.begin(); it != user.end(); ++it) {
    const std::string key = path.empty() ? it.key() : path + "." + it.key();
    if (!base.contains(it.key())) throw ConfigError("unknown config key '" + key + "'");
    json& slot = base[it.key()];
    if (slot.is_object()) {
      merge(slot, it.value(), key);
    } else {
      slot = it.value();
    }
  }
}

template <typename T>
T get(const json& j, const char* section, const char* key) {
  try {
    return j.at(section).at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError(std::string("config key '") + section + "." + key + "' has the wrong type");
  }
}

AblationMode parse_mode(const std::string& s) {
  if (s == "none") return AblationMode::None;
  if (s == "random_intervention") return AblationMode::RandomIntervention;
  if (s == "ev_dropout") return AblationMode::EvDropout;
  throw ConfigError("unknown ablation.mode '" + s + "'");
}

}  // namespace

void apply_override(json& j, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) {
    throw ConfigError("override '" + assignment + "' is not key=value");
  }
  const std::string key = assignment.substr(0, eq);
  const std::string text = assignment.substr(eq + 1);
  json value = json::parse(text, nullptr, false);
  if (value.is_discarded()) value = text;
  json* node = &j;
  std::size_t start = 0;
  while (true) {
    const auto dot = key.find('.', start);
    const std::string part = key.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
    if (part.empty()) throw ConfigError("override key '" + key + "' is malformed");
    if (!node->is_object()) *node = json::object();
    if (dot == std::string::npos) {
      (*node)[part] = value;
      return;
    }
    node = &(*node)[part];
    start = dot + 1;
  }
}

RunConfig parse_config(const json& user) {
  json j = default_config_json();
  merge(j, user, "");

  RunConfig c;
  c.env.name = get<std::string>(j, "env", "name");
  const bool mini = c.env.name == "minicraft";
  if (!mini && c.env.name != "chaincraft") throw ConfigError("unknown env.name '" + c.env.name + "'");

  try {
    c.seed = j.at("seed").get<std::uint64_t>();
    c.out_dir = j.at("out_dir").get<std::string>();
  } catch (const json::exception&) {
    throw ConfigError("seed must be a non-negative integer and out_dir a string");
  }
  if (j["env"]["seed"].is_null()) j["env"]["seed"] = c.seed;
  if (j["env"]["episode_length"].is_null()) j["env"]["episode_length"] = mini ? 200 : 64;
  if (j["driver"]["samples_per_var"].is_null()) j["driver"]["samples_per_var"] = mini ? 2048 : 512;

  auto& ch = c.env.chain;
  ch.chain_length = get<int>(j, "env", "chain_length");
  ch.cardinality = get<int>(j, "env", "cardinality");
  ch.success_prob = get<double>(j, "env", "success_prob");
  ch.episode_length = get<int>(j, "env", "episode_length");
  ch.distractor_count = get<int>(j, "env", "distractor_count");
  ch.distractor_cardinality = get<int>(j, "env", "distractor_cardinality");
  ch.distractor_move_prob = get<double>(j, "env", "distractor_move_prob");
  ch.seed = get<std::uint64_t>(j, "env", "seed");
  auto& mc = c.env.mini;
  mc.grid_size = get<int>(j, "env", "grid_size");
  mc.episode_length = ch.episode_length;
  mc.weather_cardinality = get<int>(j, "env", "weather_cardinality");
  mc.weather_move_prob = get<double>(j, "env", "weather_move_prob");
  mc.seed = ch.seed;
  c.env.hidden_vars = get<std::vector<std::string>>(j, "env", "hidden_vars");
  if (ch.cardinality < 2 || ch.distractor_cardinality < 2 || mc.weather_cardinality < 2) {
    throw ConfigError("variable cardinalities must be at least 2");
  }
  if (ch.distractor_move_prob < 0.0 || ch.distractor_move_prob > 1.0 ||
      mc.weather_move_prob < 0.0 || mc.weather_move_prob > 1.0) {
    throw ConfigError("distractor move probabilities must lie in [0, 1]");
  }

  c.scm.T = get<int>(j, "scm", "T");
  c.scm.Fs = get<int>(j, "scm", "Fs");
  c.scm.Qs = get<int>(j, "scm", "Qs");
  c.scm.K = get<int>(j, "scm", "K");
  c.scm.batch = get<int>(j, "scm", "batch");
  c.scm.edge_threshold = get<double>(j, "scm", "edge_threshold");
  c.scm.lr_theta = get<double>(j, "scm", "lr_theta");
  c.scm.lr_eta = get<double>(j, "scm", "lr_eta");
  c.scm.hidden = get<int>(j, "scm", "hidden");
  c.scm.holdout = get<double>(j, "scm", "holdout");
  c.scm.sparsity = get<double>(j, "scm", "sparsity");
  c.scm.validate();

  c.hrl.epsilon = get<double>(j, "hrl", "epsilon");
  c.hrl.batch = get<int>(j, "hrl", "batch");
  c.hrl.H = get<int>(j, "hrl", "H");
  c.hrl.gamma_goal = get<double>(j, "hrl", "gamma_goal");
  c.hrl.gamma_task = get<double>(j, "hrl", "gamma_task");
  c.hrl.lr = get<double>(j, "hrl", "lr");
  c.hrl.phi = get<double>(j, "hrl", "phi");
  c.hrl.T_goal = get<long>(j, "hrl", "T_goal");
  c.hrl.target_sync = get<int>(j, "hrl", "target_sync");
  c.hrl.replay = get<int>(j, "hrl", "replay");
  c.hrl.eval_episodes = get<int>(j, "hrl", "eval_episodes");
  c.hrl.q_hidden = get<std::vector<int>>(j, "hrl", "q_hidden");
  c.hrl.validate();

  c.driver.samples_per_var = get<int>(j, "driver", "samples_per_var");
  c.driver.max_attempts = get<int>(j, "driver", "max_attempts");
  c.driver.follow_cap = get<int>(j, "driver", "follow_cap");
  c.driver.episodes_per_sample = get<int>(j, "driver", "episodes_per_sample");
  c.driver.adaptation_steps = get<long>(j, "driver", "adaptation_steps");
  c.driver.recollect_bootstrap = get<bool>(j, "driver", "recollect_bootstrap");
  if (c.driver.samples_per_var < 1 || c.driver.max_attempts < 1 || c.driver.follow_cap < 1 ||
      c.driver.episodes_per_sample < 1 || c.driver.adaptation_steps < 0) {
    throw ConfigError("driver counts must be positive");
  }

  c.ablation.mode = parse_mode(get<std::string>(j, "ablation", "mode"));
  c.ablation.dropout_ratio = get<double>(j, "ablation", "dropout_ratio");
  if (c.ablation.dropout_ratio < 0.0 || c.ablation.dropout_ratio > 1.0) {
    throw ConfigError("ablation.dropout_ratio must lie in [0, 1]");
  }
  c.eval_episodes = get<int>(j, "eval", "episodes");
  if (c.eval_episodes < 0) throw ConfigError("eval.episodes must be non-negative");

  // Worlds validate their own parameters; the variable count fixes the
  // iteration cap default.
  std::unique_ptr<Environment> env;
  try {
    env = make_environment(c);
  } catch (const std::exception& e) {
    throw ConfigError(std::string("invalid environment: ") + e.what());
  }
  if (j["driver"]["max_iterations"].is_null()) j["driver"]["max_iterations"] = 2 * env->schema().size();
  c.driver.max_iterations = get<int>(j, "driver", "max_iterations");
  if (c.driver.max_iterations < 0) throw ConfigError("driver.max_iterations must be non-negative");

  c.echo = j;
  return c;
}

RunConfig load_config(const std::optional<std::string>& path,
                      const std::vector<std::string>& overrides) {
  json user = json::object();
  if (path) {
    std::ifstream in(*path);
    if (!in) throw ConfigError("cannot read config file " + *path);
    std::stringstream ss;
    ss << in.rdbuf();
    user = json::parse(ss.str(), nullptr, false);
    if (user.is_discarded()) throw ConfigError("config file " + *path + " is not valid JSON");
  }
  for (const auto& o : overrides) apply_override(user, o);
  return parse_config(user);
}

std::unique_ptr<Environment> make_base_environment(const RunConfig& cfg) {
  if (cfg.env.name == "minicraft") return std::make_unique<MiniCraft>(cfg.env.mini);
  return std::make_unique<ChainCraft>(cfg.env.chain);
}

std::unique_ptr<Environment> make_environment(const RunConfig& cfg) {
  auto base = make_base_environment(cfg);
  if (cfg.env.hidden_vars.empty()) return base;
  const EnvVarSchema& schema = base->schema();
  std::vector<bool> hide(schema.size(), false);
  for (const auto& name : cfg.env.hidden_vars) {
    const auto id = schema.find(name);
    if (!id) throw SchemaError("hidden variable '" + name + "' is not in the schema");
    if (*id == schema.action_id()) throw SchemaError("the Action variable cannot be hidden");
    hide[*id] = true;
  }
  std::vector<int> visible;
  for (int i = 0; i < schema.size(); ++i) {
    if (!hide[i]) visible.push_back(i);
  }
  return std::make_unique<MaskedEnvironment>(std::move(base), visible);
}

}  // namespace cdhrl
