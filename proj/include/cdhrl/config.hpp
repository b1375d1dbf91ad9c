#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "cdhrl/hrl.hpp"
#include "cdhrl/scm.hpp"
#include "cdhrl/worlds.hpp"

namespace cdhrl {

struct EnvConfig {
  std::string name = "chaincraft";
  ChainCraftConfig chain;
  MiniCraftConfig mini;
  // Variable names withheld from the agent (dynamics unchanged).
  std::vector<std::string> hidden_vars;
};

struct DriverConfig {
  int max_iterations = 0;  // resolved; 2 * M when left null
  int samples_per_var = 512;
  int max_attempts = 5;
  int follow_cap = 32;
  int episodes_per_sample = 4;
  long adaptation_steps = 50000;
  bool recollect_bootstrap = true;
};

enum class AblationMode { None, RandomIntervention, EvDropout };

struct AblationConfig {
  AblationMode mode = AblationMode::None;
  double dropout_ratio = 0.0;
};

struct RunConfig {
  EnvConfig env;
  ScmHyper scm;
  HrlHyper hrl;
  DriverConfig driver;
  AblationConfig ablation;
  int eval_episodes = 1000;
  std::uint64_t seed = 0;
  std::string out_dir = "runs/cdhrl";

  // Fully resolved JSON form (written as config-echo.json).
  nlohmann::json echo;
};

nlohmann::json default_config_json();

// Sets a dotted key; the value is parsed as JSON, falling back to a string.
void apply_override(nlohmann::json& j, const std::string& assignment);

// Merges `user` over the defaults, rejects unknown keys and resolves the
// environment-dependent defaults. Throws nn::ConfigError.
RunConfig parse_config(const nlohmann::json& user);

RunConfig load_config(const std::optional<std::string>& path,
                      const std::vector<std::string>& overrides);

std::unique_ptr<Environment> make_base_environment(const RunConfig& cfg);
// Applies hidden_vars on top of the base world.
std::unique_ptr<Environment> make_environment(const RunConfig& cfg);

}  // namespace cdhrl
