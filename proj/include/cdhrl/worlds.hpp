#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "cdhrl/env.hpp"
#include "cdhrl/random.hpp"

namespace cdhrl {

// Synthetic recipe chain: craft_k raises V_k when k == 0 or V_{k-1} >= 1.
struct ChainCraftConfig {
  int chain_length = 4;
  int cardinality = 2;
  double success_prob = 1.0;
  int episode_length = 64;
  int distractor_count = 2;
  int distractor_cardinality = 2;
  // Per-step probability that a distractor random-walks by one.
  double distractor_move_prob = 0.1;
  std::uint64_t seed = 0;
};

class ChainCraft final : public Environment {
 public:
  explicit ChainCraft(ChainCraftConfig config);

  Observation reset(std::uint64_t seed) override;
  StepResult step(int action) override;
  const EnvVarSchema& schema() const override { return schema_; }
  CausalGraph ground_truth_graph() const override;
  std::uint32_t milestones() const override { return milestones_; }
  int primitive_action_count() const override { return config_.chain_length + 1; }
  bool task_achieved() const override;
  std::optional<int> final_milestone_var() const override { return chain_var(config_.chain_length - 1); }
  std::unique_ptr<Environment> clone() const override;

  const ChainCraftConfig& config() const { return config_; }
  int noop() const { return config_.chain_length; }
  int chain_var(int k) const { return 1 + k; }
  int distractor_var(int d) const { return 1 + config_.chain_length + d; }

  // Overwrites the chain and distractor values (tests and oracles).
  void set_state(const VarVector& x);

 private:
  void refresh_observation();

  ChainCraftConfig config_;
  EnvVarSchema schema_;
  Rng rng_;
  std::vector<int> values_;  // var_id-indexed, Action slot included
  int step_count_ = 0;
  std::uint32_t milestones_ = 0;
};

// Grid analog of the tech-tree crafting world:
// Wood -> Stick -> StonePickaxe -> IronOre -> Diamond, plus the distractors
// Weather (random walk) and Gold (never obtainable).
struct MiniCraftConfig {
  int grid_size = 7;
  int episode_length = 200;
  int weather_cardinality = 3;
  double weather_move_prob = 0.1;
  std::uint64_t seed = 0;
};

class MiniCraft final : public Environment {
 public:
  enum Action { Up = 0, Down, Left, Right, Pick, Craft, kActionCount };
  enum Var { kAction = 0, kWood, kStick, kStonePickaxe, kIronOre, kDiamond, kWeather, kGold, kVarCount };
  enum class Tile { Empty, Tree, Workspace, Furnace, Iron };

  explicit MiniCraft(MiniCraftConfig config);

  Observation reset(std::uint64_t seed) override;
  StepResult step(int action) override;
  const EnvVarSchema& schema() const override { return schema_; }
  CausalGraph ground_truth_graph() const override;
  std::uint32_t milestones() const override { return milestones_; }
  int primitive_action_count() const override { return kActionCount; }
  bool task_achieved() const override { return values_[kDiamond] >= 1; }
  std::optional<int> final_milestone_var() const override { return kDiamond; }
  std::unique_ptr<Environment> clone() const override;

  Tile tile(int x, int y) const { return grid_[y * config_.grid_size + x]; }
  std::pair<int, int> agent() const { return {ax_, ay_}; }
  std::pair<int, int> find_tile(Tile t) const;
  // Places the agent and inventory directly (tests).
  void set_state(int x, int y, const VarVector& values);

 private:
  void refresh_observation();

  MiniCraftConfig config_;
  EnvVarSchema schema_;
  std::vector<Tile> grid_;
  Rng rng_;
  std::vector<int> values_;
  int ax_ = 0;
  int ay_ = 0;
  int step_count_ = 0;
  std::uint32_t milestones_ = 0;
};

// Exposes only a subset of another world's variables; dynamics unchanged.
class MaskedEnvironment final : public Environment {
 public:
  // `visible` lists inner var ids in the order they are exposed and must
  // contain the Action variable.
  MaskedEnvironment(std::unique_ptr<Environment> inner, std::vector<int> visible);

  Observation reset(std::uint64_t seed) override;
  StepResult step(int action) override;
  VarVector extract_vars(const Observation& obs) const override;
  const EnvVarSchema& schema() const override { return schema_; }
  // Latent projection of the inner graph: X -> Y when a directed path from X
  // to Y exists whose intermediate nodes are all hidden.
  CausalGraph ground_truth_graph() const override;
  std::uint32_t milestones() const override { return inner_->milestones(); }
  int primitive_action_count() const override { return inner_->primitive_action_count(); }
  bool task_achieved() const override { return inner_->task_achieved(); }
  std::optional<int> final_milestone_var() const override;
  std::unique_ptr<Environment> clone() const override;

  const std::vector<int>& visible() const { return visible_; }
  const Environment& inner() const { return *inner_; }

 private:
  std::unique_ptr<Environment> inner_;
  std::vector<int> visible_;
  EnvVarSchema schema_;
};

}  // namespace cdhrl
