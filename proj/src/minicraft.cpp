#include <algorithm>

#include "cdhrl/worlds.hpp"

namespace cdhrl {

namespace {

EnvVarSchema mini_schema(const MiniCraftConfig& c) {
  if (c.grid_size < 3) throw SchemaError("grid_size must be at least 3");
  if (c.episode_length < 1) throw SchemaError("episode_length must be positive");
  return EnvVarSchema({
      {MiniCraft::kAction, "Action", MiniCraft::kActionCount, VarKind::Action},
      {MiniCraft::kWood, "Wood", 2, VarKind::Item},
      {MiniCraft::kStick, "Stick", 2, VarKind::Item},
      {MiniCraft::kStonePickaxe, "StonePickaxe", 2, VarKind::Item},
      {MiniCraft::kIronOre, "IronOre", 2, VarKind::Item},
      {MiniCraft::kDiamond, "Diamond", 2, VarKind::Item},
      {MiniCraft::kWeather, "Weather", c.weather_cardinality, VarKind::Distractor},
      {MiniCraft::kGold, "Gold", 2, VarKind::Distractor},
  });
}

}  // namespace

MiniCraft::MiniCraft(MiniCraftConfig config)
    : config_(config), schema_(mini_schema(config)) {
  const int n = config_.grid_size;
  grid_.assign(n * n, Tile::Empty);
  Rng layout(config_.seed ^ 0x6d696e6963726166ull);
  const Tile stations[] = {Tile::Tree, Tile::Tree, Tile::Workspace, Tile::Furnace, Tile::Iron};
  for (Tile t : stations) {
    int cell;
    do {
      cell = uniform_int(layout, n * n);
    } while (grid_[cell] != Tile::Empty);
    grid_[cell] = t;
  }
  reset(config_.seed);
  total_steps_ = 0;
}

std::pair<int, int> MiniCraft::find_tile(Tile t) const {
  const int n = config_.grid_size;
  for (int c = 0; c < n * n; ++c) {
    if (grid_[c] == t) return {c % n, c / n};
  }
  return {-1, -1};
}

Observation MiniCraft::reset(std::uint64_t seed) {
  rng_.seed(seed);
  const int n = config_.grid_size;
  int cell;
  do {
    cell = uniform_int(rng_, n * n);
  } while (grid_[cell] != Tile::Empty);
  ax_ = cell % n;
  ay_ = cell / n;
  values_.assign(kVarCount, 0);
  values_[kAction] = Up;
  values_[kWeather] = uniform_int(rng_, config_.weather_cardinality);
  step_count_ = 0;
  milestones_ = 0;
  refresh_observation();
  return obs_;
}

StepResult MiniCraft::step(int action) {
  if (action < 0 || action >= kActionCount) throw SchemaError("action out of range");
  const int n = config_.grid_size;
  const Tile here = tile(ax_, ay_);
  switch (action) {
    case Up: ay_ = std::max(0, ay_ - 1); break;
    case Down: ay_ = std::min(n - 1, ay_ + 1); break;
    case Left: ax_ = std::max(0, ax_ - 1); break;
    case Right: ax_ = std::min(n - 1, ax_ + 1); break;
    case Pick:
      if (here == Tile::Tree) {
        values_[kWood] = 1;
      } else if (here == Tile::Iron && values_[kStonePickaxe] >= 1) {
        values_[kIronOre] = 1;
      }
      break;
    case Craft:
      if (here == Tile::Workspace) {
        if (values_[kStick] >= 1 && values_[kStonePickaxe] == 0) {
          values_[kStonePickaxe] = 1;
        } else if (values_[kWood] >= 1 && values_[kStick] == 0) {
          values_[kStick] = 1;
        }
      } else if (here == Tile::Furnace && values_[kIronOre] >= 1) {
        values_[kDiamond] = 1;
      }
      break;
  }
  if (bernoulli(rng_, config_.weather_move_prob)) {
    const int top = config_.weather_cardinality - 1;
    int next = values_[kWeather] + (uniform01(rng_) < 0.5 ? -1 : 1);
    if (next < 0) next = 1;
    if (next > top) next = top - 1;
    values_[kWeather] = next;
  }
  values_[kAction] = action;
  ++step_count_;
  ++total_steps_;
  for (int k = 0; k < kMilestoneCount; ++k) {
    if (values_[kWood + k] >= 1) milestones_ |= 1u << k;
  }
  refresh_observation();
  return {obs_, step_count_ >= config_.episode_length};
}

CausalGraph MiniCraft::ground_truth_graph() const {
  CausalGraph g(kVarCount);
  for (int v = kWood; v <= kDiamond; ++v) {
    g.set_edge(v, kAction);
    if (v > kWood) g.set_edge(v, v - 1);
  }
  return g;
}

std::unique_ptr<Environment> MiniCraft::clone() const {
  return std::make_unique<MiniCraft>(*this);
}

void MiniCraft::set_state(int x, int y, const VarVector& values) {
  schema_.check(values);
  ax_ = x;
  ay_ = y;
  values_ = values;
  refresh_observation();
}

void MiniCraft::refresh_observation() {
  obs_.fields = values_;
  obs_.fields.push_back(ax_);
  obs_.fields.push_back(ay_);
  obs_.fields.push_back(step_count_);
}

}  // namespace cdhrl
