#include <algorithm>

#include "cdhrl/worlds.hpp"

namespace cdhrl {

namespace {

EnvVarSchema chain_schema(const ChainCraftConfig& c) {
  if (c.chain_length < 1) throw SchemaError("chain_length must be at least 1");
  if (c.distractor_count < 0) throw SchemaError("distractor_count must be non-negative");
  if (c.episode_length < 1) throw SchemaError("episode_length must be positive");
  if (c.success_prob < 0.0 || c.success_prob > 1.0) {
    throw SchemaError("success_prob must lie in [0, 1]");
  }
  std::vector<VarSpec> vars;
  vars.push_back({0, "Action", c.chain_length + 1, VarKind::Action});
  for (int k = 0; k < c.chain_length; ++k) {
    vars.push_back({1 + k, "V" + std::to_string(k), c.cardinality, VarKind::Item});
  }
  for (int d = 0; d < c.distractor_count; ++d) {
    vars.push_back({1 + c.chain_length + d, "D" + std::to_string(d),
                    c.distractor_cardinality, VarKind::Distractor});
  }
  return EnvVarSchema(std::move(vars));
}

}  // namespace

ChainCraft::ChainCraft(ChainCraftConfig config)
    : config_(config), schema_(chain_schema(config)), rng_(config.seed) {
  reset(config.seed);
  total_steps_ = 0;
}

Observation ChainCraft::reset(std::uint64_t seed) {
  rng_.seed(seed);
  values_.assign(schema_.size(), 0);
  values_[0] = noop();
  for (int d = 0; d < config_.distractor_count; ++d) {
    values_[distractor_var(d)] = uniform_int(rng_, config_.distractor_cardinality);
  }
  step_count_ = 0;
  milestones_ = 0;
  refresh_observation();
  return obs_;
}

StepResult ChainCraft::step(int action) {
  if (action < 0 || action > noop()) throw SchemaError("action out of range");
  if (action < config_.chain_length) {
    const int k = action;
    const bool enabled = k == 0 || values_[chain_var(k - 1)] >= 1;
    if (enabled && (config_.success_prob >= 1.0 || bernoulli(rng_, config_.success_prob))) {
      int& v = values_[chain_var(k)];
      v = std::min(v + 1, config_.cardinality - 1);
    }
  }
  for (int d = 0; d < config_.distractor_count; ++d) {
    if (!bernoulli(rng_, config_.distractor_move_prob)) continue;
    int& v = values_[distractor_var(d)];
    const int top = config_.distractor_cardinality - 1;
    int next = v + (uniform01(rng_) < 0.5 ? -1 : 1);
    if (next < 0) next = 1;
    if (next > top) next = top - 1;
    v = next;
  }
  values_[0] = action;
  ++step_count_;
  ++total_steps_;
  const int flags = std::min(kMilestoneCount, config_.chain_length);
  for (int k = 0; k < flags; ++k) {
    if (values_[chain_var(k)] >= 1) milestones_ |= 1u << k;
  }
  refresh_observation();
  return {obs_, step_count_ >= config_.episode_length};
}

CausalGraph ChainCraft::ground_truth_graph() const {
  CausalGraph g(schema_.size());
  for (int k = 0; k < config_.chain_length; ++k) {
    g.set_edge(chain_var(k), 0);
    if (k > 0) g.set_edge(chain_var(k), chain_var(k - 1));
  }
  return g;
}

bool ChainCraft::task_achieved() const {
  return values_[chain_var(config_.chain_length - 1)] >= 1;
}

std::unique_ptr<Environment> ChainCraft::clone() const {
  return std::make_unique<ChainCraft>(*this);
}

void ChainCraft::set_state(const VarVector& x) {
  schema_.check(x);
  values_ = x;
  refresh_observation();
}

void ChainCraft::refresh_observation() {
  obs_.fields = values_;
  obs_.fields.push_back(step_count_);
}

}  // namespace cdhrl
