#pragma once

// Task-level controller trained on sparse extrinsic reward over frozen subgoals.

#include <array>
#include <cstdint>
#include <vector>

#include "cdhrl/hrl.hpp"

namespace cdhrl {

struct TaskPolicy {
  std::vector<LevelAction> actions;  // verified subgoals of every level, then primitives
  nn::DenseNet q;
  nn::DenseNet target;
  nn::AdamState adam;
  ReplayBuffer replay;
  long updates = 0;
};

TaskPolicy make_task_policy(const SubgoalHierarchy& h, int primitive_count,
                            const HrlHyper& hyper, Rng& rng);

int select_task_action(const SubgoalHierarchy& h, const TaskPolicy& p, const VarVector& x,
                       double epsilon, Rng& rng);

struct EpisodeRecord {
  int episode = 0;
  long env_steps = 0;
  double reward = 0.0;
  std::uint32_t milestones = 0;
};

struct AdaptationResult {
  TaskPolicy policy;
  std::vector<EpisodeRecord> curve;
  long env_steps = 0;
};

AdaptationResult run_adaptation(Environment& env, const SubgoalHierarchy& h, const HrlHyper& hyper,
                                long steps, Rng& rng);

// Greedy task-policy episodes; counts the episodes reaching each milestone.
std::array<int, kMilestoneCount> eval_milestones(Environment& env, const SubgoalHierarchy& h,
                                                 const TaskPolicy& p, const HrlHyper& hyper,
                                                 int episodes, Rng& rng);

// A single level holding every goal of the goal space, acting with primitives only.
SubgoalHierarchy make_flat_hierarchy(const EnvVarSchema& schema, int primitive_count,
                                     const HrlHyper& hyper, Rng& rng);

}  // namespace cdhrl
