#pragma once

// Entry points behind the command-line tool.

#include <array>
#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

#include "cdhrl/config.hpp"
#include "cdhrl/driver.hpp"
#include "cdhrl/task_policy.hpp"

namespace cdhrl {

struct RunSummary {
  PretrainResult pretrain;
  SubgoalHierarchy hierarchy;
  TaskPolicy task;
  long pretrain_steps = 0;
  long adaptation_steps = 0;
  CausalGraph truth;
};

struct RunOptions {
  bool adapt = true;
  bool write_files = true;
};

// Pretraining, adaptation and every run-directory artifact under cfg.out_dir.
RunSummary cli_run(const RunConfig& cfg, std::ostream& log, RunOptions options = {});

struct AblationSummary {
  std::vector<int> shd_policy, shd_random, sid_policy, sid_random;  // padded to equal length
  double mean_shd_policy = 0, mean_shd_random = 0, mean_sid_policy = 0, mean_sid_random = 0;
};

// Pads the shorter series by repeating its last value.
void pad_series(std::vector<int>& a, std::vector<int>& b);

AblationSummary ablate_random_intervention(const RunConfig& cfg, std::ostream& log);

// ceil(ratio * effective count) randomly chosen item/state variables.
std::vector<std::string> choose_dropout(const EnvVarSchema& schema, double ratio, std::uint64_t seed);

RunSummary ablate_ev_dropout(RunConfig cfg, double ratio, std::ostream& log);

enum class GraphWhich { Truth, Learned };
enum class GraphFormat { Dot, Json };

std::string export_graph(const RunConfig& cfg, GraphWhich which, GraphFormat format);

std::array<int, kMilestoneCount> eval_milestones_from_run(const std::filesystem::path& run_dir,
                                                          int episodes, std::ostream& log);

// Flat agent: the task policy over primitive actions alone, trained for
// `budget` env steps on the sparse task reward.
std::array<int, kMilestoneCount> flat_baseline_milestones(const RunConfig& cfg, long budget,
                                                          int episodes);
// Single-level agent trained on every goal of the goal space for `goal_budget`
// steps, then adapted like the hierarchical agent.
std::array<int, kMilestoneCount> uniform_goal_milestones(const RunConfig& cfg, long goal_budget,
                                                         int episodes);

}  // namespace cdhrl
