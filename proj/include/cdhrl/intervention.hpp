#pragma once

// Interventional data collection: the agent drives a controllable variable to
// a sampled set-point with its subgoals, then explores with random primitive
// actions and records adjacent-step pairs.

#include <string>
#include <vector>

#include <json.hpp>

#include "cdhrl/env.hpp"
#include "cdhrl/hrl.hpp"
#include "cdhrl/scm.hpp"

namespace cdhrl {

struct SamplingOptions {
  int samples = 512;
  int max_attempts = 5;
  // Longest random follow-up recorded after one reset or set-point.
  int follow_cap = 32;
  // Episodes allowed per requested pair before giving up.
  int episodes_per_sample = 4;
};

struct SamplingLog {
  int episodes = 0;
  int failed_setpoints = 0;
  long env_steps = 0;
};

// Random primitive actions from reset; pairs carry the executed action in the
// Action slot of both x_t and x_t1.
std::vector<VarPair> bootstrap_action_data(Environment& env, const SamplingOptions& opt, Rng& rng,
                                           SamplingLog* log = nullptr);

std::vector<VarPair> intervene_on_variable(Environment& env, const SubgoalHierarchy& h,
                                           const HrlHyper& hyper, int target,
                                           const SamplingOptions& opt, Rng& rng,
                                           SamplingLog* log = nullptr);

nlohmann::json pair_record(int target, const VarPair& p);
// One JSON object per line.
std::string dataset_jsonl(const InterventionDataset& data);
InterventionDataset parse_dataset_jsonl(const std::string& text);

}  // namespace cdhrl
