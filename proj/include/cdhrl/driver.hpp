#pragma once

// The outer loop: intervention sampling, discovery, hierarchy growth,
// subgoal training and verification, repeated until no new candidates appear.

#include <array>
#include <functional>
#include <string>
#include <vector>

#include <json.hpp>

#include "cdhrl/config.hpp"
#include "cdhrl/hrl.hpp"
#include "cdhrl/scm.hpp"

namespace cdhrl {

VarSet candidate_controllables(const CausalGraph& graph, const VarSet& s_iv);

// Drops edges whose cause is a distractor; graph metrics are scored on this.
CausalGraph without_distractor_causes(const CausalGraph& g, const EnvVarSchema& schema);

struct IterationRecord {
  int iteration = 0;
  long env_steps = 0;
  int shd = 0;
  int sid = -1;  // -1 when the graph is too large
  int n_controllable = 0;
  double mean_subgoal_success = 0.0;
  std::array<int, kMilestoneCount> milestones{};
  double wall_clock_s = 0.0;

  CausalGraph graph;
  Eigen::MatrixXd sigma;
  InterventionDataset data;
  VarSet s_iv;
  VarSet s_cc;
  VarSet s_c;
  nlohmann::json hierarchy;
};

struct PretrainResult {
  SubgoalHierarchy hierarchy;
  CausalGraph graph;
  Eigen::MatrixXd sigma;
  VarSet s_iv;
  std::vector<IterationRecord> history;
  std::vector<nlohmann::json> events;
  long env_steps = 0;
  std::string stop_reason;
};

using IterationHook = std::function<void(const IterationRecord&)>;

PretrainResult run_pretraining(const RunConfig& cfg, Environment& env, Rng& rng,
                               const IterationHook& hook = {});

}  // namespace cdhrl
