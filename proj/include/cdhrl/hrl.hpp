#pragma once

// Multi-level goal-conditioned Q-learning over environment-variable subgoals.

#include <functional>
#include <map>
#include <optional>
#include <set>
#include <vector>

#include <json.hpp>

#include "cdhrl/causal_graph.hpp"
#include "cdhrl/env.hpp"
#include "cdhrl/numeric.hpp"
#include "cdhrl/random.hpp"

namespace cdhrl {

struct HrlHyper {
  double epsilon = 0.05;
  int batch = 128;
  int H = 8;
  double gamma_goal = 0.9;
  double gamma_task = 0.95;
  double lr = 1e-4;
  double phi = 0.6;
  long T_goal = 10000;
  int target_sync = 200;
  int replay = 50000;
  int eval_episodes = 100;
  std::vector<int> q_hidden{64, 64};

  void validate() const;
};

// One output unit of a level network: a primitive action or a lower-level subgoal.
struct LevelAction {
  bool is_subgoal = false;
  int primitive = 0;
  Subgoal goal;

  bool operator==(const LevelAction&) const = default;
};

struct ReplayTuple {
  VarVector x_t;
  int goal = 0;    // index into the level's goal list
  int action = 0;  // index into the level's action list
  double reward = 0.0;
  VarVector x_t1;
  bool done = false;
};

class ReplayBuffer {
 public:
  ReplayBuffer() : ReplayBuffer(50000) {}
  explicit ReplayBuffer(int capacity) : capacity_(capacity) {}

  void push(ReplayTuple t);
  int size() const { return static_cast<int>(items_.size()); }
  int capacity() const { return capacity_; }
  const ReplayTuple& operator[](int i) const { return items_[i]; }
  void erase_goal(int goal);

 private:
  int capacity_;
  std::vector<ReplayTuple> items_;
  int next_ = 0;
};

struct LevelGoal {
  Subgoal goal;
  std::vector<int> allowed;  // indices into LevelPolicy::actions
  double success_ratio = 0.0;
  bool active = true;
};

struct LevelPolicy {
  int depth = 1;
  std::vector<LevelGoal> goals;
  std::vector<LevelAction> actions;
  nn::DenseNet q;
  nn::DenseNet target;
  nn::AdamState adam;
  ReplayBuffer replay;
  long updates = 0;

  std::optional<int> goal_index(const Subgoal& g) const;
  bool has_active_goals() const;
};

struct SubgoalHierarchy {
  EnvVarSchema schema;
  std::vector<LevelPolicy> levels;  // levels[k] has depth k + 1
  std::map<int, int> depth_of;      // placed variables only; Action is 0

  int level_count() const { return static_cast<int>(levels.size()); }
  // (level index, goal index) of an active goal.
  std::optional<std::pair<int, int>> locate(const Subgoal& g) const;
  std::vector<Subgoal> active_goals() const;
  nlohmann::json to_json() const;
};

SubgoalHierarchy make_hierarchy(const EnvVarSchema& schema);

// Longest-path depth from the Action node over the cycle-pruned graph.
std::map<int, int> variable_depths(const CausalGraph& graph, const Eigen::MatrixXd& sigma,
                                   int action_id);

std::vector<LevelAction> action_space_for(const Subgoal& g, const CausalGraph& graph,
                                          int action_id, int primitive_count);

// Places both change-subgoals of every candidate one level above its deepest
// parent, growing networks as needed.
void build_or_extend_hierarchy(SubgoalHierarchy& h, const CausalGraph& graph,
                               const std::set<int>& candidates, int primitive_count,
                               const HrlHyper& hyper, Rng& rng);

// Deactivates the goals of `vars` and drops trailing levels left empty.
void remove_variables(SubgoalHierarchy& h, const std::set<int>& vars);

std::set<int> verify_controllable(const std::map<Subgoal, double>& ratios, double threshold);

// Encoded network input [one-hot x | one-hot goal].
Eigen::VectorXd policy_input(const SubgoalHierarchy& h, const LevelPolicy& level,
                             const VarVector& x, int goal);

int select_action(const SubgoalHierarchy& h, const LevelPolicy& level, const VarVector& x,
                  int goal, double epsilon, Rng& rng);

// One DQN minibatch update; returns the loss, or a negative value if the
// replay is still smaller than the batch.
double q_update(const SubgoalHierarchy& h, LevelPolicy& level, const HrlHyper& hyper, Rng& rng);

// A decision taken at some level while executing a goal.
struct LevelTransition {
  int level = 0;
  VarVector x_t;
  int goal = 0;
  int action = 0;
  VarVector x_t1;
  bool horizon_end = false;
};

struct ExecutionResult {
  std::vector<Transition> primitive;
  std::vector<LevelTransition> decisions;
  bool success = false;
  long steps = 0;
  bool env_done = false;
};

struct ExecutionOptions {
  int explore_level = -1;  // epsilon-greedy only at this level index
  double epsilon = 0.0;
};

ExecutionResult execute_subgoal(Environment& env, const SubgoalHierarchy& h, const Subgoal& g,
                                long fuel, const HrlHyper& hyper, Rng& rng,
                                ExecutionOptions options = {});

// Original-goal tuples plus hindsight tuples for every goal whose change fired.
std::vector<ReplayTuple> her_relabel(const std::vector<LevelTransition>& traj,
                                     const std::vector<Subgoal>& goals,
                                     const std::function<bool(int goal, int action)>& valid = {});

struct TrainingReport {
  std::map<Subgoal, double> success;
  long train_steps = 0;
  long eval_steps = 0;
};

// Trains the active goals of level index k, then evaluates each greedily.
TrainingReport train_level_goals(Environment& env, SubgoalHierarchy& h, int k,
                                 const HrlHyper& hyper, Rng& rng);

double evaluate_goal(Environment& env, const SubgoalHierarchy& h, const Subgoal& g,
                     const HrlHyper& hyper, Rng& rng, long* steps = nullptr);

}  // namespace cdhrl
