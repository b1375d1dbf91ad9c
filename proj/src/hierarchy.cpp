#include <algorithm>
#include <functional>

#include "cdhrl/hrl.hpp"

namespace cdhrl {

void HrlHyper::validate() const {
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw nn::ConfigError("hrl.epsilon must lie in (0, 1)");
  if (H < 1) throw nn::ConfigError("hrl.H must be at least 1");
  if (batch < 1) throw nn::ConfigError("hrl.batch must be positive");
  if (!(phi > 0.0 && phi < 1.0)) throw nn::ConfigError("hrl.phi must lie in (0, 1)");
  if (!(gamma_goal > 0.0 && gamma_goal < 1.0) || !(gamma_task > 0.0 && gamma_task < 1.0)) {
    throw nn::ConfigError("discount factors must lie in (0, 1)");
  }
  if (!(lr > 0.0)) throw nn::ConfigError("hrl.lr must be positive");
  if (T_goal < 0 || target_sync < 1 || replay < 1 || eval_episodes < 0) {
    throw nn::ConfigError("hrl step counts must be non-negative");
  }
  for (int d : q_hidden) {
    if (d < 1) throw nn::ConfigError("hrl.q_hidden sizes must be positive");
  }
}

void ReplayBuffer::push(ReplayTuple t) {
  if (size() < capacity_) {
    items_.push_back(std::move(t));
  } else {
    items_[next_] = std::move(t);
    next_ = (next_ + 1) % capacity_;
  }
}

void ReplayBuffer::erase_goal(int goal) {
  std::erase_if(items_, [goal](const ReplayTuple& t) { return t.goal == goal; });
  next_ = 0;
}

std::optional<int> LevelPolicy::goal_index(const Subgoal& g) const {
  for (int i = 0; i < static_cast<int>(goals.size()); ++i) {
    if (goals[i].goal == g) return i;
  }
  return std::nullopt;
}

bool LevelPolicy::has_active_goals() const {
  return std::any_of(goals.begin(), goals.end(), [](const LevelGoal& g) { return g.active; });
}

std::optional<std::pair<int, int>> SubgoalHierarchy::locate(const Subgoal& g) const {
  for (int k = 0; k < level_count(); ++k) {
    if (auto i = levels[k].goal_index(g); i && levels[k].goals[*i].active) return std::pair{k, *i};
  }
  return std::nullopt;
}

std::vector<Subgoal> SubgoalHierarchy::active_goals() const {
  std::vector<Subgoal> out;
  for (const auto& level : levels) {
    for (const auto& g : level.goals) {
      if (g.active) out.push_back(g.goal);
    }
  }
  return out;
}

nlohmann::json SubgoalHierarchy::to_json() const {
  nlohmann::json lv = nlohmann::json::array();
  for (const auto& level : levels) {
    nlohmann::json goals = nlohmann::json::array();
    for (const auto& g : level.goals) {
      if (!g.active) continue;
      goals.push_back({{"var", g.goal.var},
                       {"name", schema[g.goal.var].name},
                       {"change", to_string(g.goal.change)},
                       {"success_ratio", g.success_ratio}});
    }
    lv.push_back({{"depth", level.depth}, {"goals", goals}});
  }
  return {{"levels", lv}};
}

SubgoalHierarchy make_hierarchy(const EnvVarSchema& schema) {
  SubgoalHierarchy h;
  h.schema = schema;
  h.depth_of[schema.action_id()] = 0;
  return h;
}

std::map<int, int> variable_depths(const CausalGraph& graph, const Eigen::MatrixXd& sigma,
                                   int action_id) {
  const CausalGraph dag = prune_cycles(graph, sigma);
  const int m = dag.size();
  std::vector<bool> reach = dag.descendants(action_id);
  std::vector<int> memo(m, -1);
  std::function<int(int)> depth = [&](int v) -> int {
    if (v == action_id) return 0;
    if (memo[v] >= 0) return memo[v];
    int best = 0;
    for (int p : dag.parents(v)) {
      if (p == action_id || reach[p]) best = std::max(best, depth(p));
    }
    return memo[v] = best + 1;
  };
  std::map<int, int> out;
  out[action_id] = 0;
  for (int v = 0; v < m; ++v) {
    if (v != action_id && reach[v]) out[v] = depth(v);
  }
  return out;
}

std::vector<LevelAction> action_space_for(const Subgoal& g, const CausalGraph& graph,
                                          int action_id, int primitive_count) {
  std::vector<LevelAction> out;
  for (int p : graph.parents(g.var)) {
    if (p == action_id) continue;
    out.push_back({true, 0, {p, ChangeKind::Increase}});
    out.push_back({true, 0, {p, ChangeKind::Decrease}});
  }
  for (int a = 0; a < primitive_count; ++a) out.push_back({false, a, {}});
  return out;
}

namespace {

std::vector<int> net_dims(int inputs, const std::vector<int>& hidden, int outputs) {
  std::vector<int> dims{inputs};
  dims.insert(dims.end(), hidden.begin(), hidden.end());
  dims.push_back(outputs);
  return dims;
}

}  // namespace

void build_or_extend_hierarchy(SubgoalHierarchy& h, const CausalGraph& graph,
                               const std::set<int>& candidates, int primitive_count,
                               const HrlHyper& hyper, Rng& rng) {
  const int action_id = h.schema.action_id();
  for (int v : candidates) {
    int d = 0;
    for (int p : graph.parents(v)) {
      auto it = h.depth_of.find(p);
      if (it == h.depth_of.end()) throw GraphError("candidate parent has no depth");
      d = std::max(d, it->second);
    }
    if (graph.parents(v).empty()) throw GraphError("candidate without parents");
    d += 1;
    h.depth_of[v] = d;
    while (h.level_count() < d) {
      LevelPolicy level;
      level.depth = h.level_count() + 1;
      level.replay = ReplayBuffer(hyper.replay);
      h.levels.push_back(std::move(level));
    }
    LevelPolicy& level = h.levels[d - 1];
    const int goals_before = static_cast<int>(level.goals.size());
    const int actions_before = static_cast<int>(level.actions.size());
    for (ChangeKind change : {ChangeKind::Increase, ChangeKind::Decrease}) {
      const Subgoal g{v, change};
      auto idx = level.goal_index(g);
      if (idx && level.goals[*idx].active) continue;
      std::vector<int> allowed;
      for (const auto& a : action_space_for(g, graph, action_id, primitive_count)) {
        auto it = std::find(level.actions.begin(), level.actions.end(), a);
        if (it == level.actions.end()) {
          level.actions.push_back(a);
          allowed.push_back(static_cast<int>(level.actions.size()) - 1);
        } else {
          allowed.push_back(static_cast<int>(it - level.actions.begin()));
        }
      }
      if (idx) {
        level.goals[*idx].allowed = allowed;
        level.goals[*idx].active = true;
        level.goals[*idx].success_ratio = 0.0;
      } else {
        level.goals.push_back({g, allowed, 0.0, true});
      }
    }
    const int new_goals = static_cast<int>(level.goals.size()) - goals_before;
    const int new_actions = static_cast<int>(level.actions.size()) - actions_before;
    if (level.q.dims.empty()) {
      level.q = nn::make_net(net_dims(h.schema.one_hot_width() + static_cast<int>(level.goals.size()),
                                      hyper.q_hidden, static_cast<int>(level.actions.size())),
                             nn::Head::Values, rng);
      level.adam = nn::AdamState::for_net(level.q);
    } else {
      if (new_goals > 0) nn::grow_inputs(level.q, level.adam, new_goals);
      if (new_actions > 0) nn::grow_outputs(level.q, level.adam, new_actions, rng);
    }
    level.target = level.q;
  }
}

void remove_variables(SubgoalHierarchy& h, const std::set<int>& vars) {
  for (auto& level : h.levels) {
    for (int i = 0; i < static_cast<int>(level.goals.size()); ++i) {
      if (vars.contains(level.goals[i].goal.var) && level.goals[i].active) {
        level.goals[i].active = false;
        level.replay.erase_goal(i);
      }
    }
  }
  for (int v : vars) h.depth_of.erase(v);
  while (!h.levels.empty() && !h.levels.back().has_active_goals()) h.levels.pop_back();
}

std::set<int> verify_controllable(const std::map<Subgoal, double>& ratios, double threshold) {
  std::set<int> out;
  for (const auto& [g, r] : ratios) {
    if (r > threshold) out.insert(g.var);
  }
  return out;
}

}  // namespace cdhrl
