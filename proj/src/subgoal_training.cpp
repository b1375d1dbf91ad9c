#include <algorithm>

#include "cdhrl/hrl.hpp"

namespace cdhrl {

namespace {

struct Frame {
  Subgoal goal;
  VarVector action_start;
};

class Runner {
 public:
  Runner(Environment& env, const SubgoalHierarchy& h, const HrlHyper& hyper, Rng& rng,
         ExecutionOptions options, long fuel)
      : env_(env), h_(h), hyper_(hyper), rng_(rng), options_(options), fuel_(fuel) {}

  bool run(int level_index, int goal) {
    const LevelPolicy& level = h_.levels[level_index];
    const int frame = static_cast<int>(stack_.size());
    stack_.push_back({level.goals[goal].goal, {}});
    const double eps = level_index == options_.explore_level ? options_.epsilon : 0.0;
    bool fired = false;
    for (int t = 0; t < hyper_.H; ++t) {
      if (fuel_ <= 0 || result.env_done) break;
      const VarVector x0 = env_.variables();
      stack_[frame].action_start = x0;
      const int a = select_action(h_, level, x0, goal, eps, rng_);
      const LevelAction& act = level.actions[a];
      if (act.is_subgoal) {
        const auto where = h_.locate(act.goal);
        if (!where) throw GraphError("level action refers to a goal outside the hierarchy");
        run(where->first, where->second);
      } else {
        primitive(act.primitive);
      }
      const VarVector x1 = env_.variables();
      const bool r = goal_reward(level.goals[goal].goal, x0, x1) == 1;
      const bool cut = t + 1 == hyper_.H || fuel_ <= 0 || result.env_done;
      result.decisions.push_back({level_index, x0, goal, a, x1, cut && !r});
      if (r) {
        fired = true;
        break;
      }
      if (unwind_to_ >= 0 && unwind_to_ < frame) break;
    }
    stack_.pop_back();
    if (unwind_to_ >= frame) unwind_to_ = -1;
    return fired;
  }

  ExecutionResult result;

 private:
  void primitive(int a) {
    VarVector x0 = env_.variables();
    const StepResult sr = env_.step(a);
    --fuel_;
    ++result.steps;
    const VarVector x1 = env_.variables();
    result.primitive.push_back({std::move(x0), a, x1, sr.done});
    if (sr.done) result.env_done = true;
    for (int s = 0; s < static_cast<int>(stack_.size()); ++s) {
      if (goal_reward(stack_[s].goal, stack_[s].action_start, x1) == 1) {
        unwind_to_ = s;
        break;
      }
    }
  }

  Environment& env_;
  const SubgoalHierarchy& h_;
  const HrlHyper& hyper_;
  Rng& rng_;
  ExecutionOptions options_;
  long fuel_;
  std::vector<Frame> stack_;
  int unwind_to_ = -1;
};

}  // namespace

ExecutionResult execute_subgoal(Environment& env, const SubgoalHierarchy& h, const Subgoal& g,
                                long fuel, const HrlHyper& hyper, Rng& rng,
                                ExecutionOptions options) {
  const auto where = h.locate(g);
  if (!where) throw GraphError("subgoal " + describe(g, h.schema) + " is not in the hierarchy");
  Runner runner(env, h, hyper, rng, options, fuel);
  if (fuel <= 0) return runner.result;
  runner.result.success = runner.run(where->first, where->second);
  return runner.result;
}

std::vector<ReplayTuple> her_relabel(const std::vector<LevelTransition>& traj,
                                     const std::vector<Subgoal>& goals,
                                     const std::function<bool(int goal, int action)>& valid) {
  std::vector<ReplayTuple> out;
  for (const auto& d : traj) {
    const int r = goal_reward(goals[d.goal], d.x_t, d.x_t1);
    out.push_back({d.x_t, d.goal, d.action, static_cast<double>(r), d.x_t1, r == 1 || d.horizon_end});
    for (int gi = 0; gi < static_cast<int>(goals.size()); ++gi) {
      if (gi == d.goal || goal_reward(goals[gi], d.x_t, d.x_t1) != 1) continue;
      if (valid && !valid(gi, d.action)) continue;
      out.push_back({d.x_t, gi, d.action, 1.0, d.x_t1, true});
    }
  }
  return out;
}

double evaluate_goal(Environment& env, const SubgoalHierarchy& h, const Subgoal& g,
                     const HrlHyper& hyper, Rng& rng, long* steps) {
  if (hyper.eval_episodes == 0) return 0.0;
  int hits = 0;
  for (int e = 0; e < hyper.eval_episodes; ++e) {
    env.reset(next_seed(rng));
    const auto res = execute_subgoal(env, h, g, 1L << 40, hyper, rng);
    if (res.success) ++hits;
    if (steps) *steps += res.steps;
  }
  return static_cast<double>(hits) / hyper.eval_episodes;
}

TrainingReport train_level_goals(Environment& env, SubgoalHierarchy& h, int k,
                                 const HrlHyper& hyper, Rng& rng) {
  TrainingReport report;
  LevelPolicy& level = h.levels.at(k);
  std::vector<int> active;
  std::vector<Subgoal> goals;
  for (int i = 0; i < static_cast<int>(level.goals.size()); ++i) {
    goals.push_back(level.goals[i].goal);
    if (level.goals[i].active) active.push_back(i);
  }
  if (active.empty()) return report;
  const auto valid = [&level](int goal, int action) {
    const LevelGoal& g = level.goals[goal];
    return g.active && std::find(g.allowed.begin(), g.allowed.end(), action) != g.allowed.end();
  };

  while (report.train_steps < hyper.T_goal) {
    const int gi = active[uniform_int(rng, static_cast<int>(active.size()))];
    env.reset(next_seed(rng));
    const auto res = execute_subgoal(env, h, level.goals[gi].goal, hyper.T_goal - report.train_steps,
                                     hyper, rng, {k, hyper.epsilon});
    report.train_steps += res.steps;
    std::vector<LevelTransition> mine;
    for (const auto& d : res.decisions) {
      if (d.level == k) mine.push_back(d);
    }
    for (auto& t : her_relabel(mine, goals, valid)) level.replay.push(std::move(t));
    for (std::size_t i = 0; i < mine.size(); ++i) q_update(h, level, hyper, rng);
    if (res.steps == 0) break;
  }
  for (int gi : active) {
    const double r = evaluate_goal(env, h, level.goals[gi].goal, hyper, rng, &report.eval_steps);
    level.goals[gi].success_ratio = r;
    report.success[level.goals[gi].goal] = r;
  }
  return report;
}

}  // namespace cdhrl
