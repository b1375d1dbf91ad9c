#include "cdhrl/task_policy.hpp"

#include <limits>

namespace cdhrl {

TaskPolicy make_task_policy(const SubgoalHierarchy& h, int primitive_count,
                            const HrlHyper& hyper, Rng& rng) {
  TaskPolicy p;
  for (const auto& level : h.levels) {
    for (const auto& g : level.goals) {
      if (g.active && g.success_ratio > hyper.phi) p.actions.push_back({true, 0, g.goal});
    }
  }
  for (int a = 0; a < primitive_count; ++a) p.actions.push_back({false, a, {}});
  std::vector<int> dims{h.schema.one_hot_width()};
  dims.insert(dims.end(), hyper.q_hidden.begin(), hyper.q_hidden.end());
  dims.push_back(static_cast<int>(p.actions.size()));
  p.q = nn::make_net(dims, nn::Head::Values, rng);
  p.target = p.q;
  p.adam = nn::AdamState::for_net(p.q);
  p.replay = ReplayBuffer(hyper.replay);
  return p;
}

namespace {

Eigen::VectorXd state_input(const SubgoalHierarchy& h, const VarVector& x) {
  Eigen::VectorXd in(h.schema.one_hot_width());
  encode_one_hot(h.schema, x, in.data());
  return in;
}

void task_update(const SubgoalHierarchy& h, TaskPolicy& p, const HrlHyper& hyper, Rng& rng) {
  const int n = hyper.batch;
  if (p.replay.size() < n) return;
  const int w = h.schema.one_hot_width();
  nn::Batch batch;
  batch.inputs.resize(w, n);
  batch.targets.resize(n);
  batch.values.resize(n);
  Eigen::MatrixXd next(w, n);
  std::vector<const ReplayTuple*> picked(n);
  for (int b = 0; b < n; ++b) {
    picked[b] = &p.replay[uniform_int(rng, p.replay.size())];
    encode_one_hot(h.schema, picked[b]->x_t, batch.inputs.col(b).data());
    encode_one_hot(h.schema, picked[b]->x_t1, next.col(b).data());
    batch.targets[b] = picked[b]->action;
  }
  const Eigen::MatrixXd q_next = nn::forward(p.target, next);
  for (int b = 0; b < n; ++b) {
    double y = picked[b]->reward;
    if (!picked[b]->done) y += hyper.gamma_task * q_next.col(b).maxCoeff();
    batch.values[b] = y;
  }
  const auto lg = nn::backward(p.q, batch);
  nn::adam_step(p.q, lg.grads, p.adam, hyper.lr);
  if (++p.updates % hyper.target_sync == 0) p.target = p.q;
}

// Runs one task action; returns the primitive steps it consumed.
long act(Environment& env, const SubgoalHierarchy& h, const HrlHyper& hyper, const LevelAction& a,
         long fuel, Rng& rng, bool* env_done) {
  if (a.is_subgoal) {
    const auto res = execute_subgoal(env, h, a.goal, fuel, hyper, rng);
    *env_done = res.env_done;
    return res.steps;
  }
  *env_done = env.step(a.primitive).done;
  return 1;
}

}  // namespace

int select_task_action(const SubgoalHierarchy& h, const TaskPolicy& p, const VarVector& x,
                       double epsilon, Rng& rng) {
  const int n = static_cast<int>(p.actions.size());
  if (epsilon > 0.0 && bernoulli(rng, epsilon)) return uniform_int(rng, n);
  const Eigen::VectorXd q = nn::forward(p.q, state_input(h, x));
  Eigen::Index best = 0;
  q.maxCoeff(&best);
  return static_cast<int>(best);
}

AdaptationResult run_adaptation(Environment& env, const SubgoalHierarchy& h, const HrlHyper& hyper,
                                long steps, Rng& rng) {
  AdaptationResult out{make_task_policy(h, env.primitive_action_count(), hyper, rng), {}, 0};
  TaskPolicy& p = out.policy;
  int episode = 0;
  while (out.env_steps < steps) {
    env.reset(next_seed(rng));
    EpisodeRecord rec{episode++, 0, 0.0, 0};
    bool done = false;
    while (!done && out.env_steps < steps) {
      const VarVector x0 = env.variables();
      const int a = select_task_action(h, p, x0, hyper.epsilon, rng);
      bool env_done = false;
      const long used = act(env, h, hyper, p.actions[a], steps - out.env_steps, rng, &env_done);
      out.env_steps += used;
      const double r = env.task_achieved() ? 1.0 : 0.0;
      done = r > 0.0 || env_done;
      p.replay.push({x0, 0, a, r, env.variables(), done});
      task_update(h, p, hyper, rng);
      rec.reward += r;
      if (used == 0) break;
    }
    rec.env_steps = out.env_steps;
    rec.milestones = env.milestones();
    out.curve.push_back(rec);
  }
  return out;
}

std::array<int, kMilestoneCount> eval_milestones(Environment& env, const SubgoalHierarchy& h,
                                                 const TaskPolicy& p, const HrlHyper& hyper,
                                                 int episodes, Rng& rng) {
  std::array<int, kMilestoneCount> counts{};
  for (int e = 0; e < episodes; ++e) {
    env.reset(next_seed(rng));
    bool done = false;
    while (!done && !env.task_achieved()) {
      const int a = select_task_action(h, p, env.variables(), 0.0, rng);
      bool env_done = false;
      const long used = act(env, h, hyper, p.actions[a], 1L << 40, rng, &env_done);
      done = env_done || used == 0;
    }
    for (int k = 0; k < kMilestoneCount; ++k) {
      if (env.milestones() & (1u << k)) ++counts[k];
    }
  }
  return counts;
}

SubgoalHierarchy make_flat_hierarchy(const EnvVarSchema& schema, int primitive_count,
                                     const HrlHyper& hyper, Rng& rng) {
  SubgoalHierarchy h = make_hierarchy(schema);
  CausalGraph g(schema.size());
  std::set<int> all;
  for (const auto& v : schema.vars()) {
    if (v.kind == VarKind::Action) continue;
    g.set_edge(v.id, schema.action_id());
    all.insert(v.id);
  }
  build_or_extend_hierarchy(h, g, all, primitive_count, hyper, rng);
  return h;
}

}  // namespace cdhrl
