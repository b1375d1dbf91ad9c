#include <limits>

#include "cdhrl/hrl.hpp"

namespace cdhrl {

namespace {

void fill_input(const SubgoalHierarchy& h, const LevelPolicy& level, const VarVector& x,
                int goal, double* out) {
  const int w = h.schema.one_hot_width();
  encode_one_hot(h.schema, x, out);
  std::fill(out + w, out + w + level.goals.size(), 0.0);
  out[w + goal] = 1.0;
}

int input_width(const SubgoalHierarchy& h, const LevelPolicy& level) {
  return h.schema.one_hot_width() + static_cast<int>(level.goals.size());
}

}  // namespace

Eigen::VectorXd policy_input(const SubgoalHierarchy& h, const LevelPolicy& level,
                             const VarVector& x, int goal) {
  Eigen::VectorXd in(input_width(h, level));
  fill_input(h, level, x, goal, in.data());
  return in;
}

int select_action(const SubgoalHierarchy& h, const LevelPolicy& level, const VarVector& x,
                  int goal, double epsilon, Rng& rng) {
  const auto& allowed = level.goals[goal].allowed;
  if (epsilon > 0.0 && bernoulli(rng, epsilon)) {
    return allowed[uniform_int(rng, static_cast<int>(allowed.size()))];
  }
  const Eigen::VectorXd q = nn::forward(level.q, policy_input(h, level, x, goal));
  int best = allowed.front();
  for (int a : allowed) {
    if (q(a) > q(best)) best = a;
  }
  return best;
}

double q_update(const SubgoalHierarchy& h, LevelPolicy& level, const HrlHyper& hyper, Rng& rng) {
  const int n = hyper.batch;
  if (level.replay.size() < n) return -1.0;
  const int w = input_width(h, level);
  nn::Batch batch;
  batch.inputs.resize(w, n);
  batch.targets.resize(n);
  batch.values.resize(n);
  Eigen::MatrixXd next(w, n);
  std::vector<const ReplayTuple*> picked(n);
  for (int b = 0; b < n; ++b) {
    const ReplayTuple& t = level.replay[uniform_int(rng, level.replay.size())];
    picked[b] = &t;
    fill_input(h, level, t.x_t, t.goal, batch.inputs.col(b).data());
    fill_input(h, level, t.x_t1, t.goal, next.col(b).data());
    batch.targets[b] = t.action;
  }
  const Eigen::MatrixXd q_next = nn::forward(level.target, next);
  for (int b = 0; b < n; ++b) {
    const ReplayTuple& t = *picked[b];
    double y = t.reward;
    if (!t.done) {
      double best = -std::numeric_limits<double>::infinity();
      for (int a : level.goals[t.goal].allowed) best = std::max(best, q_next(a, b));
      y += hyper.gamma_goal * best;
    }
    batch.values[b] = y;
  }
  const auto lg = nn::backward(level.q, batch);
  nn::adam_step(level.q, lg.grads, level.adam, hyper.lr);
  if (++level.updates % hyper.target_sync == 0) level.target = level.q;
  return lg.loss;
}

}  // namespace cdhrl
