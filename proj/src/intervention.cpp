#include "cdhrl/intervention.hpp"

#include <sstream>

namespace cdhrl {

namespace {

bool changed(const VarVector& a, const VarVector& b, int action_id) {
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (static_cast<int>(i) != action_id && a[i] != b[i]) return true;
  }
  return false;
}

// Random actions until some variable changes, the cap is hit or the episode ends.
void follow_up(Environment& env, const SamplingOptions& opt, int wanted,
               std::vector<VarPair>& out, Rng& rng, SamplingLog* log) {
  const int action_id = env.schema().action_id();
  const int actions = env.primitive_action_count();
  for (int s = 0; s < opt.follow_cap && static_cast<int>(out.size()) < wanted; ++s) {
    const int a = uniform_int(rng, actions);
    VarVector x0 = env.variables();
    x0[action_id] = a;
    const StepResult sr = env.step(a);
    if (log) ++log->env_steps;
    VarVector x1 = env.variables();
    const bool moved = changed(x0, x1, action_id);
    out.push_back({std::move(x0), std::move(x1)});
    if (moved || sr.done) return;
  }
}

}  // namespace

std::vector<VarPair> bootstrap_action_data(Environment& env, const SamplingOptions& opt, Rng& rng,
                                           SamplingLog* log) {
  std::vector<VarPair> out;
  const long max_episodes = static_cast<long>(opt.episodes_per_sample) * opt.samples;
  for (long e = 0; e < max_episodes && static_cast<int>(out.size()) < opt.samples; ++e) {
    env.reset(next_seed(rng));
    if (log) ++log->episodes;
    follow_up(env, opt, opt.samples, out, rng, log);
  }
  return out;
}

std::vector<VarPair> intervene_on_variable(Environment& env, const SubgoalHierarchy& h,
                                           const HrlHyper& hyper, int target,
                                           const SamplingOptions& opt, Rng& rng,
                                           SamplingLog* log) {
  const Subgoal inc{target, ChangeKind::Increase};
  const Subgoal dec{target, ChangeKind::Decrease};
  if (!h.locate(inc) && !h.locate(dec)) {
    throw GraphError("intervention target " + h.schema[target].name + " has no subgoals");
  }
  std::vector<VarPair> out;
  const int card = env.schema().cardinality(target);
  const long max_episodes = static_cast<long>(opt.episodes_per_sample) * opt.samples;
  for (long e = 0; e < max_episodes && static_cast<int>(out.size()) < opt.samples; ++e) {
    env.reset(next_seed(rng));
    if (log) ++log->episodes;
    const int desired = uniform_int(rng, card);
    bool ended = false;
    for (int attempt = 0; attempt < opt.max_attempts; ++attempt) {
      const int now = env.variables()[target];
      if (now == desired) break;
      const Subgoal& g = now < desired ? inc : dec;
      if (!h.locate(g)) break;
      const auto res = execute_subgoal(env, h, g, 1L << 40, hyper, rng);
      if (log) log->env_steps += res.steps;
      if (res.env_done) {
        ended = true;
        break;
      }
    }
    if (ended || env.variables()[target] != desired) {
      if (log) ++log->failed_setpoints;
      continue;
    }
    follow_up(env, opt, opt.samples, out, rng, log);
  }
  return out;
}

nlohmann::json pair_record(int target, const VarPair& p) {
  return {{"target", target}, {"x_t", p.x_t}, {"x_t1", p.x_t1}};
}

std::string dataset_jsonl(const InterventionDataset& data) {
  std::string out;
  for (const auto& [target, pairs] : data) {
    for (const auto& p : pairs) {
      out += pair_record(target, p).dump();
      out += '\n';
    }
  }
  return out;
}

InterventionDataset parse_dataset_jsonl(const std::string& text) {
  InterventionDataset data;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto j = nlohmann::json::parse(line);
    data[j.at("target").get<int>()].push_back(
        {j.at("x_t").get<VarVector>(), j.at("x_t1").get<VarVector>()});
  }
  return data;
}

}  // namespace cdhrl
