#include "cdhrl/driver.hpp"

#include <chrono>

#include "cdhrl/graph_metrics.hpp"
#include "cdhrl/intervention.hpp"

namespace cdhrl {

VarSet candidate_controllables(const CausalGraph& graph, const VarSet& s_iv) {
  VarSet out;
  for (int i = 0; i < graph.size(); ++i) {
    if (s_iv.contains(i)) continue;
    const auto parents = graph.parents(i);
    if (parents.empty()) continue;
    bool inside = true;
    for (int p : parents) inside = inside && s_iv.contains(p);
    if (inside) out.insert(i);
  }
  return out;
}

CausalGraph without_distractor_causes(const CausalGraph& g, const EnvVarSchema& schema) {
  CausalGraph out = g;
  for (const auto& [effect, cause] : g.edges())
    if (schema[cause].kind == VarKind::Distractor) out.set_edge(effect, cause, false);
  return out;
}

namespace {

// Forwards to a world and tallies milestones of every finished episode.
class TallyEnvironment final : public Environment {
 public:
  explicit TallyEnvironment(Environment& inner) : inner_(inner) { obs_ = inner_.observation(); }

  Observation reset(std::uint64_t seed) override {
    close_episode();
    obs_ = inner_.reset(seed);
    open_ = true;
    return obs_;
  }
  StepResult step(int action) override {
    StepResult r = inner_.step(action);
    obs_ = r.observation;
    ++total_steps_;
    return r;
  }
  VarVector extract_vars(const Observation& obs) const override { return inner_.extract_vars(obs); }
  const EnvVarSchema& schema() const override { return inner_.schema(); }
  CausalGraph ground_truth_graph() const override { return inner_.ground_truth_graph(); }
  std::uint32_t milestones() const override { return inner_.milestones(); }
  int primitive_action_count() const override { return inner_.primitive_action_count(); }
  bool task_achieved() const override { return inner_.task_achieved(); }
  std::optional<int> final_milestone_var() const override { return inner_.final_milestone_var(); }
  std::unique_ptr<Environment> clone() const override { return inner_.clone(); }

  std::array<int, kMilestoneCount> take_counts() {
    close_episode();
    auto out = counts_;
    counts_ = {};
    return out;
  }

 private:
  void close_episode() {
    if (!open_) return;
    const auto m = inner_.milestones();
    for (int k = 0; k < kMilestoneCount; ++k) {
      if (m & (1u << k)) ++counts_[k];
    }
    open_ = false;
  }

  Environment& inner_;
  std::array<int, kMilestoneCount> counts_{};
  bool open_ = false;
};

nlohmann::json goal_json(const Subgoal& g, const EnvVarSchema& schema) {
  return {{"var", g.var}, {"name", schema[g.var].name}, {"change", to_string(g.change)}};
}

}  // namespace

PretrainResult run_pretraining(const RunConfig& cfg, Environment& world, Rng& rng,
                               const IterationHook& hook) {
  TallyEnvironment env(world);
  const EnvVarSchema& schema = env.schema();
  const int action = schema.action_id();
  const CausalGraph truth = without_distractor_causes(env.ground_truth_graph(), schema);
  const auto clock_start = std::chrono::steady_clock::now();
  const long steps_start = world.steps_taken();

  PretrainResult out;
  out.hierarchy = make_hierarchy(schema);
  out.s_iv = {action};
  out.graph = CausalGraph(schema.size());
  out.sigma = Eigen::MatrixXd::Constant(schema.size(), schema.size(), 0.5);
  ScmParams scm = make_scm(schema, cfg.scm, rng);
  SubgoalHierarchy& h = out.hierarchy;

  SamplingOptions opt;
  opt.samples = cfg.driver.samples_per_var;
  opt.max_attempts = cfg.driver.max_attempts;
  opt.follow_cap = cfg.driver.follow_cap;
  opt.episodes_per_sample = cfg.driver.episodes_per_sample;

  long seq = 0;
  auto emit = [&](nlohmann::json e) {
    e["seq"] = seq++;
    e["env_steps"] = world.steps_taken() - steps_start;
    out.events.push_back(std::move(e));
  };

  InterventionDataset data;
  if (cfg.driver.max_iterations == 0) {
    data[action] = bootstrap_action_data(env, opt, rng);
    out.stop_reason = "max_iterations";
  }

  int empty_streak = 0;
  for (int it = 1; it <= cfg.driver.max_iterations; ++it) {
    IterationRecord rec;
    rec.iteration = it;
    rec.s_iv = out.s_iv;
    emit({{"event", "iteration_start"}, {"iteration", it}});

    if (it == 1 || cfg.driver.recollect_bootstrap) data[action] = bootstrap_action_data(env, opt, rng);
    for (int j : out.s_iv) {
      if (j == action) continue;
      data[j] = cfg.ablation.mode == AblationMode::RandomIntervention
                    ? bootstrap_action_data(env, opt, rng)
                    : intervene_on_variable(env, h, cfg.hrl, j, opt, rng);
    }

    const DiscoverResult found = discover(scm, cfg.scm, data, out.s_iv, rng);
    out.graph = found.graph;
    out.sigma = found.sigma;
    rec.graph = found.graph;
    rec.sigma = found.sigma;
    rec.data = data;
    const CausalGraph scored = without_distractor_causes(found.graph, schema);
    rec.shd = shd(truth, scored);
    if (schema.size() <= kSidMaxNodes) rec.sid = sid(truth, prune_cycles(scored, found.sigma));

    rec.s_cc = candidate_controllables(found.graph, out.s_iv);
    if (!rec.s_cc.empty()) {
      build_or_extend_hierarchy(h, found.graph, rec.s_cc, env.primitive_action_count(), cfg.hrl, rng);
      int lo = h.level_count();
      int hi = 0;
      for (int v : rec.s_cc) {
        lo = std::min(lo, h.depth_of.at(v));
        hi = std::max(hi, h.depth_of.at(v));
      }
      std::map<Subgoal, double> ratios;
      for (int d = lo; d <= hi; ++d) {
        nlohmann::json goals = nlohmann::json::array();
        for (const auto& g : h.levels[d - 1].goals) {
          if (g.active) goals.push_back(goal_json(g.goal, schema));
        }
        emit({{"event", "train_start"}, {"iteration", it}, {"level", d}, {"goals", goals}});
        const TrainingReport report = train_level_goals(env, h, d - 1, cfg.hrl, rng);
        nlohmann::json results = nlohmann::json::array();
        for (const auto& [g, r] : report.success) {
          auto gj = goal_json(g, schema);
          gj["success_ratio"] = r;
          results.push_back(gj);
          if (rec.s_cc.contains(g.var)) ratios[g] = r;
        }
        emit({{"event", "train_end"}, {"iteration", it}, {"level", d}, {"goals", results}});
        std::vector<int> level_ok;
        for (const auto& [g, r] : report.success) {
          if (r > cfg.hrl.phi && (level_ok.empty() || level_ok.back() != g.var)) level_ok.push_back(g.var);
        }
        emit({{"event", "verified"}, {"iteration", it}, {"level", d}, {"vars", level_ok}});
      }
      rec.s_c = verify_controllable(ratios, cfg.hrl.phi);
      VarSet failed;
      for (int v : rec.s_cc) {
        if (!rec.s_c.contains(v)) failed.insert(v);
      }
      remove_variables(h, failed);
      out.s_iv.insert(rec.s_c.begin(), rec.s_c.end());
    }

    rec.n_controllable = static_cast<int>(out.s_iv.size()) - 1;
    double total = 0.0;
    int count = 0;
    for (const auto& level : h.levels) {
      for (const auto& g : level.goals) {
        if (!g.active) continue;
        total += g.success_ratio;
        ++count;
      }
    }
    rec.mean_subgoal_success = count ? total / count : 0.0;
    rec.milestones = env.take_counts();
    rec.env_steps = world.steps_taken() - steps_start;
    rec.wall_clock_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - clock_start).count();
    rec.hierarchy = h.to_json();
    emit({{"event", "iteration_end"},
          {"iteration", it},
          {"candidates", rec.s_cc},
          {"controllable", rec.s_c},
          {"shd", rec.shd},
          {"sid", rec.sid}});
    if (hook) hook(rec);
    out.history.push_back(std::move(rec));

    const IterationRecord& last = out.history.back();
    if (last.s_cc.empty()) {
      out.stop_reason = "no_candidates";
      break;
    }
    empty_streak = last.s_c.empty() ? empty_streak + 1 : 0;
    if (empty_streak >= 2) {
      out.stop_reason = "no_verified_variables";
      break;
    }
    if (it == cfg.driver.max_iterations) out.stop_reason = "max_iterations";
  }
  out.env_steps = world.steps_taken() - steps_start;
  return out;
}

}  // namespace cdhrl
