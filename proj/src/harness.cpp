#include "cdhrl/harness.hpp"

#include <cmath>
#include <numeric>
#include <sstream>

#include "cdhrl/artifacts.hpp"
#include "cdhrl/intervention.hpp"

namespace cdhrl {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string jsonl(const std::vector<json>& items) {
  std::string out;
  for (const auto& e : items) out += e.dump() + "\n";
  return out;
}

}  // namespace

RunSummary cli_run(const RunConfig& cfg, std::ostream& log, RunOptions options) {
  Rng rng(cfg.seed);
  auto env = make_environment(cfg);
  const EnvVarSchema& schema = env->schema();
  const fs::path out = cfg.out_dir;
  RunSummary s;
  s.truth = env->ground_truth_graph();

  std::string metrics = std::string(kMetricsHeader) + "\n";
  if (options.write_files) {
    fs::create_directories(out);
    write_text(out / "config-echo.json", cfg.echo.dump(2) + "\n");
    write_text(out / "metrics.csv", metrics);
  }
  const auto hook = [&](const IterationRecord& r) {
    log << "iteration " << r.iteration << ": shd=" << r.shd << " sid=" << r.sid
        << " candidates=" << r.s_cc.size() << " verified=" << r.s_c.size()
        << " env_steps=" << r.env_steps << "\n";
    if (!options.write_files) return;
    metrics += metrics_row(r) + "\n";
    write_text(out / "metrics.csv", metrics);
    const std::string k = std::to_string(r.iteration);
    write_text(out / ("graph-iter" + k + ".json"), graph_to_json(r.graph, schema, r.sigma).dump(2) + "\n");
    write_text(out / ("graph-iter" + k + ".dot"), graph_to_dot(r.graph, schema));
    write_text(out / ("interventions-iter" + k + ".jsonl"), dataset_jsonl(r.data));
  };

  s.pretrain = run_pretraining(cfg, *env, rng, hook);
  s.pretrain_steps = s.pretrain.env_steps;
  s.hierarchy = s.pretrain.hierarchy;
  log << "pretraining stopped (" << s.pretrain.stop_reason << ") after " << s.pretrain_steps
      << " env steps\n";

  if (options.adapt) {
    auto adapt = run_adaptation(*env, s.hierarchy, cfg.hrl, cfg.driver.adaptation_steps, rng);
    s.task = std::move(adapt.policy);
    s.adaptation_steps = adapt.env_steps;
    if (options.write_files) {
      std::string csv = "episode,env_steps,reward,milestones\n";
      for (const auto& e : adapt.curve) {
        csv += std::to_string(e.episode) + "," + std::to_string(e.env_steps) + "," +
               std::to_string(static_cast<int>(e.reward)) + "," + std::to_string(e.milestones) + "\n";
      }
      write_text(out / "adaptation.csv", csv);
    }
  } else {
    s.task = make_task_policy(s.hierarchy, env->primitive_action_count(), cfg.hrl, rng);
  }

  if (options.write_files) {
    write_text(out / "graph.json", graph_to_json(s.pretrain.graph, schema, s.pretrain.sigma).dump(2) + "\n");
    write_text(out / "graph.dot", graph_to_dot(s.pretrain.graph, schema));
    write_text(out / "hierarchy.json", s.hierarchy.to_json().dump(2) + "\n");
    write_text(out / "events.jsonl", jsonl(s.pretrain.events));
    write_text(out / "model.json", model_to_json(s.hierarchy, s.task).dump() + "\n");
  }
  return s;
}

void pad_series(std::vector<int>& a, std::vector<int>& b) {
  const std::size_t n = std::max(a.size(), b.size());
  if (!a.empty()) a.resize(n, a.back());
  if (!b.empty()) b.resize(n, b.back());
}

AblationSummary ablate_random_intervention(const RunConfig& cfg, std::ostream& log) {
  RunConfig policy = cfg;
  policy.ablation.mode = AblationMode::None;
  policy.out_dir = (fs::path(cfg.out_dir) / "policy").string();
  policy.echo["ablation"]["mode"] = "none";
  policy.echo["out_dir"] = policy.out_dir;
  RunConfig random = cfg;
  random.ablation.mode = AblationMode::RandomIntervention;
  random.out_dir = (fs::path(cfg.out_dir) / "random").string();
  random.echo["ablation"]["mode"] = "random_intervention";
  random.echo["out_dir"] = random.out_dir;

  log << "policy-intervention arm\n";
  const RunSummary a = cli_run(policy, log, {false, true});
  log << "random-intervention arm\n";
  const RunSummary b = cli_run(random, log, {false, true});

  AblationSummary s;
  for (const auto& r : a.pretrain.history) {
    s.shd_policy.push_back(r.shd);
    s.sid_policy.push_back(r.sid);
  }
  for (const auto& r : b.pretrain.history) {
    s.shd_random.push_back(r.shd);
    s.sid_random.push_back(r.sid);
  }
  pad_series(s.shd_policy, s.shd_random);
  pad_series(s.sid_policy, s.sid_random);
  const auto mean = [](const std::vector<int>& v) {
    return v.empty() ? 0.0 : std::accumulate(v.begin(), v.end(), 0.0) / v.size();
  };
  s.mean_shd_policy = mean(s.shd_policy);
  s.mean_shd_random = mean(s.shd_random);
  s.mean_sid_policy = mean(s.sid_policy);
  s.mean_sid_random = mean(s.sid_random);

  std::string csv = "iteration,shd_policy,shd_random,sid_policy,sid_random\n";
  for (std::size_t i = 0; i < s.shd_policy.size(); ++i) {
    csv += std::to_string(i + 1) + "," + std::to_string(s.shd_policy[i]) + "," +
           std::to_string(s.shd_random[i]) + "," + std::to_string(s.sid_policy[i]) + "," +
           std::to_string(s.sid_random[i]) + "\n";
  }
  write_text(fs::path(cfg.out_dir) / "ablation.csv", csv);
  log << "mean shd policy=" << s.mean_shd_policy << " random=" << s.mean_shd_random
      << "; mean sid policy=" << s.mean_sid_policy << " random=" << s.mean_sid_random << "\n";
  return s;
}

std::vector<std::string> choose_dropout(const EnvVarSchema& schema, double ratio, std::uint64_t seed) {
  std::vector<std::string> effective;
  for (const auto& v : schema.vars()) {
    if (v.kind == VarKind::Item || v.kind == VarKind::StateValue) effective.push_back(v.name);
  }
  const int n = static_cast<int>(std::ceil(ratio * effective.size() - 1e-9));
  Rng rng(seed ^ 0x65762d64726f70ull);
  for (int i = static_cast<int>(effective.size()) - 1; i > 0; --i) {
    std::swap(effective[i], effective[uniform_int(rng, i + 1)]);
  }
  effective.resize(std::min<std::size_t>(n, effective.size()));
  return effective;
}

RunSummary ablate_ev_dropout(RunConfig cfg, double ratio, std::ostream& log) {
  if (ratio < 0.0 || ratio > 1.0) throw nn::ConfigError("--ratio must lie in [0, 1]");
  auto base = make_base_environment(cfg);
  auto hidden = choose_dropout(base->schema(), ratio, cfg.seed);
  if (const auto last = base->final_milestone_var()) {
    const std::string& name = base->schema()[*last].name;
    if (std::find(hidden.begin(), hidden.end(), name) != hidden.end()) {
      log << "warning: dropout hides the final milestone variable " << name << "\n";
    }
  }
  for (const auto& h : cfg.env.hidden_vars) {
    if (std::find(hidden.begin(), hidden.end(), h) == hidden.end()) hidden.push_back(h);
  }
  cfg.env.hidden_vars = hidden;
  cfg.ablation.mode = AblationMode::EvDropout;
  cfg.ablation.dropout_ratio = ratio;
  cfg.echo["env"]["hidden_vars"] = hidden;
  cfg.echo["ablation"] = {{"mode", "ev_dropout"}, {"dropout_ratio", ratio}};
  log << "hidden variables:";
  for (const auto& h : hidden) log << " " << h;
  log << "\n";
  return cli_run(cfg, log);
}

std::string export_graph(const RunConfig& cfg, GraphWhich which, GraphFormat format) {
  auto env = make_environment(cfg);
  const EnvVarSchema& schema = env->schema();
  CausalGraph g;
  Eigen::MatrixXd sigma;
  if (which == GraphWhich::Truth) {
    g = env->ground_truth_graph();
    sigma = Eigen::MatrixXd::Zero(g.size(), g.size());
    for (const auto& [i, j] : g.edges()) sigma(i, j) = 1.0;
  } else {
    const json j = json::parse(read_text(fs::path(cfg.out_dir) / "graph.json"));
    g = graph_from_json(j);
    if (g.size() != schema.size()) throw SchemaError("graph.json does not match the configured world");
    sigma.resize(g.size(), g.size());
    for (int r = 0; r < g.size(); ++r) {
      for (int c = 0; c < g.size(); ++c) sigma(r, c) = j.at("sigma_eta").at(r).at(c).get<double>();
    }
  }
  if (format == GraphFormat::Dot) return graph_to_dot(g, schema);
  return graph_to_json(g, schema, sigma).dump(2) + "\n";
}

std::array<int, kMilestoneCount> eval_milestones_from_run(const fs::path& run_dir, int episodes,
                                                          std::ostream& log) {
  const RunConfig cfg = parse_config(json::parse(read_text(run_dir / "config-echo.json")));
  auto env = make_environment(cfg);
  SubgoalHierarchy h;
  TaskPolicy p;
  model_from_json(json::parse(read_text(run_dir / "model.json")), env->schema(), h, p);
  Rng rng(cfg.seed ^ 0x6576616cull);
  const auto counts = eval_milestones(*env, h, p, cfg.hrl, episodes, rng);
  json out = {{"episodes", episodes}, {"counts", counts}};
  write_text(run_dir / "milestones.json", out.dump(2) + "\n");
  log << "milestone counts over " << episodes << " episodes:";
  for (int c : counts) log << " " << c;
  log << "\n";
  return counts;
}

std::array<int, kMilestoneCount> flat_baseline_milestones(const RunConfig& cfg, long budget,
                                                          int episodes) {
  Rng rng(cfg.seed ^ 0x666c6174ull);
  auto env = make_environment(cfg);
  const SubgoalHierarchy h = make_hierarchy(env->schema());
  auto adapt = run_adaptation(*env, h, cfg.hrl, budget, rng);
  Rng eval_rng(cfg.seed ^ 0x6576616cull);
  return eval_milestones(*env, h, adapt.policy, cfg.hrl, episodes, eval_rng);
}

std::array<int, kMilestoneCount> uniform_goal_milestones(const RunConfig& cfg, long goal_budget,
                                                         int episodes) {
  Rng rng(cfg.seed ^ 0x666c6174ull);
  auto env = make_environment(cfg);
  HrlHyper hyper = cfg.hrl;
  hyper.T_goal = goal_budget;
  SubgoalHierarchy h = make_flat_hierarchy(env->schema(), env->primitive_action_count(), hyper, rng);
  train_level_goals(*env, h, 0, hyper, rng);
  auto adapt = run_adaptation(*env, h, cfg.hrl, cfg.driver.adaptation_steps, rng);
  Rng eval_rng(cfg.seed ^ 0x6576616cull);
  return eval_milestones(*env, h, adapt.policy, cfg.hrl, episodes, eval_rng);
}

}  // namespace cdhrl
