#include <doctest.h>

#include <filesystem>
#include <sstream>

#include "cdhrl/artifacts.hpp"
#include "cdhrl/harness.hpp"
#include "desk.hpp"

using namespace cdhrl;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("cdhrl-test-" + name);
  fs::remove_all(p);
  return p;
}

}  // namespace

TEST_CASE("default configuration") {
  const auto c = parse_config(nlohmann::json::object());
  CHECK(c.scm.T == 50);
  CHECK(c.scm.Fs == 1000);
  CHECK(c.scm.Qs == 100);
  CHECK(c.scm.K == 25);
  CHECK(c.scm.batch == 256);
  CHECK(c.scm.edge_threshold == 0.8);
  CHECK(c.hrl.epsilon == 0.05);
  CHECK(c.hrl.batch == 128);
  CHECK(c.hrl.H == 8);
  CHECK(c.hrl.gamma_goal == 0.9);
  CHECK(c.hrl.gamma_task == 0.95);
  CHECK(c.hrl.lr == 1e-4);
  CHECK(c.hrl.phi == 0.6);
  CHECK(c.hrl.T_goal == 10000);
  CHECK(c.env.chain.chain_length == 4);
  CHECK(c.env.chain.episode_length == 64);
  CHECK(c.driver.samples_per_var == 512);
  CHECK(c.driver.max_iterations == 14);
  CHECK(c.eval_episodes == 1000);
  const auto mini = load_config(std::nullopt, {"env.name=minicraft"});
  CHECK(mini.env.mini.episode_length == 200);
  CHECK(mini.driver.samples_per_var == 2048);
  CHECK(mini.driver.max_iterations == 16);
}

TEST_CASE("overrides and validation") {
  const auto c = load_config(std::nullopt, {"scm.T=5", "env.name=chaincraft", "seed=9", "hrl.q_hidden=[8]"});
  CHECK(c.scm.T == 5);
  CHECK(c.seed == 9);
  CHECK(c.env.chain.seed == 9);
  CHECK(c.hrl.q_hidden == std::vector<int>{8});
  CHECK(c.echo["scm"]["T"] == 5);
  CHECK(parse_config(c.echo).echo == c.echo);
  CHECK_THROWS_AS(load_config(std::nullopt, {"scm.bogus=1"}), nn::ConfigError);
  CHECK_THROWS_AS(load_config(std::nullopt, {"scm.K=1"}), nn::ConfigError);
  CHECK_THROWS_AS(load_config(std::nullopt, {"scm.T=many"}), nn::ConfigError);
  CHECK_THROWS_AS(load_config(std::nullopt, {"env.name=eden"}), nn::ConfigError);
  CHECK_THROWS_AS(load_config(std::nullopt, {"env.chain_length=0"}), nn::ConfigError);
  CHECK_THROWS_AS(load_config(std::nullopt, {"env.hidden_vars=[\"Action\"]"}), nn::ConfigError);
  CHECK_THROWS_AS(load_config(std::nullopt, {"novalue"}), nn::ConfigError);
  CHECK_THROWS_AS(load_config(std::string("/nonexistent/config.json"), {}), nn::ConfigError);
}

TEST_CASE("graph files round-trip") {
  auto env = make_environment(desk::config({"env.chain_length=3", "env.distractor_count=1"}));
  const auto g = env->ground_truth_graph();
  Eigen::MatrixXd sigma = Eigen::MatrixXd::Constant(g.size(), g.size(), 0.25);
  const auto j = graph_to_json(g, env->schema(), sigma);
  CHECK(j["M"] == 5);
  CHECK(graph_from_json(nlohmann::json::parse(j.dump())) == g);
  const std::string dot = graph_to_dot(g, env->schema());
  CHECK(std::count(dot.begin(), dot.end(), '>') == 5);
  CHECK(dot.find("D0") == std::string::npos);

  ChainCraftConfig one;
  one.chain_length = 1;
  one.distractor_count = 0;
  ChainCraft w(one);
  const std::string single = graph_to_dot(w.ground_truth_graph(), w.schema());
  CHECK(std::count(single.begin(), single.end(), '>') == 1);
  CHECK(single.find("\"Action\" -> \"V0\"") != std::string::npos);
}

TEST_CASE("model files round-trip") {
  auto env = make_environment(desk::config({"env.chain_length=2", "env.distractor_count=0"}));
  HrlHyper hyper;
  Rng rng(1);
  auto h = make_hierarchy(env->schema());
  const auto g = env->ground_truth_graph();
  build_or_extend_hierarchy(h, g, {1}, env->primitive_action_count(), hyper, rng);
  build_or_extend_hierarchy(h, g, {2}, env->primitive_action_count(), hyper, rng);
  h.levels[0].goals[0].success_ratio = 0.9;
  h.levels[1].goals[0].success_ratio = 0.7;
  const auto p = make_task_policy(h, env->primitive_action_count(), hyper, rng);
  SubgoalHierarchy h2;
  TaskPolicy p2;
  model_from_json(nlohmann::json::parse(model_to_json(h, p).dump()), env->schema(), h2, p2);
  CHECK(h2.to_json() == h.to_json());
  CHECK(p2.actions == p.actions);
  for (int n = 0; n < 20; ++n) {
    const VarVector x{uniform_int(rng, 3), uniform_int(rng, 2), uniform_int(rng, 2)};
    CHECK(select_task_action(h2, p2, x, 0.0, rng) == select_task_action(h, p, x, 0.0, rng));
    CHECK(select_action(h2, h2.levels[1], x, 0, 0.0, rng) == select_action(h, h.levels[1], x, 0, 0.0, rng));
  }
  const auto counts = eval_milestones(*env, h, p, hyper, 0, rng);
  for (int c : counts) CHECK(c == 0);
}

TEST_CASE("series padding") {
  std::vector<int> a{3, 2}, b{4, 1, 0, 0};
  pad_series(a, b);
  CHECK(a == std::vector<int>{3, 2, 2, 2});
  CHECK(b.size() == 4);
}

TEST_CASE("dropout count follows the ceiling rule") {
  std::vector<VarSpec> vars{{0, "Action", 3, VarKind::Action}};
  for (int i = 0; i < 10; ++i) vars.push_back({1 + i, "X" + std::to_string(i), 2, VarKind::Item});
  vars.push_back({11, "N", 2, VarKind::Distractor});
  const EnvVarSchema s(vars);
  CHECK(choose_dropout(s, 0.1, 1).size() == 1);
  CHECK(choose_dropout(s, 0.0, 1).empty());
  CHECK(choose_dropout(s, 0.25, 1).size() == 3);
  for (const auto& name : choose_dropout(s, 0.99, 2)) CHECK(name != "N");
  CHECK(choose_dropout(s, 0.5, 7) == choose_dropout(s, 0.5, 7));
}

TEST_CASE("run writes the run directory") {
  const auto dir = scratch("run");
  auto cfg = desk::config({"env.chain_length=2", "env.distractor_count=0", "seed=3",
                           "driver.adaptation_steps=500", "out_dir=\"" + dir.string() + "\""});
  std::ostringstream log;
  const auto s = cli_run(cfg, log);
  for (const char* f : {"metrics.csv", "graph.json", "graph.dot", "hierarchy.json", "config-echo.json",
                        "events.jsonl", "model.json", "adaptation.csv", "graph-iter1.json",
                        "interventions-iter1.jsonl"})
    CHECK(fs::exists(dir / f));
  const std::string metrics = read_text(dir / "metrics.csv");
  CHECK(metrics.rfind(std::string(kMetricsHeader) + "\n", 0) == 0);
  CHECK(std::count(metrics.begin(), metrics.end(), '\n') == static_cast<long>(s.pretrain.history.size()) + 1);
  CHECK(parse_config(nlohmann::json::parse(read_text(dir / "config-echo.json"))).echo == cfg.echo);
  CHECK(export_graph(cfg, GraphWhich::Learned, GraphFormat::Dot) == read_text(dir / "graph.dot"));
  CHECK(graph_from_json(nlohmann::json::parse(export_graph(cfg, GraphWhich::Truth, GraphFormat::Json))) ==
        s.truth);
  const auto counts = eval_milestones_from_run(dir, 20, log);
  CHECK(counts[0] >= counts[1]);
  CHECK(fs::exists(dir / "milestones.json"));
  fs::remove_all(dir);
}

TEST_CASE("random-intervention ablation shares its first iteration") {
  const auto dir = scratch("ablate");
  auto cfg = desk::config({"env.chain_length=2", "env.distractor_count=0", "seed=4",
                           "out_dir=\"" + dir.string() + "\""});
  std::ostringstream log;
  const auto s = ablate_random_intervention(cfg, log);
  REQUIRE_FALSE(s.shd_policy.empty());
  CHECK(s.shd_policy.size() == s.shd_random.size());
  CHECK(s.shd_policy[0] == s.shd_random[0]);
  CHECK(s.sid_policy[0] == s.sid_random[0]);
  const std::string csv = read_text(dir / "ablation.csv");
  CHECK(csv.rfind("iteration,shd_policy,shd_random,sid_policy,sid_random\n", 0) == 0);
  CHECK(fs::exists(dir / "policy" / "metrics.csv"));
  CHECK(fs::exists(dir / "random" / "metrics.csv"));
  CHECK(read_text(dir / "policy" / "graph-iter1.json") == read_text(dir / "random" / "graph-iter1.json"));
  fs::remove_all(dir);
}

TEST_CASE("an untrained flat agent rarely reaches the end of ChainCraft(5)") {
  const auto cfg = desk::config({"env.chain_length=5", "seed=1"});
  const auto counts = flat_baseline_milestones(cfg, 0, 100);
  CHECK(counts[4] <= 5);
}
