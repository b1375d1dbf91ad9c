#include <CLI11.hpp>

#include <iostream>

#include "cdhrl/config.hpp"
#include "cdhrl/harness.hpp"

namespace {

struct Common {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::vector<std::string> overrides;
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--config", c.config, "JSON config file");
  cmd->add_option("--seed", c.seed, "run seed");
  cmd->add_option("--out", c.out, "run directory");
  cmd->add_option("--override", c.overrides, "dotted key=value, value parsed as JSON")->take_all();
}

cdhrl::RunConfig resolve(const Common& c) {
  std::vector<std::string> overrides = c.overrides;
  if (c.seed) overrides.push_back("seed=" + std::to_string(*c.seed));
  if (!c.out.empty()) overrides.push_back("out_dir=" + nlohmann::json(c.out).dump());
  return cdhrl::load_config(c.config.empty() ? std::nullopt : std::optional<std::string>(c.config),
                            overrides);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Causality-driven hierarchical reinforcement learning on crafting worlds"};
  app.require_subcommand(1);

  Common run_opts, random_opts, dropout_opts, export_opts, eval_opts;
  double ratio = 0.0;
  std::string which = "learned";
  std::string format = "dot";
  int episodes = 1000;

  auto* run = app.add_subcommand("run", "pretrain, adapt and write the run directory");
  add_common(run, run_opts);
  auto* random = app.add_subcommand("ablate-random-intervention",
                                    "compare policy-driven and random intervention data");
  add_common(random, random_opts);
  auto* dropout = app.add_subcommand("ablate-ev-dropout", "hide a share of the item variables");
  add_common(dropout, dropout_opts);
  dropout->add_option("--ratio", ratio, "share of item variables to hide")->required();
  auto* exporter = app.add_subcommand("export-graph", "print the true or learned graph");
  add_common(exporter, export_opts);
  exporter->add_option("--which", which)->check(CLI::IsMember({"truth", "learned"}));
  exporter->add_option("--format", format)->check(CLI::IsMember({"dot", "json"}));
  auto* eval = app.add_subcommand("eval-milestones", "greedy task episodes from a finished run");
  add_common(eval, eval_opts);
  eval->add_option("--episodes", episodes)->check(CLI::NonNegativeNumber);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      cdhrl::cli_run(resolve(run_opts), std::cerr);
    } else if (*random) {
      cdhrl::ablate_random_intervention(resolve(random_opts), std::cerr);
    } else if (*dropout) {
      cdhrl::ablate_ev_dropout(resolve(dropout_opts), ratio, std::cerr);
    } else if (*exporter) {
      std::cout << cdhrl::export_graph(resolve(export_opts),
                                       which == "truth" ? cdhrl::GraphWhich::Truth : cdhrl::GraphWhich::Learned,
                                       format == "dot" ? cdhrl::GraphFormat::Dot : cdhrl::GraphFormat::Json);
    } else if (*eval) {
      const cdhrl::RunConfig cfg = resolve(eval_opts);
      const auto counts = cdhrl::eval_milestones_from_run(cfg.out_dir, episodes, std::cerr);
      for (std::size_t k = 0; k < counts.size(); ++k) std::cout << (k ? "," : "") << counts[k];
      std::cout << "\n";
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
