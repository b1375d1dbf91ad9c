#include "cdhrl/artifacts.hpp"

#include <fstream>
#include <sstream>

#include "cdhrl/numeric.hpp"

namespace cdhrl {

using nlohmann::json;

json graph_to_json(const CausalGraph& g, const EnvVarSchema& schema, const Eigen::MatrixXd& sigma) {
  json edges = json::array();
  for (const auto& [i, j] : g.edges()) edges.push_back({i, j});
  json s = json::array();
  for (Eigen::Index i = 0; i < sigma.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < sigma.cols(); ++j) row.push_back(sigma(i, j));
    s.push_back(row);
  }
  return {{"M", g.size()}, {"names", schema.names()}, {"edges", edges}, {"sigma_eta", s}};
}

CausalGraph graph_from_json(const json& j) {
  CausalGraph g(j.at("M").get<int>());
  for (const auto& e : j.at("edges")) g.set_edge(e.at(0).get<int>(), e.at(1).get<int>());
  return g;
}

std::string graph_to_dot(const CausalGraph& g, const EnvVarSchema& schema) {
  std::ostringstream out;
  out << "digraph causal {\n";
  std::vector<bool> used(g.size(), false);
  for (const auto& [i, j] : g.edges()) used[i] = used[j] = true;
  for (int v = 0; v < g.size(); ++v) {
    if (used[v]) out << "  \"" << schema[v].name << "\";\n";
  }
  for (const auto& [i, j] : g.edges()) {
    out << "  \"" << schema[j].name << "\" -> \"" << schema[i].name << "\";\n";
  }
  out << "}\n";
  return out.str();
}

json net_to_json(const nn::DenseNet& net) {
  json w = json::array();
  json b = json::array();
  for (int l = 0; l < net.layer_count(); ++l) {
    w.push_back(std::vector<double>(net.weights[l].data(), net.weights[l].data() + net.weights[l].size()));
    b.push_back(std::vector<double>(net.biases[l].data(), net.biases[l].data() + net.biases[l].size()));
  }
  return {{"dims", net.dims},
          {"head", net.head == nn::Head::Softmax ? "softmax" : "values"},
          {"weights", w},
          {"biases", b}};
}

nn::DenseNet net_from_json(const json& j) {
  const auto head = j.at("head").get<std::string>() == "softmax" ? nn::Head::Softmax : nn::Head::Values;
  nn::DenseNet net = nn::make_zero_net(j.at("dims").get<std::vector<int>>(), head);
  for (int l = 0; l < net.layer_count(); ++l) {
    const auto w = j.at("weights").at(l).get<std::vector<double>>();
    const auto b = j.at("biases").at(l).get<std::vector<double>>();
    if (static_cast<Eigen::Index>(w.size()) != net.weights[l].size() ||
        static_cast<Eigen::Index>(b.size()) != net.biases[l].size()) {
      throw nn::ConfigError("stored network does not match its dims");
    }
    std::copy(w.begin(), w.end(), net.weights[l].data());
    std::copy(b.begin(), b.end(), net.biases[l].data());
  }
  return net;
}

namespace {

json action_json(const LevelAction& a) {
  if (a.is_subgoal) return {{"goal", {a.goal.var, to_string(a.goal.change)}}};
  return {{"primitive", a.primitive}};
}

LevelAction action_from(const json& j) {
  if (j.contains("goal")) {
    return {true, 0, {j["goal"].at(0).get<int>(), change_kind_from_string(j["goal"].at(1).get<std::string>())}};
  }
  return {false, j.at("primitive").get<int>(), {}};
}

}  // namespace

json model_to_json(const SubgoalHierarchy& h, const TaskPolicy& p) {
  json levels = json::array();
  for (const auto& level : h.levels) {
    json goals = json::array();
    for (const auto& g : level.goals) {
      goals.push_back({{"var", g.goal.var},
                       {"change", to_string(g.goal.change)},
                       {"allowed", g.allowed},
                       {"success_ratio", g.success_ratio},
                       {"active", g.active}});
    }
    json actions = json::array();
    for (const auto& a : level.actions) actions.push_back(action_json(a));
    levels.push_back({{"depth", level.depth}, {"goals", goals}, {"actions", actions}, {"q", net_to_json(level.q)}});
  }
  json depth = json::array();
  for (const auto& [v, d] : h.depth_of) depth.push_back({v, d});
  json task_actions = json::array();
  for (const auto& a : p.actions) task_actions.push_back(action_json(a));
  return {{"schema", h.schema.to_json()},
          {"levels", levels},
          {"depth_of", depth},
          {"task", {{"actions", task_actions}, {"q", net_to_json(p.q)}}}};
}

void model_from_json(const json& j, const EnvVarSchema& schema, SubgoalHierarchy& h, TaskPolicy& p) {
  if (!(EnvVarSchema::from_json(j.at("schema")) == schema)) {
    throw SchemaError("stored model was trained on a different variable schema");
  }
  h = make_hierarchy(schema);
  for (const auto& lj : j.at("levels")) {
    LevelPolicy level;
    level.depth = lj.at("depth").get<int>();
    for (const auto& gj : lj.at("goals")) {
      level.goals.push_back({{gj.at("var").get<int>(), change_kind_from_string(gj.at("change").get<std::string>())},
                             gj.at("allowed").get<std::vector<int>>(),
                             gj.at("success_ratio").get<double>(),
                             gj.at("active").get<bool>()});
    }
    for (const auto& aj : lj.at("actions")) level.actions.push_back(action_from(aj));
    level.q = net_from_json(lj.at("q"));
    level.target = level.q;
    h.levels.push_back(std::move(level));
  }
  for (const auto& d : j.at("depth_of")) h.depth_of[d.at(0).get<int>()] = d.at(1).get<int>();
  p = TaskPolicy{};
  for (const auto& aj : j.at("task").at("actions")) p.actions.push_back(action_from(aj));
  p.q = net_from_json(j.at("task").at("q"));
  p.target = p.q;
}

std::string metrics_row(const IterationRecord& r) {
  std::ostringstream out;
  out << r.iteration << ',' << r.env_steps << ',' << r.shd << ',' << r.sid << ',' << r.n_controllable
      << ',' << r.mean_subgoal_success;
  for (int m : r.milestones) out << ',' << m;
  out << ',' << r.wall_clock_s;
  return out.str();
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace cdhrl
