#pragma once

// Run-directory file formats.

#include <filesystem>
#include <string>

#include <json.hpp>

#include "cdhrl/causal_graph.hpp"
#include "cdhrl/driver.hpp"
#include "cdhrl/env.hpp"
#include "cdhrl/task_policy.hpp"

namespace cdhrl {

// {"M", "names", "edges": [[effect, cause], ...], "sigma_eta"}.
nlohmann::json graph_to_json(const CausalGraph& g, const EnvVarSchema& schema,
                             const Eigen::MatrixXd& sigma);
CausalGraph graph_from_json(const nlohmann::json& j);
// Arrows point cause -> effect; nodes without edges are omitted.
std::string graph_to_dot(const CausalGraph& g, const EnvVarSchema& schema);

nlohmann::json net_to_json(const nn::DenseNet& net);
nn::DenseNet net_from_json(const nlohmann::json& j);

// Networks, goal tables and the task policy; enough to replay greedy episodes.
nlohmann::json model_to_json(const SubgoalHierarchy& h, const TaskPolicy& p);
void model_from_json(const nlohmann::json& j, const EnvVarSchema& schema, SubgoalHierarchy& h,
                     TaskPolicy& p);

inline const char* kMetricsHeader =
    "iteration,env_steps,shd,sid,n_controllable,mean_subgoal_success,m0,m1,m2,m3,m4,wall_clock_s";
std::string metrics_row(const IterationRecord& r);

void write_text(const std::filesystem::path& path, const std::string& text);
std::string read_text(const std::filesystem::path& path);

}  // namespace cdhrl
