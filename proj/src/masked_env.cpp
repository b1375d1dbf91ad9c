#include <algorithm>

#include "cdhrl/worlds.hpp"

namespace cdhrl {

namespace {

EnvVarSchema project_schema(const EnvVarSchema& inner, const std::vector<int>& visible) {
  std::vector<VarSpec> vars;
  for (int id : visible) {
    VarSpec v = inner[id];
    v.id = static_cast<int>(vars.size());
    vars.push_back(v);
  }
  return EnvVarSchema(std::move(vars));
}

}  // namespace

MaskedEnvironment::MaskedEnvironment(std::unique_ptr<Environment> inner,
                                     std::vector<int> visible)
    : inner_(std::move(inner)), visible_(std::move(visible)) {
  const EnvVarSchema& full = inner_->schema();
  std::vector<bool> seen(full.size(), false);
  for (int id : visible_) {
    if (id < 0 || id >= full.size()) throw SchemaError("visible id out of range");
    if (seen[id]) throw SchemaError("visible id listed twice");
    seen[id] = true;
  }
  if (!seen[full.action_id()]) throw SchemaError("the Action variable must stay visible");
  schema_ = project_schema(full, visible_);
  obs_ = inner_->observation();
}

Observation MaskedEnvironment::reset(std::uint64_t seed) {
  obs_ = inner_->reset(seed);
  return obs_;
}

StepResult MaskedEnvironment::step(int action) {
  StepResult r = inner_->step(action);
  obs_ = r.observation;
  ++total_steps_;
  return r;
}

VarVector MaskedEnvironment::extract_vars(const Observation& obs) const {
  const VarVector full = inner_->extract_vars(obs);
  VarVector out;
  out.reserve(visible_.size());
  for (int id : visible_) out.push_back(full[id]);
  return out;
}

CausalGraph MaskedEnvironment::ground_truth_graph() const {
  const CausalGraph full = inner_->ground_truth_graph();
  const int n = full.size();
  std::vector<bool> shown(n, false);
  for (int id : visible_) shown[id] = true;

  const int m = static_cast<int>(visible_.size());
  CausalGraph g(m);
  for (int a = 0; a < m; ++a) {
    // Walk forward from the cause through hidden nodes only.
    std::vector<bool> seen(n, false);
    std::vector<int> stack = full.children(visible_[a]);
    while (!stack.empty()) {
      const int v = stack.back();
      stack.pop_back();
      if (seen[v]) continue;
      seen[v] = true;
      if (!shown[v]) {
        for (int c : full.children(v)) stack.push_back(c);
      }
    }
    for (int b = 0; b < m; ++b) {
      if (b != a && seen[visible_[b]]) g.set_edge(b, a);
    }
  }
  return g;
}

std::optional<int> MaskedEnvironment::final_milestone_var() const {
  const auto inner_var = inner_->final_milestone_var();
  if (!inner_var) return std::nullopt;
  const auto it = std::find(visible_.begin(), visible_.end(), *inner_var);
  if (it == visible_.end()) return std::nullopt;
  return static_cast<int>(it - visible_.begin());
}

std::unique_ptr<Environment> MaskedEnvironment::clone() const {
  auto copy = std::make_unique<MaskedEnvironment>(inner_->clone(), visible_);
  copy->obs_ = obs_;
  copy->total_steps_ = total_steps_;
  return copy;
}

}  // namespace cdhrl
