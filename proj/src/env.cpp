#include "cdhrl/env.hpp"

#include <algorithm>
#include <set>

namespace cdhrl {

std::string to_string(VarKind kind) {
  switch (kind) {
    case VarKind::Action: return "action";
    case VarKind::Item: return "item";
    case VarKind::StateValue: return "state_value";
    case VarKind::Distractor: return "distractor";
  }
  return "item";
}

VarKind var_kind_from_string(const std::string& s) {
  if (s == "action") return VarKind::Action;
  if (s == "item") return VarKind::Item;
  if (s == "state_value") return VarKind::StateValue;
  if (s == "distractor") return VarKind::Distractor;
  throw SchemaError("unknown variable kind '" + s + "'");
}

EnvVarSchema::EnvVarSchema(std::vector<VarSpec> vars) : vars_(std::move(vars)) {
  std::set<std::string> names;
  for (int i = 0; i < size(); ++i) {
    const VarSpec& v = vars_[i];
    if (v.id != i) throw SchemaError("var ids must be 0..M-1 in order");
    if (v.cardinality < 2) throw SchemaError("cardinality of " + v.name + " below 2");
    if (!names.insert(v.name).second) throw SchemaError("duplicate variable " + v.name);
    if (v.kind == VarKind::Action) {
      if (action_id_ >= 0) throw SchemaError("more than one Action variable");
      action_id_ = i;
    }
    offsets_.push_back(width_);
    width_ += v.cardinality;
  }
  if (action_id_ < 0) throw SchemaError("schema has no Action variable");
}

std::optional<int> EnvVarSchema::find(const std::string& name) const {
  for (const auto& v : vars_) {
    if (v.name == name) return v.id;
  }
  return std::nullopt;
}

std::vector<std::string> EnvVarSchema::names() const {
  std::vector<std::string> out;
  for (const auto& v : vars_) out.push_back(v.name);
  return out;
}

bool EnvVarSchema::conforms(const VarVector& x) const {
  if (static_cast<int>(x.size()) != size()) return false;
  for (int i = 0; i < size(); ++i) {
    if (x[i] < 0 || x[i] >= vars_[i].cardinality) return false;
  }
  return true;
}

void EnvVarSchema::check(const VarVector& x) const {
  if (!conforms(x)) throw SchemaError("variable vector violates schema bounds");
}

nlohmann::json EnvVarSchema::to_json() const {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& v : vars_) {
    arr.push_back({{"id", v.id},
                   {"name", v.name},
                   {"cardinality", v.cardinality},
                   {"kind", to_string(v.kind)}});
  }
  return {{"vars", arr}};
}

EnvVarSchema EnvVarSchema::from_json(const nlohmann::json& j) {
  std::vector<VarSpec> vars;
  for (const auto& v : j.at("vars")) {
    vars.push_back({v.at("id").get<int>(), v.at("name").get<std::string>(),
                    v.at("cardinality").get<int>(),
                    var_kind_from_string(v.at("kind").get<std::string>())});
  }
  return EnvVarSchema(std::move(vars));
}

bool EnvVarSchema::operator==(const EnvVarSchema& other) const {
  if (size() != other.size()) return false;
  for (int i = 0; i < size(); ++i) {
    const auto& a = vars_[i];
    const auto& b = other.vars_[i];
    if (a.id != b.id || a.name != b.name || a.cardinality != b.cardinality ||
        a.kind != b.kind) {
      return false;
    }
  }
  return true;
}

void encode_one_hot(const EnvVarSchema& schema, const VarVector& x, double* out) {
  std::fill(out, out + schema.one_hot_width(), 0.0);
  for (int i = 0; i < schema.size(); ++i) out[schema.offset(i) + x[i]] = 1.0;
}

std::string to_string(ChangeKind change) {
  return change == ChangeKind::Increase ? "increase" : "decrease";
}

ChangeKind change_kind_from_string(const std::string& s) {
  if (s == "increase" || s == "inc") return ChangeKind::Increase;
  if (s == "decrease" || s == "dec") return ChangeKind::Decrease;
  throw SchemaError("unknown change kind '" + s + "'");
}

int change_indicator(ChangeKind change, int before, int after) {
  return change == ChangeKind::Increase ? (after > before ? 1 : 0)
                                        : (after < before ? 1 : 0);
}

std::string describe(const Subgoal& g, const EnvVarSchema& schema) {
  return "(" + schema[g.var].name + "," +
         (g.change == ChangeKind::Increase ? "Inc" : "Dec") + ")";
}

int goal_reward(const Subgoal& g, const VarVector& x_t, const VarVector& x_t1) {
  if (g.var < 0 || g.var >= static_cast<int>(x_t.size()) ||
      g.var >= static_cast<int>(x_t1.size())) {
    throw SchemaError("subgoal variable out of range");
  }
  return change_indicator(g.change, x_t[g.var], x_t1[g.var]);
}

std::vector<Subgoal> enumerate_goal_space(const EnvVarSchema& schema) {
  std::vector<Subgoal> goals;
  for (const auto& v : schema.vars()) {
    if (v.kind == VarKind::Action) continue;
    goals.push_back({v.id, ChangeKind::Increase});
    goals.push_back({v.id, ChangeKind::Decrease});
  }
  return goals;
}

VarVector Environment::extract_vars(const Observation& obs) const {
  const int m = schema().size();
  return VarVector(obs.fields.begin(), obs.fields.begin() + m);
}

}  // namespace cdhrl
