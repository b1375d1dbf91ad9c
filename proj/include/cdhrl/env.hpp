#pragma once

// The environment-variable layer shared by causal discovery and the goal
// space: variable schemas, change indicators, subgoals and the world contract.

#include <compare>
#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "cdhrl/causal_graph.hpp"

namespace cdhrl {

class SchemaError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class VarKind { Action, Item, StateValue, Distractor };

std::string to_string(VarKind kind);
VarKind var_kind_from_string(const std::string& s);

struct VarSpec {
  int id = 0;
  std::string name;
  int cardinality = 2;
  VarKind kind = VarKind::Item;
};

// Value per var_id, 0 <= values[i] < cardinality[i].
using VarVector = std::vector<int>;

class EnvVarSchema {
 public:
  EnvVarSchema() = default;
  explicit EnvVarSchema(std::vector<VarSpec> vars);

  int size() const { return static_cast<int>(vars_.size()); }
  const VarSpec& operator[](int id) const { return vars_.at(id); }
  const std::vector<VarSpec>& vars() const { return vars_; }

  int action_id() const { return action_id_; }
  int cardinality(int id) const { return vars_.at(id).cardinality; }
  int action_count() const { return cardinality(action_id_); }
  std::optional<int> find(const std::string& name) const;
  std::vector<std::string> names() const;

  // Width of the concatenated one-hot encoding and each variable's offset.
  int one_hot_width() const { return width_; }
  int offset(int id) const { return offsets_.at(id); }

  bool conforms(const VarVector& x) const;
  void check(const VarVector& x) const;

  nlohmann::json to_json() const;
  static EnvVarSchema from_json(const nlohmann::json& j);

  bool operator==(const EnvVarSchema& other) const;

 private:
  std::vector<VarSpec> vars_;
  std::vector<int> offsets_;
  int width_ = 0;
  int action_id_ = -1;
};

// Writes the one-hot encoding of x into out[0 .. schema.one_hot_width()).
void encode_one_hot(const EnvVarSchema& schema, const VarVector& x, double* out);

enum class ChangeKind { Increase, Decrease };

std::string to_string(ChangeKind change);
ChangeKind change_kind_from_string(const std::string& s);

int change_indicator(ChangeKind change, int before, int after);

struct Subgoal {
  int var = 0;
  ChangeKind change = ChangeKind::Increase;

  auto operator<=>(const Subgoal&) const = default;
};

std::string describe(const Subgoal& g, const EnvVarSchema& schema);

int goal_reward(const Subgoal& g, const VarVector& x_t, const VarVector& x_t1);

// All non-Action variables x {Increase, Decrease}, var_id-major.
std::vector<Subgoal> enumerate_goal_space(const EnvVarSchema& schema);

struct Transition {
  VarVector x_t;
  int action = 0;
  VarVector x_t1;
  bool env_done = false;
};

// Full observation of a world. The declared variable fields come first in
// var_id order; anything after them (positions, counters) is not exposed as
// an environment variable.
struct Observation {
  std::vector<int> fields;
};

struct StepResult {
  Observation observation;
  bool done = false;
};

inline constexpr int kMilestoneCount = 5;

// Every world implements this. Variable vectors report the most recently
// executed primitive action in the Action slot (a world-defined value right
// after reset).
class Environment {
 public:
  virtual ~Environment() = default;

  virtual Observation reset(std::uint64_t seed) = 0;
  virtual StepResult step(int action) = 0;
  virtual VarVector extract_vars(const Observation& obs) const;
  virtual const EnvVarSchema& schema() const = 0;
  virtual CausalGraph ground_truth_graph() const = 0;
  // First-acquisition flags accumulated since the last reset, bit k = milestone k.
  virtual std::uint32_t milestones() const = 0;
  virtual int primitive_action_count() const = 0;
  // Sparse extrinsic reward condition used by the adaptation stage.
  virtual bool task_achieved() const = 0;
  // Variable whose first acquisition is the deepest milestone, if exposed.
  virtual std::optional<int> final_milestone_var() const = 0;
  virtual std::unique_ptr<Environment> clone() const = 0;

  const Observation& observation() const { return obs_; }
  VarVector variables() const { return extract_vars(obs_); }
  long steps_taken() const { return total_steps_; }

 protected:
  Observation obs_;
  long total_steps_ = 0;
};

}  // namespace cdhrl
