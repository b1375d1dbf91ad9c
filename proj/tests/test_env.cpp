#include <doctest.h>

#include "cdhrl/env.hpp"
#include "cdhrl/worlds.hpp"

using namespace cdhrl;

TEST_CASE("schema validation") {
  CHECK_THROWS_AS(EnvVarSchema({{0, "A", 3, VarKind::Item}}), SchemaError);
  CHECK_THROWS_AS(EnvVarSchema({{0, "A", 3, VarKind::Action}, {2, "B", 2, VarKind::Item}}), SchemaError);
  CHECK_THROWS_AS(EnvVarSchema({{0, "A", 3, VarKind::Action}, {1, "B", 1, VarKind::Item}}), SchemaError);
  CHECK_THROWS_AS(EnvVarSchema({{0, "A", 3, VarKind::Action}, {1, "B", 2, VarKind::Action}}), SchemaError);
  const EnvVarSchema s({{0, "Action", 3, VarKind::Action}, {1, "V0", 2, VarKind::Item}, {2, "W", 4, VarKind::StateValue}});
  CHECK(s.one_hot_width() == 9);
  CHECK(s.offset(2) == 5);
  CHECK(s.conforms({2, 1, 3}));
  CHECK_FALSE(s.conforms({2, 2, 0}));
  CHECK_FALSE(s.conforms({0, 0}));
  CHECK_THROWS_AS(s.check({0, 0, 4}), SchemaError);
  CHECK(EnvVarSchema::from_json(s.to_json()) == s);
  std::vector<double> buf(9);
  encode_one_hot(s, {1, 0, 2}, buf.data());
  CHECK(buf == std::vector<double>{0, 1, 0, 1, 0, 0, 0, 1, 0});
}

TEST_CASE("change indicator and goal reward") {
  CHECK(change_indicator(ChangeKind::Increase, 0, 1) == 1);
  CHECK(change_indicator(ChangeKind::Increase, 1, 1) == 0);
  CHECK(change_indicator(ChangeKind::Decrease, 2, 0) == 1);
  CHECK(change_indicator(ChangeKind::Decrease, 0, 1) == 0);
  CHECK(goal_reward({1, ChangeKind::Increase}, {0, 0, 5}, {3, 1, 0}) == 1);
  CHECK(goal_reward({2, ChangeKind::Increase}, {0, 0, 5}, {3, 1, 0}) == 0);
  CHECK_THROWS_AS(goal_reward({3, ChangeKind::Increase}, {0, 0, 0}, {0, 0, 0}), SchemaError);
  CHECK(change_kind_from_string("dec") == ChangeKind::Decrease);
  CHECK_THROWS_AS(change_kind_from_string("up"), SchemaError);
}

TEST_CASE("goal space of ChainCraft(3) has six subgoals") {
  ChainCraftConfig c;
  c.chain_length = 3;
  c.distractor_count = 0;
  ChainCraft w(c);
  const auto goals = enumerate_goal_space(w.schema());
  CHECK(goals.size() == 6);
  CHECK(describe(goals[0], w.schema()) == "(V0,Inc)");
  CHECK(describe(goals[5], w.schema()) == "(V2,Dec)");
}
