#include <doctest.h>

#include "cdhrl/graph_metrics.hpp"
#include "cdhrl/worlds.hpp"
#include "oracles.hpp"

using namespace cdhrl;

namespace {

CausalGraph chain3_truth() {
  ChainCraftConfig c;
  c.chain_length = 3;
  c.distractor_count = 0;
  return ChainCraft(c).ground_truth_graph();
}

std::vector<bool> given(int m, std::initializer_list<int> nodes) {
  std::vector<bool> z(m, false);
  for (int v : nodes) z[v] = true;
  return z;
}

}  // namespace

TEST_CASE("shd examples") {
  const auto t = chain3_truth();
  CHECK(shd(t, t) == 0);
  auto minus = t;
  minus.set_edge(3, 2, false);
  CHECK(shd(t, minus) == 1);
  CHECK(shd(CausalGraph(4), t) == 5);
  CHECK_THROWS_AS(shd(CausalGraph(3), t), GraphError);
}

TEST_CASE("shd agrees with a naive count") {
  Rng rng(1);
  for (int n = 0; n < 200; ++n) {
    const int m = 2 + uniform_int(rng, 7);
    const auto a = oracle::random_graph(m, 0.3, rng), b = oracle::random_graph(m, 0.3, rng);
    CHECK(shd(a, b) == oracle::naive_shd(a, b));
  }
}

TEST_CASE("sid pinned values") {
  CausalGraph truth(2);
  truth.set_edge(1, 0);
  // Empty estimate: adjusting do(X1) on X0 by the empty set yields P(X0 | X1),
  // which differs from P(X0). Reversing the edge also wrongly claims that X0
  // has no effect on X1.
  CausalGraph reversed(2);
  reversed.set_edge(0, 1);
  CHECK(sid(truth, CausalGraph(2)) == 1);
  CHECK(sid(truth, reversed) == 2);
  CHECK(sid(truth, truth) == 0);
  Rng rng(3);
  CHECK(oracle::numeric_sid(truth, CausalGraph(2), rng) == 1);
  CHECK(oracle::numeric_sid(truth, reversed, rng) == 2);
  const auto t = chain3_truth();
  CHECK(sid(t, t) == 0);
  CHECK(sid(CausalGraph(3), CausalGraph(3)) == 0);
}

TEST_CASE("sid errors") {
  CausalGraph cyclic(2);
  cyclic.set_edge(0, 1);
  cyclic.set_edge(1, 0);
  CHECK_THROWS_AS(sid(cyclic, CausalGraph(2)), GraphError);
  CHECK_THROWS_AS(sid(CausalGraph(2), cyclic), GraphError);
  CHECK_THROWS_AS(sid(CausalGraph(13), CausalGraph(13)), GraphError);
}

TEST_CASE("sid agrees with interventional distributions on all 3-node DAG pairs") {
  const auto dags = oracle::all_dags(3);
  CHECK(dags.size() == 25);
  Rng rng(8);
  for (const auto& t : dags)
    for (const auto& e : dags) CHECK(sid(t, e) == oracle::numeric_sid(t, e, rng));
}

TEST_CASE("d-separation basics") {
  CausalGraph chain(3);  // 0 -> 1 -> 2
  chain.set_edge(1, 0);
  chain.set_edge(2, 1);
  CHECK_FALSE(d_separated(chain, 0, 2, given(3, {})));
  CHECK(d_separated(chain, 0, 2, given(3, {1})));
  CausalGraph fork(3);  // 0 <- 1 -> 2
  fork.set_edge(0, 1);
  fork.set_edge(2, 1);
  CHECK_FALSE(d_separated(fork, 0, 2, given(3, {})));
  CHECK(d_separated(fork, 0, 2, given(3, {1})));
  CausalGraph collider(4);  // 0 -> 1 <- 2, 1 -> 3
  collider.set_edge(1, 0);
  collider.set_edge(1, 2);
  collider.set_edge(3, 1);
  CHECK(d_separated(collider, 0, 2, given(4, {})));
  CHECK_FALSE(d_separated(collider, 0, 2, given(4, {1})));
  CHECK_FALSE(d_separated(collider, 0, 2, given(4, {3})));
}
