#include <doctest.h>

#include <cmath>

#include "cdhrl/graph_metrics.hpp"
#include "cdhrl/scm.hpp"
#include "cdhrl/worlds.hpp"

using namespace cdhrl;

namespace {

ChainCraft chain(int m, int distractors = 0) {
  ChainCraftConfig c;
  c.chain_length = m;
  c.distractor_count = distractors;
  return ChainCraft(c);
}

ScmHyper desk_hyper() {
  ScmHyper h;
  h.T = 5;
  h.Fs = 200;
  h.Qs = 50;
  h.K = 10;
  h.batch = 128;
  h.hidden = 32;
  return h;
}

// Perfect interventions: every chain variable is set uniformly at random, a
// uniformly random action is taken, and the pair is filed under `target`.
InterventionDataset perfect_data(ChainCraft& w, int per_var, Rng& rng) {
  InterventionDataset d;
  const int m = w.config().chain_length;
  for (int target = 0; target <= m; ++target) {
    for (int n = 0; n < per_var; ++n) {
      VarVector x(w.schema().size(), 0);
      x[0] = w.noop();
      for (int k = 0; k < m; ++k) x[w.chain_var(k)] = uniform_int(rng, 2);
      w.reset(next_seed(rng));
      w.set_state(x);
      const int a = uniform_int(rng, w.primitive_action_count());
      w.step(a);
      x[0] = a;
      d[target].push_back({x, w.variables()});
    }
  }
  return d;
}

}  // namespace

TEST_CASE("configuration sampling frequencies") {
  Rng rng(1);
  Eigen::MatrixXd eta = Eigen::MatrixXd::Zero(3, 3);
  int ones = 0;
  std::array<int, 4> patterns{};
  for (int n = 0; n < 10000; ++n) {
    const auto c = sample_configuration(eta, 0, rng);
    CHECK(c(1, 1) == 1);
    CHECK(c(0, 1) == 0);
    CHECK(c(0, 0) == 0);
    ones += c(1, 2);
    ++patterns[c(1, 2) * 2 + c(2, 1)];
  }
  CHECK(ones / 10000.0 >= 0.48);
  CHECK(ones / 10000.0 <= 0.52);
  for (int p : patterns) CHECK(std::abs(p / 10000.0 - 0.25) < 0.02);
  eta.setConstant(20.0);
  for (int n = 0; n < 1000; ++n) CHECK(sample_configuration(eta, 0, rng)(2, 1) == 1);
  CHECK(edge_probabilities(eta)(2, 1) > 1.0 - 1e-8);
}

TEST_CASE("masking keeps the variable itself and its sampled parents") {
  auto w = chain(2);
  Configuration c = Configuration::Zero(3, 3);
  c.diagonal().setOnes();
  c(0, 0) = 0;
  std::vector<double> buf(w.schema().one_hot_width());
  masked_input(w.schema(), c, 2, {1, 1, 0}, buf.data());
  CHECK(buf == std::vector<double>{0, 0, 0, 0, 0, 1, 0});
  c(2, 0) = 1;
  masked_input(w.schema(), c, 2, {1, 1, 0}, buf.data());
  CHECK(buf == std::vector<double>{0, 1, 0, 0, 0, 1, 0});
}

TEST_CASE("edge gradient examples") {
  CHECK(edge_gradient(0.5, {1, 0}, {-std::log(0.9), -std::log(0.1)}) == doctest::Approx(-0.4));
  CHECK(edge_gradient(0.5, {1, 0}, {0.7, 0.7}) == doctest::Approx(0.0));
  CHECK(edge_gradient(0.5, {1, 1}, {0.3, 0.3}) == doctest::Approx(-0.5));
  bool underflow = false;
  CHECK(edge_gradient(0.5, {1, 0}, {INFINITY, INFINITY}, &underflow) == 0.0);
  CHECK(underflow);
}

TEST_CASE("holdout split") {
  int held = 0;
  for (std::size_t k = 0; k < 100; ++k) held += is_held_out(k, 0.25) ? 1 : 0;
  CHECK(held == 25);
  for (std::size_t k = 0; k < 10; ++k) CHECK_FALSE(is_held_out(k, 0.0));
}

TEST_CASE("function learning: uniform first step, phase separation, fitting") {
  auto w = chain(2);
  Rng rng(2);
  ScmHyper hyper = desk_hyper();
  auto params = make_scm(w.schema(), hyper, rng);
  for (auto& t : params.thetas) t = nn::make_zero_net(t.dims, nn::Head::Softmax);
  InterventionDataset identical;
  identical[0] = std::vector<VarPair>(20, VarPair{{1, 0, 0}, {1, 1, 0}});
  const Eigen::MatrixXd eta = params.eta;
  CHECK(function_learning_step(params, hyper, identical, rng) == doctest::Approx(std::log(2.0)));
  CHECK(params.eta == eta);

  const auto data = perfect_data(w, 200, rng);
  params = make_scm(w.schema(), hyper, rng);
  params.eta.setConstant(20.0);
  double nll = 1.0;
  for (int s = 0; s < 500; ++s) nll = function_learning_step(params, hyper, data, rng);
  CHECK(nll < 0.1);
  Configuration full = Configuration::Ones(3, 3);
  full.row(0).setZero();
  const auto p = predict_var(params, 2, full, {1, 1, 0});
  CHECK(p.size() == 2);
  CHECK(p(1) > 0.9);

  StepDiagnostics diag;
  function_learning_step(params, hyper, {}, rng, &diag);
  CHECK(diag.empty_data);
}

TEST_CASE("structure learning leaves the networks untouched") {
  auto w = chain(2);
  Rng rng(3);
  const ScmHyper hyper = desk_hyper();
  auto params = make_scm(w.schema(), hyper, rng);
  const auto data = perfect_data(w, 50, rng);
  const auto before = params.thetas;
  const Eigen::MatrixXd eta = params.eta;
  structure_learning_step(params, hyper, data, {0, 1}, rng);
  for (std::size_t i = 0; i < before.size(); ++i)
    for (int l = 0; l < before[i].layer_count(); ++l) CHECK(params.thetas[i].weights[l] == before[i].weights[l]);
  CHECK(params.eta != eta);
  // Only columns in s_iv move.
  CHECK(params.eta.col(2) == eta.col(2));
}

TEST_CASE("discover with no steps yields the empty graph") {
  auto w = chain(3);
  Rng rng(4);
  ScmHyper hyper = desk_hyper();
  hyper.T = 0;
  auto params = make_scm(w.schema(), hyper, rng);
  const auto r = discover(params, hyper, perfect_data(w, 10, rng), {0, 1, 2, 3}, rng);
  CHECK(r.graph.edge_count() == 0);
  CHECK((r.sigma.array() == 0.5).all());
}

TEST_CASE("thresholding is monotone and restricted to s_iv causes") {
  Rng rng(5);
  for (int n = 0; n < 50; ++n) {
    Eigen::MatrixXd sigma(5, 5);
    for (Eigen::Index k = 0; k < sigma.size(); ++k) sigma.data()[k] = uniform01(rng);
    const VarSet s_iv{0, 2};
    const auto lo = threshold_graph(sigma, 0.6, s_iv, 0);
    const auto hi = threshold_graph(sigma, 0.85, s_iv, 0);
    for (const auto& [effect, cause] : hi.edges()) CHECK(lo.edge(effect, cause));
    for (const auto& [effect, cause] : lo.edges()) {
      CHECK(s_iv.contains(cause));
      CHECK(effect != 0);
      CHECK(effect != cause);
    }
  }
}

TEST_CASE("perfect interventions recover ChainCraft(3)") {
  auto w = chain(3);
  const auto truth = w.ground_truth_graph();
  int exact = 0;
  for (int seed = 0; seed < 10; ++seed) {
    Rng rng(100 + seed);
    const ScmHyper hyper = desk_hyper();
    auto params = make_scm(w.schema(), hyper, rng);
    const auto data = perfect_data(w, 256, rng);
    const auto r = discover(params, hyper, data, {0, 1, 2, 3}, rng);
    exact += shd(truth, r.graph) == 0 ? 1 : 0;
  }
  CHECK(exact >= 8);
}

TEST_CASE("hyperparameter validation") {
  ScmHyper h;
  h.validate();
  h.K = 1;
  CHECK_THROWS_AS(h.validate(), nn::ConfigError);
  h = ScmHyper{};
  h.edge_threshold = 0.5;
  CHECK_THROWS_AS(h.validate(), nn::ConfigError);
}
