#include <doctest.h>

#include <cmath>

#include "cdhrl/numeric.hpp"
#include "oracles.hpp"

using namespace cdhrl;

namespace {

nn::Batch random_batch(const nn::DenseNet& net, int n, Rng& rng) {
  nn::Batch b;
  b.inputs = Eigen::MatrixXd(net.input_dim(), n);
  for (Eigen::Index k = 0; k < b.inputs.size(); ++k) b.inputs.data()[k] = 2.0 * uniform01(rng) - 1.0;
  for (int i = 0; i < n; ++i) {
    b.targets.push_back(uniform_int(rng, net.output_dim()));
    b.values.push_back(2.0 * uniform01(rng) - 1.0);
  }
  return b;
}

}  // namespace

TEST_CASE("backward matches central differences on random nets") {
  Rng rng(7);
  for (int trial = 0; trial < 30; ++trial) {
    const auto head = trial % 2 ? nn::Head::Softmax : nn::Head::Values;
    const auto net = nn::make_net({2 + uniform_int(rng, 4), 3 + uniform_int(rng, 4), 2 + uniform_int(rng, 3)}, head, rng);
    const auto batch = random_batch(net, 5, rng);
    CHECK(oracle::finite_difference_error(net, batch, 1e-6) < 1e-4);
    CHECK(nn::grad_check(net, batch, 1e-6) < 1e-4);
  }
}

TEST_CASE("softmax columns are normalized and shift invariant") {
  Rng rng(3);
  Eigen::MatrixXd logits(4, 6);
  for (Eigen::Index k = 0; k < logits.size(); ++k) logits.data()[k] = 40.0 * uniform01(rng) - 20.0;
  const auto p = nn::softmax_columns(logits);
  const auto q = nn::softmax_columns((logits.array() + 123.0).matrix());
  for (Eigen::Index c = 0; c < p.cols(); ++c) CHECK(std::abs(p.col(c).sum() - 1.0) < 1e-12);
  CHECK((p - q).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("zero network predicts uniformly and has NLL ln k") {
  const auto net = nn::make_zero_net({5, 4, 3}, nn::Head::Softmax);
  const Eigen::VectorXd p = nn::forward(net, Eigen::VectorXd(Eigen::VectorXd::Ones(5)));
  for (int k = 0; k < 3; ++k) CHECK(p(k) == doctest::Approx(1.0 / 3.0));
  nn::Batch b{Eigen::MatrixXd::Ones(5, 2), {0, 2}, {}};
  CHECK(nn::loss(net, b) == doctest::Approx(std::log(3.0)));
}

TEST_CASE("nll floors vanishing probabilities") {
  const std::vector<double> p{1.0, 0.0};
  CHECK(nn::nll(p, 1) == doctest::Approx(-std::log(nn::kProbabilityFloor)));
  CHECK(nn::nll(p, 0) == doctest::Approx(0.0));
  CHECK_THROWS_AS(nn::nll(p, 2), nn::ConfigError);
}

TEST_CASE("values head loss is the mean squared error of the selected output") {
  auto net = nn::make_zero_net({1, 2}, nn::Head::Values);
  net.biases[0] << 1.0, 3.0;
  nn::Batch b{Eigen::MatrixXd::Zero(1, 2), {0, 1}, {0.0, 1.0}};
  // ((1-0)^2 + (3-1)^2) / 2
  CHECK(nn::loss(net, b) == doctest::Approx(2.5));
}

TEST_CASE("adam leaves parameters unchanged under zero gradients") {
  Rng rng(11);
  auto net = nn::make_net({3, 4, 2}, nn::Head::Values, rng);
  const auto before = net;
  auto state = nn::AdamState::for_net(net);
  for (int s = 0; s < 5; ++s) nn::adam_step(net, nn::Gradients::zeros_like(net), state, 0.1);
  for (int l = 0; l < net.layer_count(); ++l) {
    CHECK(net.weights[l] == before.weights[l]);
    CHECK(net.biases[l] == before.biases[l]);
  }
}

TEST_CASE("first adam step moves every parameter by lr against its gradient sign") {
  Rng rng(5);
  auto net = nn::make_net({2, 2}, nn::Head::Values, rng);
  const auto before = net;
  auto state = nn::AdamState::for_net(net);
  auto g = nn::Gradients::zeros_like(net);
  g.weights[0] << 0.5, -2.0, 3.0, -0.1;
  g.biases[0] << 1.0, -1.0;
  nn::adam_step(net, g, state, 0.01);
  // m_hat = g, v_hat = g^2, so the step is lr * g / (|g| + eps).
  for (Eigen::Index k = 0; k < 4; ++k) {
    const double gk = g.weights[0].data()[k];
    const double expect = before.weights[0].data()[k] - 0.01 * gk / (std::abs(gk) + 1e-8);
    CHECK(net.weights[0].data()[k] == doctest::Approx(expect).epsilon(1e-12));
  }
}

TEST_CASE("growing inputs and outputs preserves existing outputs") {
  Rng rng(9);
  auto net = nn::make_net({3, 5, 2}, nn::Head::Values, rng);
  auto state = nn::AdamState::for_net(net);
  Eigen::VectorXd x(3);
  x << 0.3, -1.0, 0.7;
  const Eigen::VectorXd before = nn::forward(net, x);
  nn::grow_inputs(net, state, 2);
  nn::grow_outputs(net, state, 3, rng);
  CHECK(net.input_dim() == 5);
  CHECK(net.output_dim() == 5);
  Eigen::VectorXd wide(5);
  wide << 0.3, -1.0, 0.7, 1.0, -4.0;
  const Eigen::VectorXd after = nn::forward(net, wide);
  CHECK(std::abs(after(0) - before(0)) < 1e-12);
  CHECK(std::abs(after(1) - before(1)) < 1e-12);
  nn::adam_step(net, nn::Gradients::zeros_like(net), state, 0.1);
}

TEST_CASE("invalid shapes are rejected") {
  CHECK_THROWS_AS(nn::make_zero_net({3}, nn::Head::Values), nn::ConfigError);
  CHECK_THROWS_AS(nn::make_zero_net({3, 0, 2}, nn::Head::Values), nn::ConfigError);
  const auto net = nn::make_zero_net({3, 2}, nn::Head::Softmax);
  CHECK_THROWS_AS(nn::forward(net, Eigen::VectorXd(Eigen::VectorXd::Zero(4))), nn::ConfigError);
}
