#include "cdhrl/numeric.hpp"

#include <algorithm>
#include <cmath>

namespace cdhrl::nn {

namespace {

void check_dims(const std::vector<int>& dims) {
  if (dims.size() < 2) throw ConfigError("network needs at least two layer dims");
  for (int d : dims) {
    if (d <= 0) throw ConfigError("layer dims must be positive");
  }
}

void check_input(const DenseNet& net, Eigen::Index rows) {
  if (rows != net.input_dim()) {
    throw ConfigError("input length " + std::to_string(rows) +
                      " does not match network input " +
                      std::to_string(net.input_dim()));
  }
}

struct Activations {
  std::vector<Eigen::MatrixXd> pre;   // z_l
  std::vector<Eigen::MatrixXd> post;  // a_l, post[0] is the input
};

Activations run_layers(const DenseNet& net, const Eigen::MatrixXd& inputs) {
  Activations acts;
  acts.post.push_back(inputs);
  const int layers = net.layer_count();
  for (int l = 0; l < layers; ++l) {
    Eigen::MatrixXd z = net.weights[l] * acts.post.back();
    z.colwise() += net.biases[l];
    acts.pre.push_back(z);
    if (l + 1 < layers) acts.post.push_back(z.cwiseMax(0.0));
  }
  return acts;
}

Eigen::MatrixXd output_delta(const DenseNet& net, const Batch& batch,
                             const Eigen::MatrixXd& out, double* loss_out) {
  const int n = batch.size();
  const double inv = 1.0 / n;
  double loss_sum = 0.0;
  Eigen::MatrixXd delta;
  if (net.head == Head::Softmax) {
    delta = softmax_columns(out);
    for (int b = 0; b < n; ++b) {
      const int t = batch.targets[b];
      loss_sum -= std::log(std::max(delta(t, b), kProbabilityFloor));
      delta(t, b) -= 1.0;
    }
    delta *= inv;
  } else {
    delta = Eigen::MatrixXd::Zero(out.rows(), out.cols());
    for (int b = 0; b < n; ++b) {
      const int t = batch.targets[b];
      const double err = out(t, b) - batch.values[b];
      loss_sum += err * err;
      delta(t, b) = 2.0 * err * inv;
    }
  }
  if (loss_out) *loss_out = loss_sum * inv;
  return delta;
}

void check_batch(const DenseNet& net, const Batch& batch) {
  if (batch.size() == 0) throw ConfigError("empty batch");
  check_input(net, batch.inputs.rows());
  if (static_cast<int>(batch.targets.size()) != batch.size()) {
    throw ConfigError("batch targets do not match batch size");
  }
  if (net.head == Head::Values &&
      static_cast<int>(batch.values.size()) != batch.size()) {
    throw ConfigError("batch values do not match batch size");
  }
  for (int t : batch.targets) {
    if (t < 0 || t >= net.output_dim()) throw ConfigError("target out of range");
  }
}

}  // namespace

std::size_t DenseNet::parameter_count() const {
  std::size_t n = 0;
  for (std::size_t l = 0; l < weights.size(); ++l) {
    n += weights[l].size() + biases[l].size();
  }
  return n;
}

DenseNet make_zero_net(std::vector<int> dims, Head head) {
  check_dims(dims);
  DenseNet net;
  net.head = head;
  for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
    net.weights.push_back(Eigen::MatrixXd::Zero(dims[l + 1], dims[l]));
    net.biases.push_back(Eigen::VectorXd::Zero(dims[l + 1]));
  }
  net.dims = std::move(dims);
  return net;
}

DenseNet make_net(std::vector<int> dims, Head head, Rng& rng) {
  DenseNet net = make_zero_net(std::move(dims), head);
  for (int l = 0; l < net.layer_count(); ++l) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(net.dims[l]));
    auto draw = [&] { return (2.0 * uniform01(rng) - 1.0) * bound; };
    for (Eigen::Index c = 0; c < net.weights[l].cols(); ++c) {
      for (Eigen::Index r = 0; r < net.weights[l].rows(); ++r) {
        net.weights[l](r, c) = draw();
      }
    }
    for (Eigen::Index r = 0; r < net.biases[l].size(); ++r) {
      net.biases[l](r) = draw();
    }
  }
  return net;
}

Eigen::MatrixXd softmax_columns(const Eigen::MatrixXd& logits) {
  Eigen::MatrixXd out(logits.rows(), logits.cols());
  for (Eigen::Index c = 0; c < logits.cols(); ++c) {
    const double shift = logits.col(c).maxCoeff();
    out.col(c) = (logits.col(c).array() - shift).exp();
    out.col(c) /= out.col(c).sum();
  }
  return out;
}

Eigen::MatrixXd forward(const DenseNet& net, const Eigen::MatrixXd& inputs) {
  check_input(net, inputs.rows());
  Eigen::MatrixXd out = std::move(run_layers(net, inputs).pre.back());
  if (net.head == Head::Softmax) return softmax_columns(out);
  return out;
}

Eigen::VectorXd forward(const DenseNet& net, const Eigen::VectorXd& input) {
  Eigen::MatrixXd m = input;
  return forward(net, m).col(0);
}

double nll(std::span<const double> probs, int target) {
  if (target < 0 || target >= static_cast<int>(probs.size())) {
    throw ConfigError("nll target out of range");
  }
  return -std::log(std::max(probs[target], kProbabilityFloor));
}

Gradients Gradients::zeros_like(const DenseNet& net) {
  Gradients g;
  for (int l = 0; l < net.layer_count(); ++l) {
    g.weights.push_back(Eigen::MatrixXd::Zero(net.weights[l].rows(),
                                              net.weights[l].cols()));
    g.biases.push_back(Eigen::VectorXd::Zero(net.biases[l].size()));
  }
  return g;
}

double Gradients::max_abs() const {
  double m = 0.0;
  for (const auto& w : weights) m = std::max(m, w.cwiseAbs().maxCoeff());
  for (const auto& b : biases) m = std::max(m, b.cwiseAbs().maxCoeff());
  return m;
}

double loss(const DenseNet& net, const Batch& batch) {
  check_batch(net, batch);
  const Eigen::MatrixXd out = std::move(run_layers(net, batch.inputs).pre.back());
  double value = 0.0;
  output_delta(net, batch, out, &value);
  return value;
}

LossAndGradients backward(const DenseNet& net, const Batch& batch) {
  check_batch(net, batch);
  const Activations acts = run_layers(net, batch.inputs);
  LossAndGradients result;
  result.grads = Gradients::zeros_like(net);
  Eigen::MatrixXd delta = output_delta(net, batch, acts.pre.back(), &result.loss);
  for (int l = net.layer_count() - 1; l >= 0; --l) {
    result.grads.weights[l].noalias() = delta * acts.post[l].transpose();
    result.grads.biases[l] = delta.rowwise().sum();
    if (l > 0) {
      Eigen::MatrixXd back = net.weights[l].transpose() * delta;
      delta = (acts.pre[l - 1].array() > 0.0).select(back, 0.0);
    }
  }
  return result;
}

AdamState AdamState::for_net(const DenseNet& net) {
  AdamState s;
  s.first_moment = Gradients::zeros_like(net);
  s.second_moment = Gradients::zeros_like(net);
  return s;
}

void adam_step(DenseNet& net, const Gradients& grads, AdamState& state,
               double lr) {
  if (grads.weights.size() != net.weights.size() ||
      state.first_moment.weights.size() != net.weights.size()) {
    throw ConfigError("adam_step: parameter and gradient shapes differ");
  }
  ++state.step_count;
  const double t = static_cast<double>(state.step_count);
  const double c1 = 1.0 - std::pow(state.beta1, t);
  const double c2 = 1.0 - std::pow(state.beta2, t);
  const double b1 = state.beta1;
  const double b2 = state.beta2;
  const double eps = state.epsilon;

  auto update = [&](auto& param, const auto& g, auto& m, auto& v) {
    m = b1 * m + (1.0 - b1) * g;
    v = b2 * v + (1.0 - b2) * g.cwiseProduct(g);
    param.array() -=
        lr * (m.array() / c1) / ((v.array() / c2).sqrt() + eps);
  };
  for (int l = 0; l < net.layer_count(); ++l) {
    update(net.weights[l], grads.weights[l], state.first_moment.weights[l],
           state.second_moment.weights[l]);
    update(net.biases[l], grads.biases[l], state.first_moment.biases[l],
           state.second_moment.biases[l]);
  }
}

double grad_check(const DenseNet& net, const Batch& batch, double h) {
  if (h <= 0.0) throw ConfigError("grad_check step must be positive");
  const Gradients analytic = backward(net, batch).grads;
  DenseNet probe = net;
  double worst = 0.0;
  auto compare = [&](double& param, double a) {
    const double saved = param;
    param = saved + h;
    const double up = loss(probe, batch);
    param = saved - h;
    const double down = loss(probe, batch);
    param = saved;
    const double numeric = (up - down) / (2.0 * h);
    const double denom = std::max({std::abs(a), std::abs(numeric), 1e-6});
    worst = std::max(worst, std::abs(a - numeric) / denom);
  };
  for (int l = 0; l < probe.layer_count(); ++l) {
    for (Eigen::Index i = 0; i < probe.weights[l].size(); ++i) {
      compare(probe.weights[l].data()[i], analytic.weights[l].data()[i]);
    }
    for (Eigen::Index i = 0; i < probe.biases[l].size(); ++i) {
      compare(probe.biases[l].data()[i], analytic.biases[l].data()[i]);
    }
  }
  return worst;
}

void grow_inputs(DenseNet& net, AdamState& state, int extra) {
  if (extra <= 0) return;
  auto widen = [extra](Eigen::MatrixXd& m) {
    const Eigen::Index old = m.cols();
    m.conservativeResize(Eigen::NoChange, old + extra);
    m.rightCols(extra).setZero();
  };
  widen(net.weights.front());
  widen(state.first_moment.weights.front());
  widen(state.second_moment.weights.front());
  net.dims.front() += extra;
}

void grow_outputs(DenseNet& net, AdamState& state, int extra, Rng& rng) {
  if (extra <= 0) return;
  const double bound = 1.0 / std::sqrt(static_cast<double>(net.dims[net.dims.size() - 2]));
  auto taller = [extra](Eigen::MatrixXd& m) {
    const Eigen::Index old = m.rows();
    m.conservativeResize(old + extra, Eigen::NoChange);
    m.bottomRows(extra).setZero();
  };
  auto longer = [extra](Eigen::VectorXd& v) {
    const Eigen::Index old = v.size();
    v.conservativeResize(old + extra);
    v.tail(extra).setZero();
  };
  Eigen::MatrixXd& w = net.weights.back();
  Eigen::VectorXd& b = net.biases.back();
  const Eigen::Index old_rows = w.rows();
  taller(w);
  longer(b);
  for (Eigen::Index r = old_rows; r < w.rows(); ++r) {
    for (Eigen::Index c = 0; c < w.cols(); ++c) {
      w(r, c) = (2.0 * uniform01(rng) - 1.0) * bound;
    }
    b(r) = (2.0 * uniform01(rng) - 1.0) * bound;
  }
  taller(state.first_moment.weights.back());
  taller(state.second_moment.weights.back());
  longer(state.first_moment.biases.back());
  longer(state.second_moment.biases.back());
  net.dims.back() += extra;
}

}  // namespace cdhrl::nn
