#pragma once

// Dense feed-forward networks, their gradients and the Adam optimizer.
//
// Two output heads are supported: a softmax distribution trained with
// negative log-likelihood (the per-variable generating functions of the SCM)
// and raw values trained with squared error on one selected output (Q-nets).
// Batches are column-major: each column of an input matrix is one sample.

#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "cdhrl/random.hpp"

namespace cdhrl::nn {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Head { Softmax, Values };

struct DenseNet {
  std::vector<int> dims;
  std::vector<Eigen::MatrixXd> weights;  // weights[l] is dims[l+1] x dims[l]
  std::vector<Eigen::VectorXd> biases;
  Head head = Head::Softmax;

  int input_dim() const { return dims.front(); }
  int output_dim() const { return dims.back(); }
  int layer_count() const { return static_cast<int>(weights.size()); }
  std::size_t parameter_count() const;
};

// Uniform init in [-1/sqrt(fan_in), 1/sqrt(fan_in)] for weights and biases.
DenseNet make_net(std::vector<int> dims, Head head, Rng& rng);
DenseNet make_zero_net(std::vector<int> dims, Head head);

// Hidden layers use ReLU. `inputs` is input_dim x B; result is output_dim x B.
Eigen::MatrixXd forward(const DenseNet& net, const Eigen::MatrixXd& inputs);
Eigen::VectorXd forward(const DenseNet& net, const Eigen::VectorXd& input);

// Column-wise, max-shifted.
Eigen::MatrixXd softmax_columns(const Eigen::MatrixXd& logits);

inline constexpr double kProbabilityFloor = 1e-12;

// -log(max(probs[target], 1e-12)).
double nll(std::span<const double> probs, int target);

struct Gradients {
  std::vector<Eigen::MatrixXd> weights;
  std::vector<Eigen::VectorXd> biases;

  static Gradients zeros_like(const DenseNet& net);
  double max_abs() const;
};

// Softmax head: targets[b] is the observed class, loss is mean NLL.
// Values head: targets[b] selects the output, values[b] is its regression
// target, loss is mean of (q[targets[b]] - values[b])^2.
struct Batch {
  Eigen::MatrixXd inputs;
  std::vector<int> targets;
  std::vector<double> values;

  int size() const { return static_cast<int>(inputs.cols()); }
};

double loss(const DenseNet& net, const Batch& batch);

struct LossAndGradients {
  double loss = 0.0;
  Gradients grads;
};

LossAndGradients backward(const DenseNet& net, const Batch& batch);

struct AdamState {
  Gradients first_moment;
  Gradients second_moment;
  long step_count = 0;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;

  static AdamState for_net(const DenseNet& net);
};

void adam_step(DenseNet& net, const Gradients& grads, AdamState& state,
               double lr);

// Worst relative error between backward() and central finite differences
// over every parameter. The denominator is floored at 1e-6 so parameters with
// vanishing gradient compare on an absolute scale.
double grad_check(const DenseNet& net, const Batch& batch, double h);

// Appends `extra` zero-initialised input columns to the first layer.
void grow_inputs(DenseNet& net, AdamState& state, int extra);
// Appends `extra` output units to the last layer, initialised like make_net.
void grow_outputs(DenseNet& net, AdamState& state, int extra, Rng& rng);

}  // namespace cdhrl::nn
