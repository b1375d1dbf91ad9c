#pragma once

// Structural causal model over environment variables: edge logits eta and one
// masked MLP per variable, fitted alternately on interventional data.

#include <map>
#include <set>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "cdhrl/causal_graph.hpp"
#include "cdhrl/env.hpp"
#include "cdhrl/numeric.hpp"
#include "cdhrl/random.hpp"

namespace cdhrl {

struct ScmHyper {
  int T = 50;
  int Fs = 1000;
  int Qs = 100;
  int K = 25;
  int batch = 256;
  double edge_threshold = 0.8;
  double lr_theta = 5e-3;
  double lr_eta = 5e-2;
  int hidden = 128;
  // Share of every dataset reserved for scoring configurations; the networks
  // never train on it.
  double holdout = 0.25;
  // Weight of the penalty sparsity * sigmoid(eta_ij) added to the structure loss.
  double sparsity = 0.2;

  void validate() const;
};

struct VarPair {
  VarVector x_t;
  VarVector x_t1;
};

// Pairs keyed by the intervened variable (the Action variable for bootstrap data).
using InterventionDataset = std::map<int, std::vector<VarPair>>;

using VarSet = std::set<int>;

// Binary M x M; entry (i, j) == 1 lets x_t[j] feed the model of X_i.
using Configuration = Eigen::Matrix<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic>;

struct ScmParams {
  EnvVarSchema schema;
  Eigen::MatrixXd eta;
  // One network per variable; the Action variable's entry is unused.
  std::vector<nn::DenseNet> thetas;
  std::vector<nn::AdamState> adam;
};

ScmParams make_scm(const EnvVarSchema& schema, const ScmHyper& hyper, Rng& rng);

Eigen::MatrixXd edge_probabilities(const Eigen::MatrixXd& eta);

// Off-diagonal entries ~ Bernoulli(sigmoid(eta)); the diagonal is always 1
// and the Action row is always 0 (the action is never an effect).
Configuration sample_configuration(const Eigen::MatrixXd& eta, int action_id, Rng& rng);

// Network input for X_i: one-hot x_t with the blocks of non-parents zeroed.
void masked_input(const EnvVarSchema& schema, const Configuration& config, int i,
                  const VarVector& x_t, double* out);

Eigen::VectorXd predict_var(const ScmParams& params, int i, const Configuration& config,
                            const VarVector& x_t);

struct StepDiagnostics {
  bool empty_data = false;
  int skipped_edges = 0;
};

// Pair k of a dataset is held out when floor((k + 1) * share) > floor(k * share).
bool is_held_out(std::size_t k, double share);

// One Adam step per variable on a batch pooled over all datasets.
double function_learning_step(ScmParams& params, const ScmHyper& hyper,
                              const InterventionDataset& data, Rng& rng,
                              StepDiagnostics* diag = nullptr);

// Score-function update of eta_ij for every cause j in s_iv. Column j is scored
// on the data collected while intervening on j; the Action column uses every
// pair, since actions are uniformly random in all collected data.
void structure_learning_step(ScmParams& params, const ScmHyper& hyper,
                             const InterventionDataset& data, const VarSet& s_iv,
                             Rng& rng, StepDiagnostics* diag = nullptr);

// g_ij = sum_k (sigma - c_k) w_k with w = softmax(-nll).
double edge_gradient(double sigma, const std::vector<int>& draws,
                     const std::vector<double>& nll_per_draw, bool* underflow = nullptr);

struct DiscoverResult {
  CausalGraph graph;
  Eigen::MatrixXd sigma;
  double last_nll = 0.0;
  int skipped_edges = 0;
  bool empty_data = false;
};

CausalGraph threshold_graph(const Eigen::MatrixXd& sigma, double threshold,
                            const VarSet& s_iv, int action_id);

DiscoverResult discover(ScmParams& params, const ScmHyper& hyper,
                        const InterventionDataset& data, const VarSet& s_iv, Rng& rng);

}  // namespace cdhrl
