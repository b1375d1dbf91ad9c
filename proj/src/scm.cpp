#include "cdhrl/scm.hpp"

#include <algorithm>
#include <cmath>

namespace cdhrl {

void ScmHyper::validate() const {
  if (T < 0 || Fs < 0 || Qs < 0) throw nn::ConfigError("scm.T, scm.Fs and scm.Qs must be non-negative");
  if (K < 2) throw nn::ConfigError("scm.K must be at least 2");
  if (batch < 1) throw nn::ConfigError("scm.batch must be positive");
  if (hidden < 1) throw nn::ConfigError("scm.hidden must be positive");
  if (!(edge_threshold > 0.5 && edge_threshold < 1.0)) {
    throw nn::ConfigError("scm.edge_threshold must lie in (0.5, 1)");
  }
  if (!(sparsity >= 0.0)) throw nn::ConfigError("scm.sparsity must be non-negative");
  if (!(holdout >= 0.0 && holdout < 1.0)) throw nn::ConfigError("scm.holdout must lie in [0, 1)");
  if (!(lr_theta > 0.0) || !(lr_eta > 0.0)) throw nn::ConfigError("scm learning rates must be positive");
}

ScmParams make_scm(const EnvVarSchema& schema, const ScmHyper& hyper, Rng& rng) {
  ScmParams p;
  p.schema = schema;
  const int m = schema.size();
  p.eta = Eigen::MatrixXd::Zero(m, m);
  for (int i = 0; i < m; ++i) {
    const int out = schema.cardinality(i);
    p.thetas.push_back(nn::make_net({schema.one_hot_width(), hyper.hidden, hyper.hidden, out},
                                    nn::Head::Softmax, rng));
    p.adam.push_back(nn::AdamState::for_net(p.thetas.back()));
  }
  return p;
}

Eigen::MatrixXd edge_probabilities(const Eigen::MatrixXd& eta) {
  return eta.unaryExpr([](double v) { return 1.0 / (1.0 + std::exp(-v)); });
}

Configuration sample_configuration(const Eigen::MatrixXd& eta, int action_id, Rng& rng) {
  const int m = static_cast<int>(eta.rows());
  Configuration c = Configuration::Zero(m, m);
  for (int i = 0; i < m; ++i) {
    if (i == action_id) continue;
    for (int j = 0; j < m; ++j) {
      if (i == j) {
        c(i, j) = 1;
      } else {
        const double p = 1.0 / (1.0 + std::exp(-eta(i, j)));
        c(i, j) = bernoulli(rng, p) ? 1 : 0;
      }
    }
  }
  return c;
}

void masked_input(const EnvVarSchema& schema, const Configuration& config, int i,
                  const VarVector& x_t, double* out) {
  std::fill(out, out + schema.one_hot_width(), 0.0);
  for (int j = 0; j < schema.size(); ++j) {
    if (config(i, j)) out[schema.offset(j) + x_t[j]] = 1.0;
  }
}

Eigen::VectorXd predict_var(const ScmParams& params, int i, const Configuration& config,
                            const VarVector& x_t) {
  Eigen::VectorXd in(params.schema.one_hot_width());
  masked_input(params.schema, config, i, x_t, in.data());
  return nn::forward(params.thetas[i], in);
}

namespace {

enum class Part { Fit, Score };

std::vector<const VarPair*> select(const std::vector<VarPair>& pairs, double share, Part part) {
  std::vector<const VarPair*> out;
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    if (share <= 0.0 || is_held_out(k, share) == (part == Part::Score)) out.push_back(&pairs[k]);
  }
  return out;
}

std::vector<const VarPair*> pool(const InterventionDataset& data, double share, Part part) {
  std::vector<const VarPair*> all;
  for (const auto& [target, pairs] : data) {
    const auto some = select(pairs, share, part);
    all.insert(all.end(), some.begin(), some.end());
  }
  return all;
}

std::vector<const VarPair*> draw_batch(const std::vector<const VarPair*>& from, int n, Rng& rng) {
  std::vector<const VarPair*> out(n);
  const int size = static_cast<int>(from.size());
  for (int b = 0; b < n; ++b) out[b] = from[uniform_int(rng, size)];
  return out;
}

nn::Batch masked_batch(const EnvVarSchema& schema, const Configuration& config, int i,
                       const std::vector<const VarPair*>& pairs) {
  nn::Batch batch;
  const int n = static_cast<int>(pairs.size());
  batch.inputs.resize(schema.one_hot_width(), n);
  batch.targets.resize(n);
  for (int b = 0; b < n; ++b) {
    masked_input(schema, config, i, pairs[b]->x_t, batch.inputs.col(b).data());
    batch.targets[b] = pairs[b]->x_t1[i];
  }
  return batch;
}

double summed_nll(const nn::DenseNet& net, const nn::Batch& batch) {
  const Eigen::MatrixXd probs = nn::forward(net, batch.inputs);
  double total = 0.0;
  for (int b = 0; b < batch.size(); ++b) {
    total -= std::log(std::max(probs(batch.targets[b], b), nn::kProbabilityFloor));
  }
  return total;
}

}  // namespace

bool is_held_out(std::size_t k, double share) {
  return std::floor((k + 1) * share) > std::floor(k * share);
}

double function_learning_step(ScmParams& params, const ScmHyper& hyper,
                              const InterventionDataset& data, Rng& rng,
                              StepDiagnostics* diag) {
  const auto all = pool(data, hyper.holdout, Part::Fit);
  if (all.empty()) {
    if (diag) diag->empty_data = true;
    return 0.0;
  }
  const EnvVarSchema& schema = params.schema;
  const int action = schema.action_id();
  double total = 0.0;
  int counted = 0;
  for (int i = 0; i < schema.size(); ++i) {
    if (i == action) continue;
    const Configuration config = sample_configuration(params.eta, action, rng);
    const auto pairs = draw_batch(all, hyper.batch, rng);
    const nn::Batch batch = masked_batch(schema, config, i, pairs);
    const auto lg = nn::backward(params.thetas[i], batch);
    nn::adam_step(params.thetas[i], lg.grads, params.adam[i], hyper.lr_theta);
    total += lg.loss;
    ++counted;
  }
  return counted ? total / counted : 0.0;
}

double edge_gradient(double sigma, const std::vector<int>& draws,
                     const std::vector<double>& nll_per_draw, bool* underflow) {
  const double best = *std::min_element(nll_per_draw.begin(), nll_per_draw.end());
  std::vector<double> w(draws.size());
  double norm = 0.0;
  for (std::size_t k = 0; k < draws.size(); ++k) {
    w[k] = std::exp(-(nll_per_draw[k] - best));
    norm += w[k];
  }
  if (!(norm > 0.0) || !std::isfinite(norm)) {
    if (underflow) *underflow = true;
    return 0.0;
  }
  if (underflow) *underflow = false;
  double g = 0.0;
  for (std::size_t k = 0; k < draws.size(); ++k) g += (sigma - draws[k]) * w[k] / norm;
  return g;
}

void structure_learning_step(ScmParams& params, const ScmHyper& hyper,
                             const InterventionDataset& data, const VarSet& s_iv,
                             Rng& rng, StepDiagnostics* diag) {
  const EnvVarSchema& schema = params.schema;
  const int m = schema.size();
  const int action = schema.action_id();
  const auto all = pool(data, hyper.holdout, Part::Score);

  for (int j : s_iv) {
    std::vector<const VarPair*> source;
    if (j == action) {
      source = all;
    } else if (auto it = data.find(j); it != data.end()) {
      source = select(it->second, hyper.holdout, Part::Score);
    }
    if (source.empty()) {
      if (diag) diag->empty_data = true;
      continue;
    }
    const auto pairs = draw_batch(source, hyper.batch, rng);

    std::vector<std::vector<int>> draws(m);
    std::vector<std::vector<double>> scores(m);
    for (int k = 0; k < hyper.K; ++k) {
      const Configuration config = sample_configuration(params.eta, action, rng);
      for (int i = 0; i < m; ++i) {
        if (i == action || i == j) continue;
        draws[i].push_back(config(i, j));
        scores[i].push_back(summed_nll(params.thetas[i], masked_batch(schema, config, i, pairs)));
      }
    }
    for (int i = 0; i < m; ++i) {
      if (i == action || i == j) continue;
      const double sigma = 1.0 / (1.0 + std::exp(-params.eta(i, j)));
      bool underflow = false;
      const double g = edge_gradient(sigma, draws[i], scores[i], &underflow);
      if (underflow) {
        if (diag) ++diag->skipped_edges;
        continue;
      }
      params.eta(i, j) -= hyper.lr_eta * (g + hyper.sparsity * sigma * (1.0 - sigma));
    }
  }
}

CausalGraph threshold_graph(const Eigen::MatrixXd& sigma, double threshold,
                            const VarSet& s_iv, int action_id) {
  const int m = static_cast<int>(sigma.rows());
  CausalGraph g(m);
  for (int i = 0; i < m; ++i) {
    if (i == action_id) continue;
    for (int j : s_iv) {
      if (j != i && sigma(i, j) > threshold) g.set_edge(i, j);
    }
  }
  return g;
}

DiscoverResult discover(ScmParams& params, const ScmHyper& hyper,
                        const InterventionDataset& data, const VarSet& s_iv, Rng& rng) {
  DiscoverResult r;
  StepDiagnostics diag;
  for (int t = 0; t < hyper.T; ++t) {
    for (int s = 0; s < hyper.Fs; ++s) r.last_nll = function_learning_step(params, hyper, data, rng, &diag);
    for (int s = 0; s < hyper.Qs; ++s) structure_learning_step(params, hyper, data, s_iv, rng, &diag);
  }
  r.sigma = edge_probabilities(params.eta);
  r.graph = threshold_graph(r.sigma, hyper.edge_threshold, s_iv, params.schema.action_id());
  r.skipped_edges = diag.skipped_edges;
  r.empty_data = diag.empty_data;
  return r;
}

}  // namespace cdhrl
