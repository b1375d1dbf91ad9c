#pragma once

// Independent reference computations used to check the library.

#include <cmath>
#include <vector>

#include "cdhrl/causal_graph.hpp"
#include "cdhrl/env.hpp"
#include "cdhrl/hrl.hpp"
#include "cdhrl/numeric.hpp"
#include "cdhrl/random.hpp"

namespace oracle {

inline int naive_shd(const cdhrl::CausalGraph& a, const cdhrl::CausalGraph& b) {
  int n = 0;
  for (int i = 0; i < a.size(); ++i)
    for (int j = 0; j < a.size(); ++j)
      if (i != j) n += a.edge(i, j) == b.edge(i, j) ? 0 : 1;
  return n;
}

inline cdhrl::CausalGraph random_graph(int m, double p, cdhrl::Rng& rng) {
  cdhrl::CausalGraph g(m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j)
      if (i != j && cdhrl::bernoulli(rng, p)) g.set_edge(i, j);
  return g;
}

// Random DAG: edges only from lower to higher position in a random order.
inline cdhrl::CausalGraph random_dag(int m, double p, cdhrl::Rng& rng) {
  std::vector<int> order(m);
  for (int i = 0; i < m; ++i) order[i] = i;
  for (int i = m - 1; i > 0; --i) std::swap(order[i], order[cdhrl::uniform_int(rng, i + 1)]);
  cdhrl::CausalGraph g(m);
  for (int a = 0; a < m; ++a)
    for (int b = a + 1; b < m; ++b)
      if (cdhrl::bernoulli(rng, p)) g.set_edge(order[b], order[a]);
  return g;
}

// Every DAG on m labelled nodes.
inline std::vector<cdhrl::CausalGraph> all_dags(int m) {
  std::vector<std::pair<int, int>> slots;
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j)
      if (i != j) slots.emplace_back(i, j);
  std::vector<cdhrl::CausalGraph> out;
  for (long mask = 0; mask < (1L << slots.size()); ++mask) {
    cdhrl::CausalGraph g(m);
    bool ok = true;
    for (std::size_t s = 0; s < slots.size() && ok; ++s) {
      if (!(mask & (1L << s))) continue;
      if (g.edge(slots[s].second, slots[s].first)) ok = false;
      else g.set_edge(slots[s].first, slots[s].second);
    }
    if (ok && g.is_acyclic()) out.push_back(g);
  }
  return out;
}

// Binary Bayesian network with strictly positive random CPTs; SID is checked
// by comparing interventional distributions with the adjustment formula.
class BinaryNetwork {
 public:
  BinaryNetwork(const cdhrl::CausalGraph& g, cdhrl::Rng& rng) : g_(g), m_(g.size()) {
    for (int v = 0; v < m_; ++v) {
      const int rows = 1 << g.parents(v).size();
      std::vector<double> p1(rows);
      for (auto& p : p1) p = 0.1 + 0.8 * cdhrl::uniform01(rng);
      cpt_.push_back(p1);
    }
  }

  // Joint over all 2^m states, optionally with X_i clamped to `value`.
  std::vector<double> joint(int clamp = -1, int value = 0) const {
    std::vector<double> p(1 << m_, 0.0);
    for (int s = 0; s < (1 << m_); ++s) {
      double prob = 1.0;
      for (int v = 0; v < m_; ++v) {
        const int x = (s >> v) & 1;
        if (v == clamp) {
          if (x != value) prob = 0.0;
          continue;
        }
        int row = 0;
        const auto pa = g_.parents(v);
        for (std::size_t k = 0; k < pa.size(); ++k) row |= ((s >> pa[k]) & 1) << k;
        const double p1 = cpt_[v][row];
        prob *= x ? p1 : 1.0 - p1;
      }
      p[s] = prob;
    }
    return p;
  }

  // P(X_j = 1 | do(X_i = value)).
  double do_effect(int i, int value, int j) const {
    const auto p = joint(i, value);
    double out = 0.0;
    for (int s = 0; s < (1 << m_); ++s)
      if ((s >> j) & 1) out += p[s];
    return out;
  }

  // sum_z P(X_j = 1 | X_i = value, Z = z) P(Z = z).
  double adjusted(int i, int value, int j, const std::vector<int>& z) const {
    const auto p = joint();
    double out = 0.0;
    for (int zs = 0; zs < (1 << z.size()); ++zs) {
      double pz = 0.0, pxz = 0.0, pjxz = 0.0;
      for (int s = 0; s < (1 << m_); ++s) {
        bool match = true;
        for (std::size_t k = 0; k < z.size(); ++k)
          if (((s >> z[k]) & 1) != ((zs >> k) & 1)) match = false;
        if (!match) continue;
        pz += p[s];
        if (((s >> i) & 1) != value) continue;
        pxz += p[s];
        if ((s >> j) & 1) pjxz += p[s];
      }
      if (pz > 0.0) out += pjxz / pxz * pz;
    }
    return out;
  }

 private:
  cdhrl::CausalGraph g_;
  int m_;
  std::vector<std::vector<double>> cpt_;
};

// Counts pairs whose interventional distribution the estimate's parent
// adjustment gets wrong under a generic parameterisation of the truth.
inline int numeric_sid(const cdhrl::CausalGraph& truth, const cdhrl::CausalGraph& estimate,
                       cdhrl::Rng& rng) {
  const BinaryNetwork net(truth, rng);
  const int m = truth.size();
  int errors = 0;
  for (int i = 0; i < m; ++i) {
    const auto z = estimate.parents(i);
    for (int j = 0; j < m; ++j) {
      if (i == j) continue;
      bool wrong = false;
      if (estimate.edge(i, j)) {
        // The estimate claims X_i has no effect on X_j.
        wrong = std::abs(net.do_effect(i, 0, j) - net.do_effect(i, 1, j)) > 1e-9;
      } else {
        for (int v = 0; v < 2; ++v)
          if (std::abs(net.do_effect(i, v, j) - net.adjusted(i, v, j, z)) > 1e-9) wrong = true;
      }
      errors += wrong ? 1 : 0;
    }
  }
  return errors;
}

// Worst relative error of backward() against central differences of loss().
inline double finite_difference_error(const cdhrl::nn::DenseNet& net, const cdhrl::nn::Batch& batch,
                                      double h) {
  const auto analytic = cdhrl::nn::backward(net, batch).grads;
  double worst = 0.0;
  auto probe = [&](double& param, double grad) {
    const double keep = param;
    param = keep + h;
    const double up = cdhrl::nn::loss(net, batch);
    param = keep - h;
    const double down = cdhrl::nn::loss(net, batch);
    param = keep;
    const double numeric = (up - down) / (2 * h);
    const double denom = std::max({std::abs(numeric), std::abs(grad), 1e-6});
    worst = std::max(worst, std::abs(numeric - grad) / denom);
  };
  auto& mutable_net = const_cast<cdhrl::nn::DenseNet&>(net);
  for (int l = 0; l < net.layer_count(); ++l) {
    for (Eigen::Index k = 0; k < net.weights[l].size(); ++k)
      probe(mutable_net.weights[l].data()[k], analytic.weights[l].data()[k]);
    for (Eigen::Index k = 0; k < net.biases[l].size(); ++k)
      probe(mutable_net.biases[l].data()[k], analytic.biases[l].data()[k]);
  }
  return worst;
}

inline int change_fired(const cdhrl::Subgoal& g, const cdhrl::VarVector& a, const cdhrl::VarVector& b) {
  const int before = a[g.var], after = b[g.var];
  return g.change == cdhrl::ChangeKind::Increase ? (after > before) : (after < before);
}

}  // namespace oracle
