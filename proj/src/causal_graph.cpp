#include "cdhrl/causal_graph.hpp"

#include <functional>

namespace cdhrl {

std::size_t CausalGraph::index(int i, int j) const {
  if (i < 0 || j < 0 || i >= m_ || j >= m_) {
    throw GraphError("graph index out of range");
  }
  return static_cast<std::size_t>(i) * m_ + j;
}

void CausalGraph::set_edge(int effect, int cause, bool on) {
  if (effect == cause && on) throw GraphError("self edges are not represented");
  adj_[index(effect, cause)] = on ? 1 : 0;
}

std::vector<int> CausalGraph::parents(int i) const {
  std::vector<int> out;
  for (int j = 0; j < m_; ++j) {
    if (edge(i, j)) out.push_back(j);
  }
  return out;
}

std::vector<int> CausalGraph::children(int j) const {
  std::vector<int> out;
  for (int i = 0; i < m_; ++i) {
    if (edge(i, j)) out.push_back(i);
  }
  return out;
}

int CausalGraph::edge_count() const {
  int n = 0;
  for (auto v : adj_) n += v;
  return n;
}

std::vector<std::pair<int, int>> CausalGraph::edges() const {
  std::vector<std::pair<int, int>> out;
  for (int i = 0; i < m_; ++i) {
    for (int j = 0; j < m_; ++j) {
      if (edge(i, j)) out.emplace_back(i, j);
    }
  }
  return out;
}

std::vector<bool> CausalGraph::descendants(int i) const {
  std::vector<bool> seen(m_, false);
  std::vector<int> stack = children(i);
  while (!stack.empty()) {
    const int v = stack.back();
    stack.pop_back();
    if (seen[v]) continue;
    seen[v] = true;
    for (int c : children(v)) stack.push_back(c);
  }
  return seen;
}

bool CausalGraph::is_acyclic() const {
  for (int i = 0; i < m_; ++i) {
    if (descendants(i)[i]) return false;
  }
  return true;
}

namespace {

// Returns the edges (effect, cause) of one directed cycle, or empty.
std::vector<std::pair<int, int>> find_cycle(const CausalGraph& g) {
  const int m = g.size();
  std::vector<int> state(m, 0);  // 0 new, 1 on stack, 2 done
  std::vector<int> via(m, -1);
  std::vector<std::pair<int, int>> cycle;

  std::function<bool(int)> dfs = [&](int u) {
    state[u] = 1;
    for (int v : g.children(u)) {
      if (state[v] == 1) {
        // u -> v closes a cycle v -> ... -> u -> v.
        cycle.emplace_back(v, u);
        for (int w = u; w != v; w = via[w]) cycle.emplace_back(w, via[w]);
        return true;
      }
      if (state[v] == 0) {
        via[v] = u;
        if (dfs(v)) return true;
      }
    }
    state[u] = 2;
    return false;
  };
  for (int s = 0; s < m; ++s) {
    if (state[s] == 0 && dfs(s)) return cycle;
  }
  return {};
}

}  // namespace

CausalGraph prune_cycles(CausalGraph graph, const Eigen::MatrixXd& edge_probability) {
  while (true) {
    const auto cycle = find_cycle(graph);
    if (cycle.empty()) return graph;
    auto weakest = cycle.front();
    for (const auto& e : cycle) {
      if (edge_probability(e.first, e.second) <
          edge_probability(weakest.first, weakest.second)) {
        weakest = e;
      }
    }
    graph.set_edge(weakest.first, weakest.second, false);
  }
}

}  // namespace cdhrl
