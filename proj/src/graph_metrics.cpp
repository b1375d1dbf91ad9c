#include "cdhrl/graph_metrics.hpp"

#include <deque>

namespace cdhrl {

int shd(const CausalGraph& a, const CausalGraph& b) {
  if (a.size() != b.size()) throw GraphError("shd: graph sizes differ");
  int n = 0;
  for (int i = 0; i < a.size(); ++i) {
    for (int j = 0; j < a.size(); ++j) {
      if (i != j && a.edge(i, j) != b.edge(i, j)) ++n;
    }
  }
  return n;
}

bool d_separated(const CausalGraph& g, int x, int y, const std::vector<bool>& given) {
  const int m = g.size();
  // Nodes that are in `given` or have a descendant in it open colliders.
  std::vector<bool> anc(m, false);
  std::deque<int> todo;
  for (int v = 0; v < m; ++v) {
    if (given[v]) todo.push_back(v);
  }
  while (!todo.empty()) {
    const int v = todo.front();
    todo.pop_front();
    if (anc[v]) continue;
    anc[v] = true;
    for (int p : g.parents(v)) todo.push_back(p);
  }

  // State: (node, arrived_from_child). Arriving from a child means the ball
  // travels up against an edge.
  std::vector<bool> up(m, false);
  std::vector<bool> down(m, false);
  std::deque<std::pair<int, bool>> queue;
  queue.emplace_back(x, true);
  while (!queue.empty()) {
    const auto [v, from_child] = queue.front();
    queue.pop_front();
    if (from_child ? up[v] : down[v]) continue;
    (from_child ? up[v] : down[v]) = true;
    if (v == y && !given[v]) return false;
    if (from_child) {
      if (given[v]) continue;
      for (int p : g.parents(v)) queue.emplace_back(p, true);
      for (int c : g.children(v)) queue.emplace_back(c, false);
    } else {
      if (!given[v]) {
        for (int c : g.children(v)) queue.emplace_back(c, false);
      }
      if (anc[v]) {
        for (int p : g.parents(v)) queue.emplace_back(p, true);
      }
    }
  }
  return true;
}

int sid(const CausalGraph& truth, const CausalGraph& estimate, int max_nodes) {
  const int m = truth.size();
  if (estimate.size() != m) throw GraphError("sid: graph sizes differ");
  if (m > max_nodes) throw GraphError("sid: graph larger than supported size");
  if (!truth.is_acyclic() || !estimate.is_acyclic()) throw GraphError("sid: graphs must be acyclic");

  std::vector<std::vector<bool>> desc(m);
  for (int v = 0; v < m; ++v) desc[v] = truth.descendants(v);

  int errors = 0;
  for (int i = 0; i < m; ++i) {
    std::vector<bool> z(m, false);
    for (int p : estimate.parents(i)) z[p] = true;
    for (int j = 0; j < m; ++j) {
      if (j == i) continue;
      if (z[j]) {
        if (desc[i][j]) ++errors;
        continue;
      }
      // Nodes W != i on a directed path i -> ... -> j, and their descendants.
      std::vector<bool> forbidden(m, false);
      for (int w = 0; w < m; ++w) {
        if (w == i || !desc[i][w]) continue;
        if (w != j && !desc[w][j]) continue;
        forbidden[w] = true;
        for (int d = 0; d < m; ++d) {
          if (desc[w][d]) forbidden[d] = true;
        }
      }
      bool valid = true;
      for (int v = 0; v < m && valid; ++v) {
        if (z[v] && forbidden[v]) valid = false;
      }
      if (valid) {
        CausalGraph cut = truth;
        for (int c : truth.children(i)) {
          if (c == j || desc[c][j]) cut.set_edge(c, i, false);
        }
        valid = d_separated(cut, i, j, z);
      }
      if (!valid) ++errors;
    }
  }
  return errors;
}

}  // namespace cdhrl
