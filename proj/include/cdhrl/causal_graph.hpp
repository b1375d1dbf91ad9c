#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace cdhrl {

class GraphError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Binary adjacency over M variables. edge(i, j) == true means X_j is a
// direct cause (parent) of X_i. Reported graphs never carry self edges.
class CausalGraph {
 public:
  CausalGraph() = default;
  explicit CausalGraph(int m) : m_(m), adj_(static_cast<std::size_t>(m) * m, 0) {}

  int size() const { return m_; }

  bool edge(int effect, int cause) const { return adj_[index(effect, cause)] != 0; }
  void set_edge(int effect, int cause, bool on = true);

  std::vector<int> parents(int i) const;
  std::vector<int> children(int j) const;
  int edge_count() const;
  // (effect, cause) pairs in row-major order.
  std::vector<std::pair<int, int>> edges() const;

  bool is_acyclic() const;
  // Nodes reachable from i along directed edges, excluding i unless on a cycle.
  std::vector<bool> descendants(int i) const;

  bool operator==(const CausalGraph&) const = default;

 private:
  std::size_t index(int i, int j) const;

  int m_ = 0;
  std::vector<std::uint8_t> adj_;
};

// Removes cycles by repeatedly deleting the lowest-probability edge of some
// remaining cycle. `edge_probability(i, j)` is sigma(eta_ij).
CausalGraph prune_cycles(CausalGraph graph, const Eigen::MatrixXd& edge_probability);

}  // namespace cdhrl
