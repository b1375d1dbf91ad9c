#pragma once

#include <vector>

#include "cdhrl/causal_graph.hpp"

namespace cdhrl {

// Off-diagonal entries where a and b disagree.
int shd(const CausalGraph& a, const CausalGraph& b);

inline constexpr int kSidMaxNodes = 12;

// Structural interventional distance of `estimate` with respect to `truth`:
// the number of ordered pairs (i, j), i != j, for which the parent set of i in
// the estimate fails to identify the effect of do(X_i) on X_j in the truth.
int sid(const CausalGraph& truth, const CausalGraph& estimate, int max_nodes = kSidMaxNodes);

// True when every path between x and y is blocked by `given` (Bayes-ball).
bool d_separated(const CausalGraph& g, int x, int y, const std::vector<bool>& given);

}  // namespace cdhrl
