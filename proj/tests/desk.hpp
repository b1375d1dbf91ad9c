#pragma once

// Reduced-cost settings used by the end-to-end tests.

#include <string>
#include <vector>

#include "cdhrl/config.hpp"

namespace desk {

inline std::vector<std::string> overrides() {
  return {"scm.T=5",         "scm.Fs=200",  "scm.Qs=50",           "scm.K=10",
          "scm.batch=128",   "scm.hidden=32", "hrl.T_goal=3000",   "hrl.lr=1e-3",
          "hrl.eval_episodes=50", "driver.adaptation_steps=5000"};
}

inline cdhrl::RunConfig config(std::vector<std::string> extra = {}) {
  auto all = overrides();
  all.insert(all.end(), extra.begin(), extra.end());
  return cdhrl::load_config(std::nullopt, all);
}

}  // namespace desk
