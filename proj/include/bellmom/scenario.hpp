#pragma once

#include <vector>

#include "bellmom/qcore.hpp"

namespace bellmom {

/// Pure bipartite state plus the observables each party can choose from.
/// Observable choice indices run 1..m on each side, in list order.
class BipartiteScenario {
 public:
  BipartiteScenario(qcore::BipartiteState state, std::vector<qcore::Observable> obs_a,
                    std::vector<qcore::Observable> obs_b);

  const qcore::BipartiteState& state() const noexcept { return state_; }
  const std::vector<qcore::Observable>& obs_a() const noexcept { return obs_a_; }
  const std::vector<qcore::Observable>& obs_b() const noexcept { return obs_b_; }
  int choices_a() const noexcept { return static_cast<int>(obs_a_.size()); }
  int choices_b() const noexcept { return static_cast<int>(obs_b_.size()); }

 private:
  qcore::BipartiteState state_;
  std::vector<qcore::Observable> obs_a_;
  std::vector<qcore::Observable> obs_b_;
};

}  // namespace bellmom
