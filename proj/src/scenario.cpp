#include "bellmom/scenario.hpp"

#include <string>

#include "bellmom/error.hpp"

namespace bellmom {

namespace {

void check_side(const std::vector<qcore::Observable>& obs, qcore::Party party, std::size_t dim,
                const char* side) {
  if (obs.empty())
    throw Error(ErrorCode::InvalidArgument, std::string(side) + " has no observables");
  for (std::size_t i = 0; i < obs.size(); ++i) {
    if (obs[i].party() != party)
      throw Error(ErrorCode::InvalidArgument,
                  std::string(side) + " observable tagged with the wrong party");
    if (obs[i].choice() != static_cast<int>(i + 1))
      throw Error(ErrorCode::InvalidArgument, std::string(side) + " choices must run 1.." +
                                                  std::to_string(obs.size()) + " in order");
    if (obs[i].dim() != dim)
      throw Error(ErrorCode::DimensionMismatch,
                  std::string(side) + " choice " + std::to_string(i + 1) + " has dim " +
                      std::to_string(obs[i].dim()) + ", state has " + std::to_string(dim));
  }
}

}  // namespace

BipartiteScenario::BipartiteScenario(qcore::BipartiteState state,
                                     std::vector<qcore::Observable> obs_a,
                                     std::vector<qcore::Observable> obs_b)
    : state_(std::move(state)), obs_a_(std::move(obs_a)), obs_b_(std::move(obs_b)) {
  check_side(obs_a_, qcore::Party::A, state_.dim_a(), "A");
  check_side(obs_b_, qcore::Party::B, state_.dim_b(), "B");
}

}  // namespace bellmom
