#include "orgsim/beliefs.hpp"

#include <algorithm>

#include "orgsim/errors.hpp"

namespace orgsim {

BeliefState::BeliefState(int n_decisions)
    : n_(n_decisions),
      p_(static_cast<std::size_t>(n_decisions) * n_decisions, 1),
      q_(static_cast<std::size_t>(n_decisions) * n_decisions, 1) {}

std::size_t BeliefState::cell(int i, int j) const {
  if (i < 0 || j < 0 || i >= n_ || j >= n_) throw DomainError("BeliefState: index out of range");
  if (i == j) throw DomainError("BeliefState: no belief about a pair (i, i)");
  return static_cast<std::size_t>(i) * n_ + j;
}

double BeliefState::belief(int i, int j) const {
  const std::size_t c = cell(i, j);
  return static_cast<double>(p_[c]) / (static_cast<double>(p_[c]) + static_cast<double>(q_[c]));
}

std::uint32_t BeliefState::p(int i, int j) const { return p_[cell(i, j)]; }
std::uint32_t BeliefState::q(int i, int j) const { return q_[cell(i, j)]; }

void BeliefState::record(int i, int j, bool changed) {
  const std::size_t c = cell(i, j);
  if (changed)
    ++p_[c];
  else
    ++q_[c];
}

std::vector<BeliefState> init_beliefs(int n_decisions, int n_agents) {
  return std::vector<BeliefState>(n_agents, BeliefState(n_decisions));
}

void update_beliefs(BeliefState& beliefs, int flipped, std::span<const int> own,
                    std::span<const double> contribs_prev,
                    std::span<const double> contribs_now) {
  if (std::find(own.begin(), own.end(), flipped) == own.end())
    throw InternalError("update_beliefs: flipped decision not in the agent's area");
  for (int j : own) {
    if (j == flipped) continue;
    beliefs.record(flipped, j, contribs_now[j] != contribs_prev[j]);
  }
}

}  // namespace orgsim
