#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace orgsim {

// One agent's Beta(p, q) counters over ordered decision pairs (i, j),
// i != j: p counts periods where flipping i coincided with a change of
// contribution j, q the opposite. Counters start at p = q = 1, giving the
// uninformative mean 0.5. The belief is the Beta mean p / (p + q).
class BeliefState {
 public:
  BeliefState() = default;
  explicit BeliefState(int n_decisions);

  int n_decisions() const { return n_; }

  double belief(int i, int j) const;  // DomainError when i == j
  std::uint32_t p(int i, int j) const;
  std::uint32_t q(int i, int j) const;

  void record(int i, int j, bool changed);

  bool operator==(const BeliefState&) const = default;

 private:
  std::size_t cell(int i, int j) const;
  int n_ = 0;
  std::vector<std::uint32_t> p_, q_;
};

std::vector<BeliefState> init_beliefs(int n_decisions, int n_agents);

// Eq.-style update after the agent flipped decision `flipped`: for every
// other owned decision j, a changed contribution (exact comparison)
// increments p(flipped, j), an unchanged one increments q(flipped, j).
// contribs_prev/now are full per-decision contribution arrays taken from
// the implemented vectors of t-1 and t.
void update_beliefs(BeliefState& beliefs, int flipped, std::span<const int> own,
                    std::span<const double> contribs_prev,
                    std::span<const double> contribs_now);

}  // namespace orgsim
