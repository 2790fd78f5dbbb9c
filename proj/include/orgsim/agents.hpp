#pragma once

#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "orgsim/landscape.hpp"
#include "orgsim/rng.hpp"

namespace orgsim {

// Partition of the decision indices over agents. `owner` maps decision ->
// agent; `owned` keeps per-agent lists in insertion order (transfers
// append at the tail).
struct Allocation {
  std::vector<int> owner;
  std::vector<std::vector<int>> owned;

  int n_decisions() const { return static_cast<int>(owner.size()); }
  int n_agents() const { return static_cast<int>(owned.size()); }

  // Contiguous blocks of size n/m: agent a owns {a*n/m, ..., (a+1)*n/m - 1}.
  static Allocation mirrored(int n_decisions, int n_agents);

  // Random equal partition, each agent gets n/m decisions (sorted).
  static Allocation equal_random(int n_decisions, int n_agents, RandomStream& rng);

  // Moves `task` from seller to buyer (appended to the buyer's list).
  void transfer(int task, int seller, int buyer);

  // Throws InternalError unless owner/owned form a consistent partition.
  void check_partition() const;
};

struct AgentParams {
  double alpha = 0.5;  // weight on own vs residual performance, in [0, 1]
  int capacity = 5;    // max decisions the agent can hold
};

// Disjoint ring-adjacent pairs active in one period. partner[a] is the
// paired agent or -1.
struct Pairing {
  std::vector<std::pair<int, int>> pairs;  // first < second
  std::vector<int> partner;
};

// Visits agents in a uniformly random order; each still-unpaired agent
// initiates with probability `prob`, picking its left or right ring
// neighbor uniformly; the pair forms only if that neighbor is unpaired.
// Needs n_agents >= 3 for a ring unless prob == 0.
Pairing pair_agents(int n_agents, double prob, RandomStream& rng);

// alpha * own + (1 - alpha) * residual
double utility(double own_perf, double residual_perf, double alpha);

// Utility of `d` for one agent: own partial performance over its area,
// residual over the complement (an empty residual contributes 0).
double agent_utility(const Landscape& ls, const Allocation& alloc, int agent,
                     const DecisionVector& d, double alpha);

// Uniform draw of one owned decision index.
int pick_own_decision(std::span<const int> own, RandomStream& rng);

// Copy of `current` with one uniformly chosen own decision flipped.
DecisionVector propose_flip(std::span<const int> own, const DecisionVector& current,
                            RandomStream& rng);

struct StepOutcome {
  int proposed = -1;                 // decision whose flip was evaluated
  std::optional<int> flipped;        // set when the proposal was adopted
  double chosen_utility = 0.0;
};

// One-bit hill climb against the period t-1 residuals. Ties keep the
// status quo.
StepOutcome individual_step(const Landscape& ls, const Allocation& alloc, int agent,
                            const DecisionVector& prev, double alpha, RandomStream& rng);

struct PairOutcome {
  int proposed_a = -1;
  int proposed_b = -1;
  std::optional<std::pair<int, int>> flipped;  // (agent, decision); at most one flip
  double chosen_utility = 0.0;
};

// Collaborative step for ring neighbors (a, b): scores (old,old),
// (new_a,old), (old,new_b) by mean joint utility; ties prefer earlier
// tuples in that order.
PairOutcome adjacent_step(const Landscape& ls, const Allocation& alloc, int agent_a,
                          int agent_b, const DecisionVector& prev, double alpha,
                          RandomStream& rng);

// Places per-agent decision bits (aligned with alloc.owned[agent]) into a
// full vector. Throws InternalError on missing/duplicate coverage.
DecisionVector assemble_vector(const std::vector<std::vector<std::uint8_t>>& per_agent,
                               const Allocation& alloc);

}  // namespace orgsim
