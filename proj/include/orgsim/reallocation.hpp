#pragma once

#include <optional>
#include <span>
#include <vector>

#include "orgsim/agents.hpp"
#include "orgsim/beliefs.hpp"
#include "orgsim/rng.hpp"

namespace orgsim {

// Sell announcement: the seller's task with the lowest mean internal
// belief, offered at that mean as the acceptance threshold.
struct Offer {
  int seller = -1;
  int task = -1;
  double threshold = 0.0;
};

// Bid: the bidder's mean belief between the offered task and its own
// current decisions.
struct Signal {
  int bidder = -1;
  int task = -1;
  double value = 0.0;
};

struct Transfer {
  int period = 0;
  int task = -1;
  int seller = -1;
  int buyer = -1;
  double threshold = 0.0;
  double signal = 0.0;

  bool operator==(const Transfer&) const = default;
};

// Returns the owned task with the minimal mean belief toward the other
// owned decisions (ties uniform); none when the agent holds <= 1 task,
// which also keeps every agent non-empty after resolution.
std::optional<Offer> compute_offer(int agent, std::span<const int> owned,
                                   const BeliefState& beliefs, RandomStream& rng);

// Mean belief between `task` and the bidder's owned decisions; none when
// the bidder is at capacity. The bidder must not own the task.
std::optional<Signal> compute_signal(int agent, int task, std::span<const int> owned,
                                     const BeliefState& beliefs, int capacity);

// Processes offers in uniformly random order. Per offer, bidders still
// below capacity are ranked by signal (ties uniform); the best one wins
// the task iff its signal >= threshold, falling through to the next-best
// valid bidder when earlier wins filled the better one up. Updates the
// allocation in place and returns the transfer log.
std::vector<Transfer> resolve_offers(const std::vector<Offer>& offers,
                                     const std::vector<Signal>& signals,
                                     Allocation& alloc, std::span<const int> capacities,
                                     int period, RandomStream& rng);

}  // namespace orgsim
