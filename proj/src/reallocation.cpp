#include "orgsim/reallocation.hpp"

#include <algorithm>
#include <numeric>

#include "orgsim/errors.hpp"

namespace orgsim {

std::optional<Offer> compute_offer(int agent, std::span<const int> owned,
                                   const BeliefState& beliefs, RandomStream& rng) {
  if (owned.size() <= 1) return std::nullopt;
  std::vector<double> means(owned.size());
  for (std::size_t a = 0; a < owned.size(); ++a) {
    double sum = 0.0;
    for (std::size_t b = 0; b < owned.size(); ++b) {
      if (b == a) continue;
      sum += beliefs.belief(owned[a], owned[b]);
    }
    means[a] = sum / static_cast<double>(owned.size() - 1);
  }
  const double min = *std::min_element(means.begin(), means.end());
  std::vector<std::size_t> ties;
  for (std::size_t a = 0; a < owned.size(); ++a)
    if (means[a] == min) ties.push_back(a);
  const std::size_t pick =
      ties.size() == 1 ? ties[0] : ties[rng.next_below(static_cast<std::uint32_t>(ties.size()))];
  return Offer{agent, owned[pick], min};
}

std::optional<Signal> compute_signal(int agent, int task, std::span<const int> owned,
                                     const BeliefState& beliefs, int capacity) {
  if (owned.empty()) throw InternalError("compute_signal: bidder owns no decisions");
  if (std::find(owned.begin(), owned.end(), task) != owned.end())
    throw DomainError("compute_signal: bidder already owns the offered task");
  if (static_cast<int>(owned.size()) >= capacity) return std::nullopt;
  double sum = 0.0;
  for (int j : owned) sum += beliefs.belief(task, j);
  return Signal{agent, task, sum / static_cast<double>(owned.size())};
}

std::vector<Transfer> resolve_offers(const std::vector<Offer>& offers,
                                     const std::vector<Signal>& signals,
                                     Allocation& alloc, std::span<const int> capacities,
                                     int period, RandomStream& rng) {
  std::vector<std::size_t> order(offers.size());
  std::iota(order.begin(), order.end(), 0);
  rng.shuffle(order);

  std::vector<Transfer> log;
  for (std::size_t oi : order) {
    const Offer& offer = offers[oi];
    if (alloc.owner[offer.task] != offer.seller)
      throw InternalError("resolve_offers: offered task not owned by its seller");

    // Bidders still below capacity when this offer is resolved.
    const Signal* best = nullptr;
    std::vector<const Signal*> ties;
    for (const Signal& s : signals) {
      if (s.task != offer.task) continue;
      if (static_cast<int>(alloc.owned[s.bidder].size()) >= capacities[s.bidder]) continue;
      if (best == nullptr || s.value > best->value) {
        best = &s;
        ties.assign(1, &s);
      } else if (s.value == best->value) {
        ties.push_back(&s);
      }
    }
    if (best == nullptr) continue;
    const Signal* winner =
        ties.size() == 1 ? ties[0] : ties[rng.next_below(static_cast<std::uint32_t>(ties.size()))];
    if (winner->value < offer.threshold) continue;  // >= threshold trades

    alloc.transfer(offer.task, offer.seller, winner->bidder);
    log.push_back(Transfer{period, offer.task, offer.seller, winner->bidder, offer.threshold,
                           winner->value});
  }
  return log;
}

}  // namespace orgsim
