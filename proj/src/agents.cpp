#include "orgsim/agents.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include "orgsim/errors.hpp"

namespace orgsim {

Allocation Allocation::mirrored(int n_decisions, int n_agents) {
  if (n_agents < 1 || n_decisions < 1 || n_decisions % n_agents != 0)
    throw ConfigError("mirrored allocation requires n_decisions divisible by n_agents");
  Allocation a;
  a.owner.assign(n_decisions, 0);
  a.owned.assign(n_agents, {});
  const int per = n_decisions / n_agents;
  for (int d = 0; d < n_decisions; ++d) {
    const int m = d / per;
    a.owner[d] = m;
    a.owned[m].push_back(d);
  }
  return a;
}

Allocation Allocation::equal_random(int n_decisions, int n_agents, RandomStream& rng) {
  if (n_agents < 1 || n_decisions < 1 || n_decisions % n_agents != 0)
    throw ConfigError("equal allocation requires n_decisions divisible by n_agents");
  std::vector<int> deal(n_decisions);
  std::iota(deal.begin(), deal.end(), 0);
  rng.shuffle(deal);
  Allocation a;
  a.owner.assign(n_decisions, 0);
  a.owned.assign(n_agents, {});
  const int per = n_decisions / n_agents;
  for (int m = 0; m < n_agents; ++m) {
    auto& lst = a.owned[m];
    lst.assign(deal.begin() + m * per, deal.begin() + (m + 1) * per);
    std::sort(lst.begin(), lst.end());
    for (int d : lst) a.owner[d] = m;
  }
  return a;
}

void Allocation::transfer(int task, int seller, int buyer) {
  if (task < 0 || task >= n_decisions() || owner[task] != seller)
    throw InternalError("Allocation::transfer: task not owned by seller");
  auto& from = owned[seller];
  const auto it = std::find(from.begin(), from.end(), task);
  if (it == from.end()) throw InternalError("Allocation::transfer: owned list out of sync");
  from.erase(it);
  owned[buyer].push_back(task);
  owner[task] = buyer;
}

void Allocation::check_partition() const {
  std::vector<int> seen(owner.size(), 0);
  for (int m = 0; m < n_agents(); ++m) {
    for (int d : owned[m]) {
      if (d < 0 || d >= n_decisions() || owner[d] != m)
        throw InternalError("Allocation: owned/owner mismatch");
      ++seen[d];
    }
  }
  for (int d = 0; d < n_decisions(); ++d)
    if (seen[d] != 1) throw InternalError("Allocation: not a partition");
}

Pairing pair_agents(int n_agents, double prob, RandomStream& rng) {
  if (prob < 0.0 || prob > 1.0) throw DomainError("pair_agents: prob must lie in [0,1]");
  Pairing p;
  p.partner.assign(std::max(n_agents, 0), -1);
  if (prob == 0.0) return p;
  if (n_agents < 3) throw ConfigError("pair_agents: ring requires at least 3 agents");

  std::vector<int> order(n_agents);
  std::iota(order.begin(), order.end(), 0);
  rng.shuffle(order);
  for (int a : order) {
    if (p.partner[a] >= 0) continue;  // already paired, no draws consumed
    if (!rng.bernoulli(prob)) continue;
    const bool left = rng.next_below(2) == 0;
    const int b = left ? (a + n_agents - 1) % n_agents : (a + 1) % n_agents;
    if (p.partner[b] >= 0) continue;
    p.partner[a] = b;
    p.partner[b] = a;
    p.pairs.emplace_back(std::min(a, b), std::max(a, b));
  }
  return p;
}

double utility(double own_perf, double residual_perf, double alpha) {
  return alpha * own_perf + (1.0 - alpha) * residual_perf;
}

double agent_utility(const Landscape& ls, const Allocation& alloc, int agent,
                     const DecisionVector& d, double alpha) {
  // Single ascending pass; summation order matches partial_performance.
  double own_sum = 0.0, res_sum = 0.0;
  int own_n = 0, res_n = 0;
  for (int n = 0; n < ls.matrix.n; ++n) {
    const double c = contribution(ls, n, d);
    if (alloc.owner[n] == agent) {
      own_sum += c;
      ++own_n;
    } else {
      res_sum += c;
      ++res_n;
    }
  }
  if (own_n == 0) throw InternalError("agent_utility: agent owns no decisions");
  const double own = own_sum / own_n;
  const double res = res_n > 0 ? res_sum / res_n : 0.0;
  return utility(own, res, alpha);
}

int pick_own_decision(std::span<const int> own, RandomStream& rng) {
  if (own.empty()) throw InternalError("pick_own_decision: empty area of responsibility");
  return own[rng.next_below(static_cast<std::uint32_t>(own.size()))];
}

DecisionVector propose_flip(std::span<const int> own, const DecisionVector& current,
                            RandomStream& rng) {
  DecisionVector next = current;
  next[pick_own_decision(own, rng)] ^= 1;
  return next;
}

StepOutcome individual_step(const Landscape& ls, const Allocation& alloc, int agent,
                            const DecisionVector& prev, double alpha, RandomStream& rng) {
  StepOutcome out;
  out.proposed = pick_own_decision(alloc.owned[agent], rng);
  const double u_keep = agent_utility(ls, alloc, agent, prev, alpha);
  DecisionVector cand = prev;
  cand[out.proposed] ^= 1;
  const double u_flip = agent_utility(ls, alloc, agent, cand, alpha);
  if (u_flip > u_keep) {
    out.flipped = out.proposed;
    out.chosen_utility = u_flip;
  } else {
    out.chosen_utility = u_keep;
  }
  return out;
}

namespace {

double joint_utility(const Landscape& ls, const Allocation& alloc, int a, int b,
                     const DecisionVector& d, double alpha) {
  return 0.5 * (agent_utility(ls, alloc, a, d, alpha) + agent_utility(ls, alloc, b, d, alpha));
}

}  // namespace

PairOutcome adjacent_step(const Landscape& ls, const Allocation& alloc, int agent_a,
                          int agent_b, const DecisionVector& prev, double alpha,
                          RandomStream& rng) {
  PairOutcome out;
  out.proposed_a = pick_own_decision(alloc.owned[agent_a], rng);
  out.proposed_b = pick_own_decision(alloc.owned[agent_b], rng);

  const double u_keep = joint_utility(ls, alloc, agent_a, agent_b, prev, alpha);
  DecisionVector cand = prev;
  cand[out.proposed_a] ^= 1;
  const double u_a = joint_utility(ls, alloc, agent_a, agent_b, cand, alpha);
  cand[out.proposed_a] ^= 1;
  cand[out.proposed_b] ^= 1;
  const double u_b = joint_utility(ls, alloc, agent_a, agent_b, cand, alpha);

  // Tie order: (old,old) over (new_a,old) over (old,new_b).
  out.chosen_utility = u_keep;
  if (u_a > out.chosen_utility) {
    out.chosen_utility = u_a;
    out.flipped = {agent_a, out.proposed_a};
  }
  if (u_b > out.chosen_utility) {
    out.chosen_utility = u_b;
    out.flipped = {agent_b, out.proposed_b};
  }
  return out;
}

DecisionVector assemble_vector(const std::vector<std::vector<std::uint8_t>>& per_agent,
                               const Allocation& alloc) {
  if (static_cast<int>(per_agent.size()) != alloc.n_agents())
    throw InternalError("assemble_vector: one bit list per agent required");
  const int n = alloc.n_decisions();
  DecisionVector d(n, 0);
  std::vector<int> seen(n, 0);
  for (int m = 0; m < alloc.n_agents(); ++m) {
    const auto& own = alloc.owned[m];
    if (per_agent[m].size() != own.size())
      throw InternalError("assemble_vector: bit list does not match owned decisions");
    for (std::size_t i = 0; i < own.size(); ++i) {
      const int idx = own[i];
      if (idx < 0 || idx >= n || seen[idx]++)
        throw InternalError("assemble_vector: duplicate or out-of-range decision");
      d[idx] = per_agent[m][i];
    }
  }
  for (int idx = 0; idx < n; ++idx)
    if (!seen[idx]) throw InternalError("assemble_vector: decision " + std::to_string(idx) + " missing");
  return d;
}

}  // namespace orgsim
