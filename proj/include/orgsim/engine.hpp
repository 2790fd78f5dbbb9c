#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "orgsim/agents.hpp"
#include "orgsim/beliefs.hpp"
#include "orgsim/landscape.hpp"
#include "orgsim/reallocation.hpp"
#include "orgsim/rng.hpp"

namespace orgsim {

inline constexpr const char* kOrgsimVersion = "0.1.0";

enum class Mode { top_down, emergent };

const char* mode_name(Mode m);
Mode mode_from_name(const std::string& name);

// One cell of the parameter grid. top_down fixes the mirrored allocation
// and forbids tau; emergent starts from a random equal allocation and
// re-allocates every tau periods (when tau is set).
struct SimConfig {
  int config_id = 0;
  int n = 15;
  int m = 5;
  MatrixKind kind = MatrixKind::decomposable2;
  int k = 2;
  double alpha = 0.5;
  double pair_prob = 0.0;
  std::optional<int> tau;
  int horizon = 150;
  std::vector<int> capacities;  // size m
  Mode mode = Mode::top_down;
  std::uint64_t master_seed = 0;
  int replications = 1;
  bool paired_landscapes = true;  // share landscape substreams across cells of one kind
  bool record_beliefs = false;    // keep per-period belief snapshots (large)

  void validate() const;

  // Identity of the parameter cell (seed and replications excluded).
  std::uint64_t cell_hash() const;
  // Identity of the task structure only; keys the landscape substream
  // when paired_landscapes is on.
  std::uint64_t kind_hash() const;

  std::string tau_mode_name() const;  // "none" or the tau value
};

struct PeriodRecord {
  int t = 0;
  std::uint32_t decision_bits = 0;  // bit i = decision i
  double perf = 0.0;
  double perf_norm = 0.0;
  std::vector<int> alloc_sizes;
  std::vector<double> eta;
  int n_transfers = 0;
};

struct RunRecord {
  int config_id = 0;
  int run = 0;
  std::vector<PeriodRecord> periods;
  std::vector<Transfer> transfers;
  std::vector<BeliefState> final_beliefs;
  std::vector<std::vector<BeliefState>> belief_snapshots;  // per period, when recorded

  // Exact text dump (hex floats) for determinism checks.
  std::string serialize() const;
};

struct SimState {
  Landscape landscape;
  Allocation alloc;
  DecisionVector current;  // implemented vector of the latest period
  std::vector<BeliefState> beliefs;
  RandomStream search_root;
};

// Builds the run-specific landscape, uniform initial vector, initial
// allocation (mirrored or random equal) and prior beliefs. All draws come
// from substreams keyed by (master_seed, cell/kind hash, run, label).
SimState init_run(const SimConfig& cfg, int run);

struct PeriodResult {
  PeriodRecord record;
  std::vector<Transfer> transfers;
  std::vector<std::optional<int>> flipped;  // per agent
};

// Executes period t: re-allocation when tau divides t, otherwise pairing
// plus individual/adjacent search against the period t-1 vector, followed
// by belief updates for agents that flipped.
PeriodResult run_period(SimState& state, const SimConfig& cfg, int t);

RunRecord run_simulation(const SimConfig& cfg, int run);

struct GridOptions {
  std::string out_dir;
  int jobs = 1;
  bool progress = true;
};

struct GridSummary {
  std::string records_path;
  std::string transfers_path;
  std::string beliefs_path;  // empty unless beliefs were recorded
  std::string manifest_path;
  std::uint64_t dataset_hash = 0;
  struct Failure {
    int config_id = 0;
    int run = 0;
    std::string message;
  };
  std::vector<Failure> failures;
};

// Runs every cell x replication, writes records.csv / transfers.csv /
// manifest.json (and beliefs.csv when requested) into out_dir. Output is
// byte-identical for any jobs value. Failed runs are flagged in the
// manifest instead of aborting the grid.
GridSummary run_grid(const std::vector<SimConfig>& cells, const GridOptions& opts);

std::uint64_t grid_hash(const std::vector<SimConfig>& cells);

std::uint32_t pack_bits(const DecisionVector& d);

}  // namespace orgsim
