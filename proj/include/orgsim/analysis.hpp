#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "orgsim/agents.hpp"
#include "orgsim/dataset.hpp"
#include "orgsim/landscape.hpp"

namespace orgsim {

// Ratio of the agent's internal dependencies to |owned| * K: counts
// ordered pairs (n, j), n != j, both owned, with matrix(n, j) set.
// Undefined (DomainError) for k = 0.
double efficiency(const Allocation& alloc, const InfluenceMatrix& matrix, int agent);

enum class GridVar { kind, alpha, pair_prob, tau_mode, time };

const char* grid_var_name(GridVar v);
GridVar grid_var_from_name(const std::string& name);

struct PdOptions {
  int n_boot = 1000;
  double level = 0.95;
  std::uint64_t seed = 0;  // bootstrap resampling stream
};

struct PdRow {
  std::vector<std::string> scope_values;  // one per scope variable
  double mean = 0.0;
  double ci_lo = 0.0;
  double ci_hi = 0.0;
  std::int64_t n_rows = 0;  // data rows behind the marginal
};

struct PartialDependenceTable {
  std::vector<GridVar> scope;
  std::vector<PdRow> rows;  // sorted by scope coordinate
};

// Empirical partial dependence of perf_norm on the scope variables: for
// each scope cell, the response is averaged per complementary grid cell
// (over replications) and the complementary cells are then weighted
// equally. The confidence band is a percentile bootstrap over run
// indices, resampled jointly across cells.
PartialDependenceTable partial_dependence(const Dataset& ds,
                                          const std::vector<GridVar>& scope,
                                          const PdOptions& opts = {});

enum class ModeFilter { all_rows, emergent_only, top_down_only };

struct CdfPoint {
  double eta = 0.0;
  double cdf = 0.0;
};

// Empirical CDF of the per-agent-period efficiency samples, grouped by
// (kind, alpha). One point per distinct eta value.
struct CdfGroup {
  std::string kind;
  double alpha = 0.0;
  std::size_t n_samples = 0;
  std::vector<CdfPoint> points;
};

std::vector<CdfGroup> efficiency_cdf(const Dataset& ds,
                                     ModeFilter filter = ModeFilter::emergent_only);

struct SummaryOptions {
  std::vector<int> periods{1, 50, 100, 150};
  int n_boot = 1000;
  double level = 0.95;
  std::uint64_t seed = 0;
};

struct SummaryRow {
  int config_id = 0;
  std::string kind;
  double alpha = 0.0;
  double pair_prob = 0.0;
  std::string tau_mode;
  int t = 0;
  int n_runs = 0;
  double mean = 0.0;
  double sd = 0.0;
  double ci_lo = 0.0;
  double ci_hi = 0.0;
  double mean_transfers = 0.0;  // mean per-run transfer count over the horizon
};

// Per config cell and selected period: mean/sd/bootstrap CI of perf_norm
// over runs, plus the cell's mean transfer count per run.
std::vector<SummaryRow> summarize(const Dataset& ds, const SummaryOptions& opts = {});

// Plot-ready CSV emitters. Each file starts with a comment line naming
// the dataset hash so outputs cannot be mixed across datasets.
void write_pd_csv(const PartialDependenceTable& table, const Dataset& ds,
                  const std::string& path);
void write_cdf_csv(const std::vector<CdfGroup>& groups, const Dataset& ds,
                   const std::string& path);
void write_summary_csv(const std::vector<SummaryRow>& rows, const Dataset& ds,
                       const std::string& path);

}  // namespace orgsim
