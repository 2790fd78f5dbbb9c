#include "orgsim/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>

#include "orgsim/errors.hpp"
#include "orgsim/rng.hpp"

namespace orgsim {

double efficiency(const Allocation& alloc, const InfluenceMatrix& matrix, int agent) {
  if (matrix.k == 0) throw DomainError("efficiency: undefined for k = 0");
  const auto& own = alloc.owned[agent];
  if (own.empty()) throw DomainError("efficiency: agent owns no decisions");
  int internal = 0;
  for (int a : own)
    for (int b : own)
      if (a != b && matrix.depends(a, b)) ++internal;
  return static_cast<double>(internal) /
         (static_cast<double>(own.size()) * static_cast<double>(matrix.k));
}

const char* grid_var_name(GridVar v) {
  switch (v) {
    case GridVar::kind: return "kind";
    case GridVar::alpha: return "alpha";
    case GridVar::pair_prob: return "pair_prob";
    case GridVar::tau_mode: return "tau_mode";
    case GridVar::time: return "t";
  }
  throw InternalError("grid_var_name: unknown variable");
}

GridVar grid_var_from_name(const std::string& name) {
  if (name == "kind") return GridVar::kind;
  if (name == "alpha") return GridVar::alpha;
  if (name == "pair_prob") return GridVar::pair_prob;
  if (name == "tau_mode") return GridVar::tau_mode;
  if (name == "t" || name == "time") return GridVar::time;
  throw ConfigError("unknown grid variable '" + name + "'");
}

namespace {

constexpr GridVar kAllVars[] = {GridVar::kind, GridVar::alpha, GridVar::pair_prob,
                                GridVar::tau_mode, GridVar::time};

std::string fmt_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

std::string fmt17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

// Per-variable value table (sorted) and per-row local ids.
struct VarIndex {
  std::vector<std::string> labels;        // display strings, sorted order
  std::vector<std::int32_t> row_ids;      // one per dataset row
  std::size_t size() const { return labels.size(); }
};

template <class T, class Label>
VarIndex index_values(const std::vector<T>& column, Label label) {
  VarIndex vi;
  std::vector<T> values(column);
  std::sort(values.begin(), values.end());
  values.erase(std::unique(values.begin(), values.end()), values.end());
  vi.labels.reserve(values.size());
  for (const T& v : values) vi.labels.push_back(label(v));
  vi.row_ids.resize(column.size());
  for (std::size_t r = 0; r < column.size(); ++r) {
    const auto it = std::lower_bound(values.begin(), values.end(), column[r]);
    vi.row_ids[r] = static_cast<std::int32_t>(it - values.begin());
  }
  return vi;
}

VarIndex build_var_index(const Dataset& ds, GridVar v) {
  switch (v) {
    case GridVar::kind: {
      // Interned ids -> sorted names
      std::vector<std::string> col(ds.size());
      for (std::size_t r = 0; r < ds.size(); ++r) col[r] = ds.kind_names[ds.kind_id[r]];
      return index_values(col, [](const std::string& s) { return s; });
    }
    case GridVar::tau_mode: {
      std::vector<std::string> col(ds.size());
      for (std::size_t r = 0; r < ds.size(); ++r) col[r] = ds.tau_names[ds.tau_id[r]];
      return index_values(col, [](const std::string& s) { return s; });
    }
    case GridVar::alpha:
      return index_values(ds.alpha, fmt_double);
    case GridVar::pair_prob:
      return index_values(ds.pair_prob, fmt_double);
    case GridVar::time:
      return index_values(ds.t, [](std::int32_t t) { return std::to_string(t); });
  }
  throw InternalError("build_var_index: unknown variable");
}

double quantile_sorted(const std::vector<double>& sorted, double q) {
  if (sorted.empty()) return 0.0;
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const std::size_t idx = static_cast<std::size_t>(std::llround(pos));
  return sorted[std::min(idx, sorted.size() - 1)];
}

}  // namespace

PartialDependenceTable partial_dependence(const Dataset& ds,
                                          const std::vector<GridVar>& scope,
                                          const PdOptions& opts) {
  if (ds.size() == 0) throw DomainError("partial_dependence: empty dataset");
  if (scope.empty()) throw DomainError("partial_dependence: empty scope");
  for (std::size_t i = 0; i < scope.size(); ++i)
    for (std::size_t j = i + 1; j < scope.size(); ++j)
      if (scope[i] == scope[j]) throw DomainError("partial_dependence: duplicate scope variable");

  std::vector<GridVar> comp;
  for (GridVar v : kAllVars)
    if (std::find(scope.begin(), scope.end(), v) == scope.end()) comp.push_back(v);

  std::map<GridVar, VarIndex> idx;
  for (GridVar v : kAllVars) idx.emplace(v, build_var_index(ds, v));
  const VarIndex runs = index_values(ds.run, [](std::int32_t r) { return std::to_string(r); });
  const std::size_t n_runs = runs.size();

  std::size_t n_s = 1, n_c = 1;
  for (GridVar v : scope) n_s *= idx.at(v).size();
  for (GridVar v : comp) n_c *= idx.at(v).size();
  if (n_s * n_c * n_runs > 100'000'000)
    throw DomainError("partial_dependence: grid too large to marginalize in memory");

  // Row -> (scope cell, complementary cell, run) accumulation.
  std::vector<double> sum(n_s * n_c * n_runs, 0.0);
  std::vector<std::uint32_t> cnt(n_s * n_c * n_runs, 0);
  for (std::size_t r = 0; r < ds.size(); ++r) {
    std::size_t s = 0;
    for (GridVar v : scope) s = s * idx.at(v).size() + idx.at(v).row_ids[r];
    std::size_t c = 0;
    for (GridVar v : comp) c = c * idx.at(v).size() + idx.at(v).row_ids[r];
    const std::size_t cell = (s * n_c + c) * n_runs + runs.row_ids[r];
    sum[cell] += ds.perf_norm[r];
    ++cnt[cell];
  }

  // Percentile bootstrap over run indices, shared draws across scope cells.
  RandomStream boot(fnv1a64(std::string("pd-bootstrap;") + std::to_string(ds.dataset_hash) +
                            ";" + std::to_string(opts.seed)));
  std::vector<std::uint32_t> draws;
  if (opts.n_boot > 0) {
    draws.resize(static_cast<std::size_t>(opts.n_boot) * n_runs);
    for (auto& d : draws) d = boot.next_below(static_cast<std::uint32_t>(n_runs));
  }

  PartialDependenceTable table;
  table.scope = scope;
  table.rows.resize(n_s);

  std::vector<double> run_mean(n_runs);   // B[s][r]
  std::vector<bool> run_present(n_runs);
  std::vector<double> stats(static_cast<std::size_t>(std::max(opts.n_boot, 0)));
  for (std::size_t s = 0; s < n_s; ++s) {
    double cell_total = 0.0;
    std::size_t cell_count = 0;
    std::int64_t n_rows = 0;
    std::fill(run_mean.begin(), run_mean.end(), 0.0);
    std::fill(run_present.begin(), run_present.end(), false);
    std::vector<std::uint32_t> run_cells(n_runs, 0);
    for (std::size_t c = 0; c < n_c; ++c) {
      double tot = 0.0;
      std::uint64_t tot_cnt = 0;
      for (std::size_t r = 0; r < n_runs; ++r) {
        const std::size_t cell = (s * n_c + c) * n_runs + r;
        if (cnt[cell] == 0) continue;
        tot += sum[cell];
        tot_cnt += cnt[cell];
        run_mean[r] += sum[cell] / cnt[cell];
        run_present[r] = true;
        ++run_cells[r];
      }
      if (tot_cnt > 0) {
        cell_total += tot / static_cast<double>(tot_cnt);
        ++cell_count;
        n_rows += static_cast<std::int64_t>(tot_cnt);
      }
    }
    PdRow& row = table.rows[s];
    row.n_rows = n_rows;
    row.mean = cell_count > 0 ? cell_total / static_cast<double>(cell_count) : 0.0;
    for (std::size_t r = 0; r < n_runs; ++r)
      if (run_present[r]) run_mean[r] /= static_cast<double>(run_cells[r]);

    if (opts.n_boot > 0 && cell_count > 0) {
      for (int b = 0; b < opts.n_boot; ++b) {
        double acc = 0.0;
        std::size_t k = 0;
        const std::uint32_t* d = &draws[static_cast<std::size_t>(b) * n_runs];
        for (std::size_t i = 0; i < n_runs; ++i) {
          const std::uint32_t r = d[i];
          if (!run_present[r]) continue;
          acc += run_mean[r];
          ++k;
        }
        stats[b] = k > 0 ? acc / static_cast<double>(k) : row.mean;
      }
      std::sort(stats.begin(), stats.end());
      row.ci_lo = quantile_sorted(stats, (1.0 - opts.level) / 2.0);
      row.ci_hi = quantile_sorted(stats, 1.0 - (1.0 - opts.level) / 2.0);
    } else {
      row.ci_lo = row.ci_hi = row.mean;
    }

    // Decode the scope coordinate into display strings.
    std::size_t rem = s;
    std::vector<std::size_t> coords(scope.size());
    for (std::size_t v = scope.size(); v-- > 0;) {
      const std::size_t radix = idx.at(scope[v]).size();
      coords[v] = rem % radix;
      rem /= radix;
    }
    row.scope_values.resize(scope.size());
    for (std::size_t v = 0; v < scope.size(); ++v)
      row.scope_values[v] = idx.at(scope[v]).labels[coords[v]];
  }
  return table;
}

std::vector<CdfGroup> efficiency_cdf(const Dataset& ds, ModeFilter filter) {
  int none_id = -1;
  for (std::size_t i = 0; i < ds.tau_names.size(); ++i)
    if (ds.tau_names[i] == "none") none_id = static_cast<int>(i);

  std::map<std::pair<std::string, double>, std::vector<double>> groups;
  for (std::size_t r = 0; r < ds.size(); ++r) {
    const bool top_down = ds.tau_id[r] == none_id;
    if (filter == ModeFilter::emergent_only && top_down) continue;
    if (filter == ModeFilter::top_down_only && !top_down) continue;
    auto& samples = groups[{ds.kind_names[ds.kind_id[r]], ds.alpha[r]}];
    const double* e = &ds.eta[r * ds.n_agents];
    samples.insert(samples.end(), e, e + ds.n_agents);
  }

  std::vector<CdfGroup> out;
  for (auto& [key, samples] : groups) {
    CdfGroup g;
    g.kind = key.first;
    g.alpha = key.second;
    g.n_samples = samples.size();
    std::sort(samples.begin(), samples.end());
    const double n = static_cast<double>(samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i) {
      if (i + 1 < samples.size() && samples[i + 1] == samples[i]) continue;
      g.points.push_back({samples[i], static_cast<double>(i + 1) / n});
    }
    out.push_back(std::move(g));
  }
  return out;
}

std::vector<SummaryRow> summarize(const Dataset& ds, const SummaryOptions& opts) {
  std::map<int, std::vector<std::size_t>> by_config;
  for (std::size_t r = 0; r < ds.size(); ++r) by_config[ds.config_id[r]].push_back(r);

  std::vector<SummaryRow> out;
  for (const auto& [cid, rows] : by_config) {
    // Distinct runs and their transfer totals.
    std::map<int, double> transfers_per_run;
    std::map<int, std::map<int, double>> value_at;  // t -> run -> perf_norm
    for (std::size_t r : rows) {
      transfers_per_run[ds.run[r]] += ds.n_transfers[r];
      value_at[ds.t[r]][ds.run[r]] = ds.perf_norm[r];
    }
    double mean_transfers = 0.0;
    for (const auto& [_, v] : transfers_per_run) mean_transfers += v;
    mean_transfers /= static_cast<double>(transfers_per_run.size());

    RandomStream boot(fnv1a64("summary-bootstrap;" + std::to_string(ds.dataset_hash) + ";" +
                              std::to_string(cid) + ";" + std::to_string(opts.seed)));
    for (int period : opts.periods) {
      const auto it = value_at.find(period);
      if (it == value_at.end()) continue;
      std::vector<double> values;
      values.reserve(it->second.size());
      for (const auto& [_, v] : it->second) values.push_back(v);
      const std::size_t n = values.size();
      double mean = 0.0;
      for (double v : values) mean += v;
      mean /= static_cast<double>(n);
      double sd = 0.0;
      if (n > 1) {
        for (double v : values) sd += (v - mean) * (v - mean);
        sd = std::sqrt(sd / static_cast<double>(n - 1));
      }

      SummaryRow row;
      row.config_id = cid;
      row.kind = ds.kind_names[ds.kind_id[rows.front()]];
      row.alpha = ds.alpha[rows.front()];
      row.pair_prob = ds.pair_prob[rows.front()];
      row.tau_mode = ds.tau_names[ds.tau_id[rows.front()]];
      row.t = period;
      row.n_runs = static_cast<int>(n);
      row.mean = mean;
      row.sd = sd;
      row.mean_transfers = mean_transfers;
      if (opts.n_boot > 0 && n > 0) {
        std::vector<double> stats(opts.n_boot);
        for (int b = 0; b < opts.n_boot; ++b) {
          double acc = 0.0;
          for (std::size_t i = 0; i < n; ++i)
            acc += values[boot.next_below(static_cast<std::uint32_t>(n))];
          stats[b] = acc / static_cast<double>(n);
        }
        std::sort(stats.begin(), stats.end());
        row.ci_lo = quantile_sorted(stats, (1.0 - opts.level) / 2.0);
        row.ci_hi = quantile_sorted(stats, 1.0 - (1.0 - opts.level) / 2.0);
      } else {
        row.ci_lo = row.ci_hi = mean;
      }
      out.push_back(std::move(row));
    }
  }
  return out;
}

namespace {

std::ofstream open_csv(const std::string& path, const Dataset& ds) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot open '" + path + "' for writing");
  char buf[40];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(ds.dataset_hash));
  out << "# dataset " << buf << "\n";
  return out;
}

}  // namespace

void write_pd_csv(const PartialDependenceTable& table, const Dataset& ds,
                  const std::string& path) {
  std::ofstream out = open_csv(path, ds);
  for (std::size_t v = 0; v < table.scope.size(); ++v)
    out << (v ? "," : "") << grid_var_name(table.scope[v]);
  out << ",mean,ci_lo,ci_hi,n\n";
  for (const PdRow& row : table.rows) {
    if (row.n_rows == 0) continue;  // scope combination absent from the grid
    for (std::size_t v = 0; v < row.scope_values.size(); ++v)
      out << (v ? "," : "") << row.scope_values[v];
    out << ',' << fmt17(row.mean) << ',' << fmt17(row.ci_lo) << ',' << fmt17(row.ci_hi) << ','
        << row.n_rows << "\n";
  }
  if (!out) throw ConfigError("write failed for '" + path + "'");
}

void write_cdf_csv(const std::vector<CdfGroup>& groups, const Dataset& ds,
                   const std::string& path) {
  std::ofstream out = open_csv(path, ds);
  out << "K_kind,alpha,eta,cdf,n_samples\n";
  for (const CdfGroup& g : groups)
    for (const CdfPoint& p : g.points)
      out << g.kind << ',' << fmt_double(g.alpha) << ',' << fmt17(p.eta) << ',' << fmt17(p.cdf)
          << ',' << g.n_samples << "\n";
  if (!out) throw ConfigError("write failed for '" + path + "'");
}

void write_summary_csv(const std::vector<SummaryRow>& rows, const Dataset& ds,
                       const std::string& path) {
  std::ofstream out = open_csv(path, ds);
  out << "config_id,K_kind,alpha,pair_prob,tau_mode,t,n_runs,mean,sd,ci_lo,ci_hi,mean_transfers\n";
  for (const SummaryRow& r : rows) {
    out << r.config_id << ',' << r.kind << ',' << fmt_double(r.alpha) << ','
        << fmt_double(r.pair_prob) << ',' << r.tau_mode << ',' << r.t << ',' << r.n_runs << ','
        << fmt17(r.mean) << ',' << fmt17(r.sd) << ',' << fmt17(r.ci_lo) << ',' << fmt17(r.ci_hi)
        << ',' << fmt17(r.mean_transfers) << "\n";
  }
  if (!out) throw ConfigError("write failed for '" + path + "'");
}

}  // namespace orgsim
