#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace orgsim {

// Columnar view of records.csv: one entry per (config cell, run, period).
// kind/tau_mode values are interned; eta holds n_agents values per row.
struct Dataset {
  int n_agents = 0;
  std::vector<std::string> kind_names;
  std::vector<std::string> tau_names;

  std::vector<std::int32_t> config_id, run, t, kind_id, tau_id, n_transfers;
  std::vector<double> alpha, pair_prob, perf, perf_norm;
  std::vector<double> eta;  // row-major, n_agents per row

  std::uint64_t dataset_hash = 0;  // hash of records.csv, from the manifest
  std::uint64_t master_seed = 0;   // from the manifest

  std::size_t size() const { return t.size(); }

  int intern_kind(const std::string& name);
  int intern_tau(const std::string& name);

  void append_row(int config_id, int run, int t, const std::string& kind, double alpha,
                  double pair_prob, const std::string& tau_mode, double perf,
                  double perf_norm, std::span<const double> eta_row, int n_transfers);
};

// Reads manifest.json + records.csv from a dataset directory; refuses the
// dataset when the records hash does not match the manifest.
Dataset load_dataset(const std::string& dir);

// FNV-1a 64 over a file's bytes.
std::uint64_t fnv1a64_file(const std::string& path);

}  // namespace orgsim
