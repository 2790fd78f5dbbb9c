#include "orgsim/dataset.hpp"

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "orgsim/errors.hpp"
#include "orgsim/rng.hpp"

namespace orgsim {

int Dataset::intern_kind(const std::string& name) {
  const auto it = std::find(kind_names.begin(), kind_names.end(), name);
  if (it != kind_names.end()) return static_cast<int>(it - kind_names.begin());
  kind_names.push_back(name);
  return static_cast<int>(kind_names.size()) - 1;
}

int Dataset::intern_tau(const std::string& name) {
  const auto it = std::find(tau_names.begin(), tau_names.end(), name);
  if (it != tau_names.end()) return static_cast<int>(it - tau_names.begin());
  tau_names.push_back(name);
  return static_cast<int>(tau_names.size()) - 1;
}

void Dataset::append_row(int cid, int run_idx, int period, const std::string& kind,
                         double a, double pp, const std::string& tau_mode, double p,
                         double pn, std::span<const double> eta_row, int transfers) {
  if (n_agents == 0) n_agents = static_cast<int>(eta_row.size());
  if (static_cast<int>(eta_row.size()) != n_agents)
    throw InternalError("Dataset::append_row: eta width mismatch");
  config_id.push_back(cid);
  run.push_back(run_idx);
  t.push_back(period);
  kind_id.push_back(intern_kind(kind));
  tau_id.push_back(intern_tau(tau_mode));
  alpha.push_back(a);
  pair_prob.push_back(pp);
  perf.push_back(p);
  perf_norm.push_back(pn);
  eta.insert(eta.end(), eta_row.begin(), eta_row.end());
  n_transfers.push_back(transfers);
}

std::uint64_t fnv1a64_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open '" + path + "'");
  std::uint64_t h = 0xcbf29ce484222325ull;
  char buf[1 << 16];
  while (in) {
    in.read(buf, sizeof buf);
    h = fnv1a64(h, std::string_view(buf, static_cast<std::size_t>(in.gcount())));
  }
  return h;
}

namespace {

// Splits one CSV line in place; returns field start pointers.
void split_fields(char* line, std::vector<char*>& fields) {
  fields.clear();
  char* p = line;
  fields.push_back(p);
  while (*p) {
    if (*p == ',') {
      *p = '\0';
      fields.push_back(p + 1);
    }
    ++p;
  }
}

}  // namespace

Dataset load_dataset(const std::string& dir) {
  namespace fs = std::filesystem;
  const std::string manifest_path = (fs::path(dir) / "manifest.json").string();
  std::ifstream mf(manifest_path);
  if (!mf) throw ConfigError("no manifest.json in '" + dir + "'");
  nlohmann::json man;
  try {
    mf >> man;
  } catch (const std::exception& e) {
    throw ConfigError("manifest.json: " + std::string(e.what()));
  }
  if (man.value("format", "") != std::string("orgsim-dataset-v1"))
    throw ConfigError("manifest.json: unsupported format");

  const std::string records_path = (fs::path(dir) / man.value("records", "records.csv")).string();
  const std::uint64_t want_hash = std::stoull(man.at("dataset_hash").get<std::string>(), nullptr, 16);
  const std::uint64_t got_hash = fnv1a64_file(records_path);
  if (want_hash != got_hash)
    throw ConfigError("dataset hash mismatch: records.csv does not belong to this manifest");

  Dataset ds;
  ds.dataset_hash = got_hash;
  ds.master_seed = man.value("master_seed", std::uint64_t{0});

  std::ifstream in(records_path);
  if (!in) throw ConfigError("cannot open '" + records_path + "'");
  std::string line;
  if (!std::getline(in, line)) throw ConfigError("records.csv: empty file");

  // Header fixes the eta column count.
  int n_eta = 0;
  {
    std::string h = line;
    std::size_t pos = 0;
    std::vector<std::string> names;
    while (pos != std::string::npos) {
      const std::size_t next = h.find(',', pos);
      names.push_back(h.substr(pos, next == std::string::npos ? next : next - pos));
      pos = next == std::string::npos ? next : next + 1;
    }
    for (const std::string& nm : names)
      if (nm.rfind("eta_agent_", 0) == 0) ++n_eta;
    if (names.size() != static_cast<std::size_t>(10 + n_eta) || n_eta == 0)
      throw ConfigError("records.csv: unexpected header");
  }
  ds.n_agents = n_eta;

  std::vector<char*> f;
  std::vector<double> eta_row(n_eta);
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    split_fields(line.data(), f);
    if (f.size() != static_cast<std::size_t>(10 + n_eta))
      throw ConfigError("records.csv:" + std::to_string(line_no) + ": wrong field count");
    const int cid = std::atoi(f[0]);
    const int run_idx = std::atoi(f[1]);
    const int period = std::atoi(f[2]);
    const std::string kind = f[3];
    const double a = std::strtod(f[4], nullptr);
    const double pp = std::strtod(f[5], nullptr);
    const std::string tau_mode = f[6];
    const double p = std::strtod(f[7], nullptr);
    const double pn = std::strtod(f[8], nullptr);
    for (int i = 0; i < n_eta; ++i) eta_row[i] = std::strtod(f[9 + i], nullptr);
    const int transfers = std::atoi(f[9 + n_eta]);
    ds.append_row(cid, run_idx, period, kind, a, pp, tau_mode, p, pn, eta_row, transfers);
  }
  return ds;
}

}  // namespace orgsim
