#include "orgsim/engine.hpp"

#include <atomic>
#include <cinttypes>
#include <cstdarg>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "orgsim/analysis.hpp"
#include "orgsim/dataset.hpp"
#include "orgsim/errors.hpp"

namespace orgsim {

namespace {

// Stream labels for substream derivation.
const std::uint64_t kLandscapeStream = fnv1a64("landscape");
const std::uint64_t kInitVectorStream = fnv1a64("init_vector");
const std::uint64_t kInitAllocStream = fnv1a64("init_alloc");
const std::uint64_t kSearchStream = fnv1a64("search");
const std::uint64_t kPairingStream = fnv1a64("pairing");
const std::uint64_t kUnitStream = fnv1a64("unit");
const std::uint64_t kReallocStream = fnv1a64("realloc");

std::string fmt(const char* f, ...) {
  char buf[256];
  va_list ap;
  va_start(ap, f);
  std::vsnprintf(buf, sizeof buf, f, ap);
  va_end(ap);
  return buf;
}

}  // namespace

const char* mode_name(Mode m) {
  return m == Mode::top_down ? "top_down" : "emergent";
}

Mode mode_from_name(const std::string& name) {
  if (name == "top_down") return Mode::top_down;
  if (name == "emergent") return Mode::emergent;
  throw ConfigError("unknown mode '" + name + "' (expected top_down or emergent)");
}

void SimConfig::validate() const {
  if (n < 1) throw ConfigError("n must be >= 1");
  if (m < 1) throw ConfigError("m must be >= 1");
  if (n % m != 0) throw ConfigError("n must be divisible by m for the equal initial allocation");
  switch (kind) {
    case MatrixKind::decomposable2:
      if (n != 15 || k != 2) throw ConfigError("decomposable2 requires n=15, k=2");
      break;
    case MatrixKind::nondecomposable5:
      if (n != 15 || k != 5) throw ConfigError("nondecomposable5 requires n=15, k=5");
      break;
    case MatrixKind::random_k:
      if (k < 1 || k > n - 1)
        throw ConfigError("random kind requires k in [1, n-1] (efficiency is undefined at k=0)");
      break;
  }
  if (alpha < 0.0 || alpha > 1.0) throw ConfigError("alpha must lie in [0, 1]");
  if (pair_prob < 0.0 || pair_prob > 1.0) throw ConfigError("pair_prob must lie in [0, 1]");
  if (m < 3 && pair_prob > 0.0)
    throw ConfigError("pair_prob > 0 requires at least 3 agents (ring network)");
  if (mode == Mode::top_down && tau.has_value())
    throw ConfigError("top_down mode requires tau = none");
  if (tau.has_value() && *tau < 1) throw ConfigError("tau must be >= 1");
  if (horizon < 1) throw ConfigError("horizon must be >= 1");
  if (static_cast<int>(capacities.size()) != m)
    throw ConfigError("one capacity per agent required");
  for (int c : capacities) {
    if (c < 1) throw ConfigError("capacities must be >= 1");
    if (c < n / m) throw ConfigError("capacities must admit the equal initial allocation (>= n/m)");
  }
  if (replications < 1) throw ConfigError("replications must be >= 1");
  if (n > 25) throw ConfigError("n must be <= 25 (exhaustive optimum bound)");
}

std::uint64_t SimConfig::cell_hash() const {
  std::string s = fmt("kind=%s;k=%d;n=%d;m=%d;alpha=%.17g;pp=%.17g;mode=%s;tau=%d;T=%d;cap=",
                      kind_name(kind), k, n, m, alpha, pair_prob, mode_name(mode),
                      tau ? *tau : -1, horizon);
  for (int c : capacities) s += fmt("%d,", c);
  return fnv1a64(s);
}

std::uint64_t SimConfig::kind_hash() const {
  return fnv1a64(fmt("kind=%s;k=%d;n=%d", kind_name(kind), k, n));
}

std::string SimConfig::tau_mode_name() const {
  return tau ? std::to_string(*tau) : "none";
}

std::uint32_t pack_bits(const DecisionVector& d) {
  if (d.size() > 32) throw InternalError("pack_bits: vector too long");
  std::uint32_t bits = 0;
  for (std::size_t i = 0; i < d.size(); ++i)
    if (d[i]) bits |= (1u << i);
  return bits;
}

SimState init_run(const SimConfig& cfg, int run) {
  cfg.validate();
  SimState st;

  // Landscapes (and initial vectors) can be paired across cells that share
  // a task structure, for lower-variance cross-cell comparisons.
  const std::uint64_t pair_key = cfg.paired_landscapes ? cfg.kind_hash() : cfg.cell_hash();
  const std::uint64_t run_label = static_cast<std::uint64_t>(run);

  RandomStream ls_rng =
      RandomStream(cfg.master_seed).fork(kLandscapeStream).fork(pair_key).fork(run_label);
  const InfluenceMatrix matrix = build_influence_matrix(cfg.kind, cfg.n, cfg.k, ls_rng);
  st.landscape = generate_landscape(matrix, ls_rng);

  RandomStream vec_rng =
      RandomStream(cfg.master_seed).fork(kInitVectorStream).fork(pair_key).fork(run_label);
  st.current.resize(cfg.n);
  for (int i = 0; i < cfg.n; ++i)
    st.current[i] = static_cast<std::uint8_t>(vec_rng.next_below(2));

  if (cfg.mode == Mode::top_down) {
    st.alloc = Allocation::mirrored(cfg.n, cfg.m);
  } else {
    RandomStream alloc_rng =
        RandomStream(cfg.master_seed).fork(kInitAllocStream).fork(cfg.cell_hash()).fork(run_label);
    st.alloc = Allocation::equal_random(cfg.n, cfg.m, alloc_rng);
  }

  st.beliefs = init_beliefs(cfg.n, cfg.m);
  st.search_root =
      RandomStream(cfg.master_seed).fork(kSearchStream).fork(cfg.cell_hash()).fork(run_label);
  return st;
}

PeriodResult run_period(SimState& st, const SimConfig& cfg, int t) {
  PeriodResult res;
  res.flipped.assign(cfg.m, std::nullopt);
  RandomStream period = st.search_root.fork(static_cast<std::uint64_t>(t));

  const bool realloc_period = cfg.tau.has_value() && t % *cfg.tau == 0;
  if (realloc_period) {
    // Ownership may change; the decision vector stays frozen this period.
    RandomStream rng = period.fork(kReallocStream);
    std::vector<Offer> offers;
    for (int m = 0; m < cfg.m; ++m)
      if (auto offer = compute_offer(m, st.alloc.owned[m], st.beliefs[m], rng))
        offers.push_back(*offer);
    std::vector<Signal> signals;
    for (const Offer& offer : offers) {
      for (int r = 0; r < cfg.m; ++r) {
        if (r == offer.seller) continue;
        if (auto s = compute_signal(r, offer.task, st.alloc.owned[r], st.beliefs[r],
                                    cfg.capacities[r]))
          signals.push_back(*s);
      }
    }
    res.transfers = resolve_offers(offers, signals, st.alloc, cfg.capacities, t, rng);
  } else {
    const Pairing pairing = pair_agents(cfg.m, cfg.pair_prob, period.fork(kPairingStream));

    // All agents act on the period t-1 vector; each unit (single agent or
    // pair, keyed by its lowest agent index) consumes its own substream.
    for (int a = 0; a < cfg.m; ++a) {
      const int b = pairing.partner[a];
      if (b >= 0 && b < a) continue;
      RandomStream unit = period.fork(kUnitStream).fork(static_cast<std::uint64_t>(a));
      if (b < 0) {
        const StepOutcome out = individual_step(st.landscape, st.alloc, a, st.current, cfg.alpha, unit);
        if (out.flipped) res.flipped[a] = out.flipped;
      } else {
        const PairOutcome out =
            adjacent_step(st.landscape, st.alloc, a, b, st.current, cfg.alpha, unit);
        if (out.flipped) res.flipped[out.flipped->first] = out.flipped->second;
      }
    }

    std::vector<std::vector<std::uint8_t>> per_agent(cfg.m);
    for (int a = 0; a < cfg.m; ++a) {
      const auto& own = st.alloc.owned[a];
      per_agent[a].resize(own.size());
      for (std::size_t i = 0; i < own.size(); ++i) {
        std::uint8_t bit = st.current[own[i]];
        if (res.flipped[a] && *res.flipped[a] == own[i]) bit ^= 1;
        per_agent[a][i] = bit;
      }
    }
    DecisionVector next = assemble_vector(per_agent, st.alloc);

    bool any_flip = false;
    for (int a = 0; a < cfg.m; ++a) any_flip = any_flip || res.flipped[a].has_value();
    if (any_flip) {
      std::vector<double> prev_c(cfg.n), now_c(cfg.n);
      for (int n = 0; n < cfg.n; ++n) {
        prev_c[n] = contribution(st.landscape, n, st.current);
        now_c[n] = contribution(st.landscape, n, next);
      }
      for (int a = 0; a < cfg.m; ++a)
        if (res.flipped[a])
          update_beliefs(st.beliefs[a], *res.flipped[a], st.alloc.owned[a], prev_c, now_c);
    }
    st.current = std::move(next);
  }

  PeriodRecord& rec = res.record;
  rec.t = t;
  rec.decision_bits = pack_bits(st.current);
  rec.perf = performance(st.landscape, st.current);
  rec.perf_norm = rec.perf / st.landscape.optimum_value;
  rec.alloc_sizes.resize(cfg.m);
  rec.eta.resize(cfg.m);
  for (int m = 0; m < cfg.m; ++m) {
    rec.alloc_sizes[m] = static_cast<int>(st.alloc.owned[m].size());
    rec.eta[m] = efficiency(st.alloc, st.landscape.matrix, m);
  }
  rec.n_transfers = static_cast<int>(res.transfers.size());
  return res;
}

RunRecord run_simulation(const SimConfig& cfg, int run) {
  SimState st = init_run(cfg, run);
  RunRecord rec;
  rec.config_id = cfg.config_id;
  rec.run = run;
  rec.periods.reserve(cfg.horizon);
  for (int t = 1; t <= cfg.horizon; ++t) {
    PeriodResult pr = run_period(st, cfg, t);
    rec.periods.push_back(std::move(pr.record));
    rec.transfers.insert(rec.transfers.end(), pr.transfers.begin(), pr.transfers.end());
    if (cfg.record_beliefs) rec.belief_snapshots.push_back(st.beliefs);
  }
  rec.final_beliefs = std::move(st.beliefs);
  return rec;
}

std::string RunRecord::serialize() const {
  std::ostringstream out;
  out << "config " << config_id << " run " << run << "\n";
  char buf[64];
  for (const PeriodRecord& p : periods) {
    out << p.t << " bits " << p.decision_bits;
    std::snprintf(buf, sizeof buf, " perf %a norm %a", p.perf, p.perf_norm);
    out << buf;
    out << " sizes";
    for (int s : p.alloc_sizes) out << ' ' << s;
    out << " eta";
    for (double e : p.eta) {
      std::snprintf(buf, sizeof buf, " %a", e);
      out << buf;
    }
    out << " transfers " << p.n_transfers << "\n";
  }
  for (const Transfer& tr : transfers) {
    std::snprintf(buf, sizeof buf, " thr %a sig %a", tr.threshold, tr.signal);
    out << "transfer t" << tr.period << " task " << tr.task << " " << tr.seller << "->"
        << tr.buyer << buf << "\n";
  }
  for (std::size_t m = 0; m < final_beliefs.size(); ++m) {
    out << "beliefs " << m;
    const BeliefState& b = final_beliefs[m];
    for (int i = 0; i < b.n_decisions(); ++i)
      for (int j = 0; j < b.n_decisions(); ++j) {
        if (i == j) continue;
        out << ' ' << b.p(i, j) << ':' << b.q(i, j);
      }
    out << "\n";
  }
  return out.str();
}

namespace {

void write_records_header(std::ofstream& out, int m) {
  out << "config_id,run,t,K_kind,alpha,pair_prob,tau_mode,perf,perf_norm";
  for (int a = 1; a <= m; ++a) out << ",eta_agent_" << a;
  out << ",n_transfers\n";
}

void write_record_rows(std::ofstream& out, const SimConfig& cfg, const RunRecord& rec) {
  char head[256];
  std::snprintf(head, sizeof head, "%d,%d", cfg.config_id, rec.run);
  char params[160];
  std::snprintf(params, sizeof params, "%s,%.12g,%.12g,%s", kind_name(cfg.kind), cfg.alpha,
                cfg.pair_prob, cfg.tau_mode_name().c_str());
  char num[40];
  for (const PeriodRecord& p : rec.periods) {
    out << head << ',' << p.t << ',' << params;
    std::snprintf(num, sizeof num, ",%.17g", p.perf);
    out << num;
    std::snprintf(num, sizeof num, ",%.17g", p.perf_norm);
    out << num;
    for (double e : p.eta) {
      std::snprintf(num, sizeof num, ",%.17g", e);
      out << num;
    }
    out << ',' << p.n_transfers << '\n';
  }
}

void write_transfer_rows(std::ofstream& out, const SimConfig& cfg, const RunRecord& rec) {
  char num[48];
  for (const Transfer& tr : rec.transfers) {
    // Tasks and agents are 1-based in the CSVs.
    out << cfg.config_id << ',' << rec.run << ',' << tr.period << ',' << tr.task + 1 << ','
        << tr.seller + 1 << ',' << tr.buyer + 1;
    std::snprintf(num, sizeof num, ",%.17g", tr.threshold);
    out << num;
    std::snprintf(num, sizeof num, ",%.17g", tr.signal);
    out << num << '\n';
  }
}

void write_belief_rows(std::ofstream& out, const SimConfig& cfg, const RunRecord& rec) {
  char num[40];
  for (std::size_t pi = 0; pi < rec.belief_snapshots.size(); ++pi) {
    const int t = rec.periods[pi].t;
    const auto& states = rec.belief_snapshots[pi];
    for (std::size_t m = 0; m < states.size(); ++m) {
      const BeliefState& b = states[m];
      for (int i = 0; i < b.n_decisions(); ++i) {
        for (int j = 0; j < b.n_decisions(); ++j) {
          if (i == j) continue;
          out << cfg.config_id << ',' << rec.run << ',' << t << ',' << m + 1 << ',' << i + 1
              << ',' << j + 1 << ',' << b.p(i, j) << ',' << b.q(i, j);
          std::snprintf(num, sizeof num, ",%.17g", b.belief(i, j));
          out << num << '\n';
        }
      }
    }
  }
}

std::string hex64(std::uint64_t v) {
  char buf[24];
  std::snprintf(buf, sizeof buf, "%016" PRIx64, v);
  return buf;
}

}  // namespace

std::uint64_t grid_hash(const std::vector<SimConfig>& cells) {
  std::string s;
  for (const SimConfig& c : cells)
    s += fmt("%d:%016" PRIx64 ":%d;", c.config_id, c.cell_hash(), c.replications);
  return fnv1a64(s);
}

GridSummary run_grid(const std::vector<SimConfig>& cells, const GridOptions& opts) {
  if (cells.empty()) throw ConfigError("run_grid: empty grid");
  for (const SimConfig& c : cells) c.validate();
  const int m = cells.front().m;
  for (const SimConfig& c : cells)
    if (c.m != m) throw ConfigError("run_grid: all cells must share the agent count");

  namespace fs = std::filesystem;
  fs::create_directories(opts.out_dir);
  GridSummary sum;
  sum.records_path = (fs::path(opts.out_dir) / "records.csv").string();
  sum.transfers_path = (fs::path(opts.out_dir) / "transfers.csv").string();
  sum.manifest_path = (fs::path(opts.out_dir) / "manifest.json").string();

  std::ofstream records(sum.records_path);
  std::ofstream transfers(sum.transfers_path);
  if (!records || !transfers) throw ConfigError("run_grid: cannot write into '" + opts.out_dir + "'");
  write_records_header(records, m);
  transfers << "config_id,run,t,task,seller,buyer,threshold,winning_signal\n";

  bool any_beliefs = false;
  for (const SimConfig& c : cells) any_beliefs = any_beliefs || c.record_beliefs;
  std::ofstream beliefs;
  if (any_beliefs) {
    sum.beliefs_path = (fs::path(opts.out_dir) / "beliefs.csv").string();
    beliefs.open(sum.beliefs_path);
    beliefs << "config_id,run,t,agent,i,j,p,q,b\n";
  }

  const int jobs = std::max(1, opts.jobs);
  std::size_t cell_no = 0;
  for (const SimConfig& cell : cells) {
    ++cell_no;
    const int runs = cell.replications;
    std::vector<RunRecord> recs(runs);
    std::vector<std::string> errors(runs);
    std::atomic<int> next{0};
    auto worker = [&] {
      while (true) {
        const int r = next.fetch_add(1);
        if (r >= runs) break;
        try {
          recs[r] = run_simulation(cell, r);
        } catch (const std::exception& e) {
          errors[r] = e.what();
        }
      }
    };
    if (jobs == 1 || runs == 1) {
      worker();
    } else {
      std::vector<std::thread> pool;
      for (int i = 0; i < std::min(jobs, runs); ++i) pool.emplace_back(worker);
      for (auto& th : pool) th.join();
    }

    for (int r = 0; r < runs; ++r) {
      if (!errors[r].empty()) {
        sum.failures.push_back({cell.config_id, r, errors[r]});
        continue;
      }
      write_record_rows(records, cell, recs[r]);
      write_transfer_rows(transfers, cell, recs[r]);
      if (cell.record_beliefs) write_belief_rows(beliefs, cell, recs[r]);
    }
    if (opts.progress) {
      std::fprintf(stderr, "[orgsim] cell %zu/%zu (%s k=%d alpha=%g pp=%g %s): %d runs\n",
                   cell_no, cells.size(), kind_name(cell.kind), cell.k, cell.alpha,
                   cell.pair_prob, mode_name(cell.mode), runs);
    }
  }
  records.close();
  transfers.close();
  if (any_beliefs) beliefs.close();
  if (!records || !transfers) throw ConfigError("run_grid: write failure");

  sum.dataset_hash = fnv1a64_file(sum.records_path);

  nlohmann::json man;
  man["format"] = "orgsim-dataset-v1";
  man["tool_version"] = kOrgsimVersion;
  man["master_seed"] = cells.front().master_seed;
  man["n_agents"] = m;
  man["grid_hash"] = hex64(grid_hash(cells));
  man["records"] = "records.csv";
  man["transfers"] = "transfers.csv";
  if (any_beliefs) man["beliefs"] = "beliefs.csv";
  man["dataset_hash"] = hex64(sum.dataset_hash);
  man["transfers_hash"] = hex64(fnv1a64_file(sum.transfers_path));
  nlohmann::json jcells = nlohmann::json::array();
  for (const SimConfig& c : cells) {
    nlohmann::json jc;
    jc["id"] = c.config_id;
    jc["kind"] = kind_name(c.kind);
    jc["k"] = c.k;
    jc["n"] = c.n;
    jc["m"] = c.m;
    jc["alpha"] = c.alpha;
    jc["pair_prob"] = c.pair_prob;
    jc["mode"] = mode_name(c.mode);
    if (c.tau)
      jc["tau"] = *c.tau;
    else
      jc["tau"] = nullptr;
    jc["horizon"] = c.horizon;
    jc["capacities"] = c.capacities;
    jc["runs"] = c.replications;
    jc["paired_landscapes"] = c.paired_landscapes;
    jcells.push_back(jc);
  }
  man["cells"] = jcells;
  nlohmann::json jfail = nlohmann::json::array();
  for (const GridSummary::Failure& f : sum.failures)
    jfail.push_back({{"config_id", f.config_id}, {"run", f.run}, {"error", f.message}});
  man["failed_runs"] = jfail;

  std::ofstream manifest(sum.manifest_path);
  manifest << man.dump(2) << "\n";
  manifest.close();
  if (!manifest) throw ConfigError("run_grid: cannot write manifest");
  return sum;
}

}  // namespace orgsim
