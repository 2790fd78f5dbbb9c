#include "orgsim/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include "orgsim/errors.hpp"

namespace orgsim {

GridSpec::GridSpec() {
  capacities = {5};
  for (int i = 0; i <= 10; ++i) pair_probs.push_back(i * 0.05);
}

namespace {

struct Line {
  std::string key;
  std::string value;
  int number = 0;
};

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

[[noreturn]] void fail(const std::string& origin, int line, const std::string& msg) {
  throw ConfigError(origin + ":" + std::to_string(line) + ": " + msg);
}

std::vector<std::string> split_list(const std::string& value) {
  std::vector<std::string> items;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) items.push_back(trim(item));
  return items;
}

double parse_double(const std::string& s, const std::string& origin, int line,
                    const std::string& key) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end == s.c_str() || *end != '\0') fail(origin, line, "key '" + key + "': bad number '" + s + "'");
  return v;
}

long long parse_int(const std::string& s, const std::string& origin, int line,
                    const std::string& key) {
  char* end = nullptr;
  const long long v = std::strtoll(s.c_str(), &end, 10);
  if (end == s.c_str() || *end != '\0') fail(origin, line, "key '" + key + "': bad integer '" + s + "'");
  return v;
}

// Comma list or start:step:stop range (inclusive stop, up to rounding).
std::vector<double> parse_double_list(const std::string& value, const std::string& origin,
                                      int line, const std::string& key) {
  std::vector<double> out;
  if (value.find(':') != std::string::npos) {
    std::vector<std::string> parts;
    std::stringstream ss(value);
    std::string p;
    while (std::getline(ss, p, ':')) parts.push_back(trim(p));
    if (parts.size() != 3) fail(origin, line, "key '" + key + "': range must be start:step:stop");
    const double start = parse_double(parts[0], origin, line, key);
    const double step = parse_double(parts[1], origin, line, key);
    const double stop = parse_double(parts[2], origin, line, key);
    if (step <= 0.0 || stop < start) fail(origin, line, "key '" + key + "': bad range");
    const int count = static_cast<int>(std::floor((stop - start) / step + 1e-9)) + 1;
    for (int i = 0; i < count; ++i) out.push_back(start + i * step);
  } else {
    for (const std::string& item : split_list(value))
      out.push_back(parse_double(item, origin, line, key));
  }
  if (out.empty()) fail(origin, line, "key '" + key + "': empty list");
  std::set<double> seen(out.begin(), out.end());
  if (seen.size() != out.size()) fail(origin, line, "key '" + key + "': duplicate values");
  return out;
}

bool parse_bool(const std::string& s, const std::string& origin, int line,
                const std::string& key) {
  if (s == "true" || s == "1" || s == "yes") return true;
  if (s == "false" || s == "0" || s == "no") return false;
  fail(origin, line, "key '" + key + "': expected true/false");
}

}  // namespace

GridSpec parse_grid_text(const std::string& text, const std::string& origin) {
  GridSpec spec;
  std::set<std::string> seen;
  std::istringstream in(text);
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto hash = raw.find('#');
    if (hash != std::string::npos) raw.erase(hash);
    const std::string line = trim(raw);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) fail(origin, line_no, "expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty()) fail(origin, line_no, "expected 'key = value'");
    if (!seen.insert(key).second) fail(origin, line_no, "duplicate key '" + key + "'");

    if (key == "seed") {
      char* end = nullptr;
      spec.seed = std::strtoull(value.c_str(), &end, 10);
      if (end == value.c_str() || *end != '\0') fail(origin, line_no, "key 'seed': bad integer");
    } else if (key == "runs") {
      spec.runs = static_cast<int>(parse_int(value, origin, line_no, key));
    } else if (key == "n") {
      spec.n = static_cast<int>(parse_int(value, origin, line_no, key));
    } else if (key == "m") {
      spec.m = static_cast<int>(parse_int(value, origin, line_no, key));
    } else if (key == "horizon") {
      spec.horizon = static_cast<int>(parse_int(value, origin, line_no, key));
    } else if (key == "tau") {
      spec.tau = static_cast<int>(parse_int(value, origin, line_no, key));
    } else if (key == "k") {
      spec.random_k = static_cast<int>(parse_int(value, origin, line_no, key));
    } else if (key == "capacity") {
      spec.capacities.clear();
      for (const std::string& item : split_list(value))
        spec.capacities.push_back(static_cast<int>(parse_int(item, origin, line_no, key)));
    } else if (key == "kinds") {
      spec.kinds = split_list(value);
    } else if (key == "alphas") {
      spec.alphas = parse_double_list(value, origin, line_no, key);
    } else if (key == "pair_probs") {
      spec.pair_probs = parse_double_list(value, origin, line_no, key);
    } else if (key == "modes") {
      spec.modes = split_list(value);
    } else if (key == "paired_landscapes") {
      spec.paired_landscapes = parse_bool(value, origin, line_no, key);
    } else if (key == "record_beliefs") {
      spec.record_beliefs = parse_bool(value, origin, line_no, key);
    } else {
      fail(origin, line_no, "unknown key '" + key + "'");
    }
  }
  return spec;
}

GridSpec parse_grid_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_grid_text(ss.str(), path);
}

void validate_grid(const GridSpec& spec) {
  if (!spec.seed) throw ConfigError("field 'seed': missing (no default is applied)");
  if (spec.runs < 1) throw ConfigError("field 'runs': must be >= 1");
  if (spec.n < 1) throw ConfigError("field 'n': must be >= 1");
  if (spec.m < 1) throw ConfigError("field 'm': must be >= 1");
  if (spec.n > 25) throw ConfigError("field 'n': must be <= 25 (exhaustive optimum bound)");
  if (spec.n % spec.m != 0) throw ConfigError("fields 'n'/'m': n must be divisible by m");
  if (spec.horizon < 1) throw ConfigError("field 'horizon': must be >= 1");
  if (spec.tau < 1) throw ConfigError("field 'tau': must be >= 1");

  if (spec.capacities.empty()) throw ConfigError("field 'capacity': empty");
  if (spec.capacities.size() != 1 && static_cast<int>(spec.capacities.size()) != spec.m)
    throw ConfigError("field 'capacity': give one value or one per agent");
  for (int c : spec.capacities) {
    if (c < 1) throw ConfigError("field 'capacity': must be >= 1");
    if (c < spec.n / spec.m)
      throw ConfigError("field 'capacity': must be >= n/m to fit the initial allocation");
  }

  if (spec.kinds.empty()) throw ConfigError("field 'kinds': empty");
  std::set<std::string> kind_seen;
  for (const std::string& kname : spec.kinds) {
    const MatrixKind kind = kind_from_name(kname);  // throws on unknown name
    if (!kind_seen.insert(kname).second) throw ConfigError("field 'kinds': duplicate '" + kname + "'");
    if (kind != MatrixKind::random_k && spec.n != 15)
      throw ConfigError("field 'kinds': '" + kname + "' requires n = 15");
    if (kind == MatrixKind::random_k && (spec.random_k < 1 || spec.random_k > spec.n - 1))
      throw ConfigError("field 'k': random kind requires k in [1, n-1]");
  }

  for (double a : spec.alphas)
    if (a < 0.0 || a > 1.0) throw ConfigError("field 'alphas': values must lie in [0, 1]");
  for (double p : spec.pair_probs)
    if (p < 0.0 || p > 1.0) throw ConfigError("field 'pair_probs': values must lie in [0, 1]");
  if (spec.m < 3) {
    for (double p : spec.pair_probs)
      if (p > 0.0) throw ConfigError("field 'pair_probs': > 0 requires m >= 3 (ring network)");
  }

  if (spec.modes.empty()) throw ConfigError("field 'modes': empty");
  std::set<std::string> mode_seen;
  for (const std::string& mode : spec.modes) {
    mode_from_name(mode);  // throws on unknown name
    if (!mode_seen.insert(mode).second) throw ConfigError("field 'modes': duplicate '" + mode + "'");
  }
}

std::vector<SimConfig> expand_grid(const GridSpec& spec) {
  validate_grid(spec);
  std::vector<int> caps = spec.capacities;
  if (caps.size() == 1) caps.assign(spec.m, caps[0]);

  std::vector<SimConfig> cells;
  int id = 0;
  for (const std::string& kname : spec.kinds) {
    const MatrixKind kind = kind_from_name(kname);
    for (double alpha : spec.alphas) {
      for (double pp : spec.pair_probs) {
        for (const std::string& mname : spec.modes) {
          SimConfig c;
          c.config_id = id++;
          c.n = spec.n;
          c.m = spec.m;
          c.kind = kind;
          c.k = kind == MatrixKind::decomposable2 ? 2
                : kind == MatrixKind::nondecomposable5 ? 5
                                                       : spec.random_k;
          c.alpha = alpha;
          c.pair_prob = pp;
          c.mode = mode_from_name(mname);
          c.tau = c.mode == Mode::emergent ? std::optional<int>(spec.tau) : std::nullopt;
          c.horizon = spec.horizon;
          c.capacities = caps;
          c.master_seed = *spec.seed;
          c.replications = spec.runs;
          c.paired_landscapes = spec.paired_landscapes;
          c.record_beliefs = spec.record_beliefs;
          c.validate();
          cells.push_back(std::move(c));
        }
      }
    }
  }
  return cells;
}

}  // namespace orgsim
