#include "orgsim/landscape.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>

#include "orgsim/errors.hpp"

namespace orgsim {

const char* kind_name(MatrixKind kind) {
  switch (kind) {
    case MatrixKind::decomposable2: return "decomposable2";
    case MatrixKind::nondecomposable5: return "nondecomposable5";
    case MatrixKind::random_k: return "random";
  }
  throw InternalError("kind_name: unknown kind");
}

MatrixKind kind_from_name(const std::string& name) {
  if (name == "decomposable2") return MatrixKind::decomposable2;
  if (name == "nondecomposable5") return MatrixKind::nondecomposable5;
  if (name == "random") return MatrixKind::random_k;
  throw ConfigError("unknown matrix kind '" + name + "'");
}

namespace {

constexpr int kBlock = 3;  // block size of the stylized 15-decision structures

void fill_row_deps(InfluenceMatrix& m) {
  m.row_deps.assign(m.n, {});
  for (int r = 0; r < m.n; ++r) {
    for (int c = 0; c < m.n; ++c) {
      if (c != r && m.depends(r, c)) m.row_deps[r].push_back(c);
    }
  }
}

void check_uniform_degree(const InfluenceMatrix& m) {
  for (int r = 0; r < m.n; ++r) {
    if (!m.depends(r, r)) throw InternalError("influence matrix: diagonal not set");
    if (static_cast<int>(m.row_deps[r].size()) != m.k)
      throw InternalError("influence matrix: row degree != k");
  }
}

}  // namespace

InfluenceMatrix build_influence_matrix(MatrixKind kind, int n_decisions, int k,
                                       RandomStream& rng) {
  if (n_decisions < 1) throw ConfigError("build_influence_matrix: n_decisions must be >= 1");
  if (k < 0 || k > n_decisions - 1)
    throw ConfigError("build_influence_matrix: k must lie in [0, n_decisions-1]");

  InfluenceMatrix m;
  m.n = n_decisions;
  m.k = k;
  m.kind = kind;
  m.cells.assign(static_cast<std::size_t>(n_decisions) * n_decisions, 0);
  auto set = [&](int r, int c) { m.cells[static_cast<std::size_t>(r) * m.n + c] = 1; };

  switch (kind) {
    case MatrixKind::decomposable2: {
      if (n_decisions != 15 || k != 2)
        throw ConfigError("decomposable2 requires n_decisions=15, k=2");
      for (int r = 0; r < m.n; ++r)
        for (int c = 0; c < m.n; ++c)
          if (r / kBlock == c / kBlock) set(r, c);
      break;
    }
    case MatrixKind::nondecomposable5: {
      if (n_decisions != 15 || k != 5)
        throw ConfigError("nondecomposable5 requires n_decisions=15, k=5");
      const int blocks = m.n / kBlock;
      for (int r = 0; r < m.n; ++r) {
        const int b = r / kBlock;
        const int nb = (b + 1) % blocks;
        for (int c = 0; c < m.n; ++c)
          if (c / kBlock == b || c / kBlock == nb) set(r, c);
      }
      break;
    }
    case MatrixKind::random_k: {
      // k distinct off-diagonal dependencies per row, uniform.
      std::vector<int> candidates(n_decisions - 1);
      for (int r = 0; r < m.n; ++r) {
        set(r, r);
        int idx = 0;
        for (int c = 0; c < m.n; ++c)
          if (c != r) candidates[idx++] = c;
        for (int i = 0; i < k; ++i) {
          const int j = i + static_cast<int>(rng.next_below(
                                static_cast<std::uint32_t>(n_decisions - 1 - i)));
          std::swap(candidates[i], candidates[j]);
          set(r, candidates[i]);
        }
      }
      break;
    }
  }

  fill_row_deps(m);
  check_uniform_degree(m);
  return m;
}

namespace {

std::size_t table_index(const InfluenceMatrix& m, int n, const DecisionVector& d) {
  std::size_t idx = d[n];
  for (int j : m.row_deps[n]) idx = (idx << 1) | d[j];
  return idx;
}

// Shared by generate_landscape and the public exhaustive_optimum.
std::pair<DecisionVector, double> enumerate_optimum(
    const InfluenceMatrix& m, const std::vector<std::vector<double>>& tables) {
  if (m.n > 25) throw ConfigError("exhaustive_optimum: n_decisions must be <= 25");
  const std::uint32_t count = 1u << m.n;
  DecisionVector d(m.n);
  DecisionVector best_d;
  double best = -1.0;
  for (std::uint32_t mask = 0; mask < count; ++mask) {
    for (int i = 0; i < m.n; ++i) d[i] = static_cast<std::uint8_t>((mask >> i) & 1u);
    double sum = 0.0;
    for (int n = 0; n < m.n; ++n) sum += tables[n][table_index(m, n, d)];
    const double perf = sum / m.n;
    if (perf > best) {  // strict: first (lowest mask) wins ties
      best = perf;
      best_d = d;
    }
  }
  return {best_d, best};
}

}  // namespace

Landscape generate_landscape(const InfluenceMatrix& matrix, RandomStream& rng) {
  Landscape ls;
  ls.matrix = matrix;
  ls.seed = rng.key();
  ls.tables.resize(matrix.n);
  for (int n = 0; n < matrix.n; ++n) {
    const std::size_t size = std::size_t{1} << (matrix.row_deps[n].size() + 1);
    ls.tables[n].resize(size);
    for (std::size_t i = 0; i < size; ++i) ls.tables[n][i] = rng.next_double();
  }
  auto [v, p] = enumerate_optimum(ls.matrix, ls.tables);
  ls.optimum_vector = std::move(v);
  ls.optimum_value = p;
  return ls;
}

Landscape make_landscape(const InfluenceMatrix& matrix,
                         std::vector<std::vector<double>> tables,
                         std::uint64_t seed) {
  if (static_cast<int>(tables.size()) != matrix.n)
    throw DomainError("make_landscape: one table per decision required");
  for (int n = 0; n < matrix.n; ++n) {
    const std::size_t want = std::size_t{1} << (matrix.row_deps[n].size() + 1);
    if (tables[n].size() != want)
      throw DomainError("make_landscape: table size mismatch for decision " + std::to_string(n));
  }
  Landscape ls;
  ls.matrix = matrix;
  ls.tables = std::move(tables);
  ls.seed = seed;
  auto [v, p] = enumerate_optimum(ls.matrix, ls.tables);
  ls.optimum_vector = std::move(v);
  ls.optimum_value = p;
  return ls;
}

double contribution(const Landscape& ls, int n, const DecisionVector& d) {
  if (n < 0 || n >= ls.matrix.n) throw DomainError("contribution: decision index out of range");
  return ls.tables[n][table_index(ls.matrix, n, d)];
}

double performance(const Landscape& ls, const DecisionVector& d) {
  double sum = 0.0;
  for (int n = 0; n < ls.matrix.n; ++n) sum += ls.tables[n][table_index(ls.matrix, n, d)];
  return sum / ls.matrix.n;
}

double partial_performance(const Landscape& ls, std::span<const int> subset,
                           const DecisionVector& d) {
  if (subset.empty()) throw DomainError("partial_performance: empty subset");
  double sum = 0.0;
  for (int n : subset) {
    if (n < 0 || n >= ls.matrix.n)
      throw DomainError("partial_performance: decision index out of range");
    sum += ls.tables[n][table_index(ls.matrix, n, d)];
  }
  return sum / static_cast<double>(subset.size());
}

std::pair<DecisionVector, double> exhaustive_optimum(const Landscape& ls) {
  return enumerate_optimum(ls.matrix, ls.tables);
}

namespace {

std::string fmt17(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace

void save_landscape(const Landscape& ls, std::ostream& out) {
  out << "orgsim-landscape-v1\n";
  out << "kind " << kind_name(ls.matrix.kind) << "\n";
  out << "seed " << ls.seed << "\n";
  out << "n " << ls.matrix.n << "\n";
  out << "k " << ls.matrix.k << "\n";
  out << "matrix\n";
  for (int r = 0; r < ls.matrix.n; ++r) {
    for (int c = 0; c < ls.matrix.n; ++c) out << (ls.matrix.depends(r, c) ? '1' : '0');
    out << "\n";
  }
  out << "tables\n";
  for (int n = 0; n < ls.matrix.n; ++n) {
    out << ls.tables[n].size();
    for (double v : ls.tables[n]) out << ' ' << fmt17(v);
    out << "\n";
  }
  out << "optimum";
  for (int i = 0; i < ls.matrix.n; ++i) out << ' ' << int(ls.optimum_vector[i]);
  out << ' ' << fmt17(ls.optimum_value) << "\n";
  out << "end\n";
}

namespace {

std::string expect_line(std::istream& in, const char* what) {
  std::string line;
  if (!std::getline(in, line)) throw ConfigError(std::string("landscape file: missing ") + what);
  return line;
}

std::string expect_field(std::istream& in, const std::string& key) {
  std::string line = expect_line(in, key.c_str());
  std::istringstream ss(line);
  std::string k, v;
  ss >> k >> v;
  if (k != key) throw ConfigError("landscape file: expected '" + key + "', got '" + k + "'");
  return v;
}

}  // namespace

Landscape load_landscape(std::istream& in) {
  if (expect_line(in, "magic") != "orgsim-landscape-v1")
    throw ConfigError("landscape file: bad magic line");
  const MatrixKind kind = kind_from_name(expect_field(in, "kind"));
  const std::uint64_t seed = std::stoull(expect_field(in, "seed"));
  const int n = std::stoi(expect_field(in, "n"));
  const int k = std::stoi(expect_field(in, "k"));
  if (n < 1 || k < 0 || k > n - 1) throw ConfigError("landscape file: bad n/k header");

  if (expect_line(in, "matrix") != "matrix") throw ConfigError("landscape file: expected 'matrix'");
  InfluenceMatrix m;
  m.n = n;
  m.k = k;
  m.kind = kind;
  m.cells.assign(static_cast<std::size_t>(n) * n, 0);
  for (int r = 0; r < n; ++r) {
    const std::string row = expect_line(in, "matrix row");
    if (static_cast<int>(row.size()) != n) throw ConfigError("landscape file: matrix row length mismatch");
    for (int c = 0; c < n; ++c) {
      if (row[c] != '0' && row[c] != '1') throw ConfigError("landscape file: matrix entries must be 0/1");
      m.cells[static_cast<std::size_t>(r) * n + c] = static_cast<std::uint8_t>(row[c] - '0');
    }
    if (!m.depends(r, r)) throw ConfigError("landscape file: diagonal entry not set");
  }
  fill_row_deps(m);
  for (int r = 0; r < n; ++r)
    if (static_cast<int>(m.row_deps[r].size()) != k)
      throw ConfigError("landscape file: matrix row degree != k");

  if (expect_line(in, "tables") != "tables") throw ConfigError("landscape file: expected 'tables'");
  std::vector<std::vector<double>> tables(n);
  for (int r = 0; r < n; ++r) {
    std::istringstream ss(expect_line(in, "table row"));
    std::size_t size = 0;
    if (!(ss >> size)) throw ConfigError("landscape file: bad table row");
    tables[r].resize(size);
    for (std::size_t i = 0; i < size; ++i) {
      if (!(ss >> tables[r][i])) throw ConfigError("landscape file: short table row");
      if (tables[r][i] < 0.0 || tables[r][i] > 1.0)
        throw ConfigError("landscape file: table value outside [0,1]");
    }
  }

  std::istringstream opt(expect_line(in, "optimum"));
  std::string tag;
  opt >> tag;
  if (tag != "optimum") throw ConfigError("landscape file: expected 'optimum'");
  DecisionVector stored(n);
  for (int i = 0; i < n; ++i) {
    int b = 0;
    if (!(opt >> b) || (b != 0 && b != 1)) throw ConfigError("landscape file: bad optimum bits");
    stored[i] = static_cast<std::uint8_t>(b);
  }
  double stored_value = 0.0;
  if (!(opt >> stored_value)) throw ConfigError("landscape file: bad optimum value");

  Landscape ls = make_landscape(m, std::move(tables), seed);
  if (ls.optimum_vector != stored || ls.optimum_value != stored_value)
    throw ConfigError("landscape file: stored optimum does not match tables");
  if (expect_line(in, "end") != "end") throw ConfigError("landscape file: expected 'end'");
  return ls;
}

void save_landscape_file(const Landscape& ls, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot open '" + path + "' for writing");
  save_landscape(ls, out);
  if (!out) throw ConfigError("write failed for '" + path + "'");
}

Landscape load_landscape_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open '" + path + "'");
  return load_landscape(in);
}

}  // namespace orgsim
