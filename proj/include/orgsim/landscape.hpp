#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "orgsim/rng.hpp"

namespace orgsim {

// One binary decision per entry, values 0/1, index = decision index.
using DecisionVector = std::vector<std::uint8_t>;

enum class MatrixKind { decomposable2, nondecomposable5, random_k };

const char* kind_name(MatrixKind kind);
MatrixKind kind_from_name(const std::string& name);

// N x N boolean dependency structure. depends(n, j) == true means the
// contribution of decision n is affected by decision j. The diagonal is
// always set and every row has exactly k + 1 true entries.
//
// Stylized kinds (both require n = 15):
//   decomposable2     k=2, five all-true 3x3 diagonal blocks
//   nondecomposable5  k=5, each row depends on its own 3-block plus the
//                     three decisions of the cyclically next block
struct InfluenceMatrix {
  int n = 0;
  int k = 0;
  MatrixKind kind = MatrixKind::random_k;
  std::vector<std::uint8_t> cells;         // row-major n*n
  std::vector<std::vector<int>> row_deps;  // off-diagonal deps per row, ascending

  bool depends(int row, int col) const {
    return cells[static_cast<std::size_t>(row) * n + col] != 0;
  }
};

InfluenceMatrix build_influence_matrix(MatrixKind kind, int n_decisions, int k,
                                       RandomStream& rng);

// Contribution tables and the cached global optimum. The table for
// decision n holds 2^(k_n + 1) values in [0, 1]; a cell is addressed with
// the decision's own bit as the most significant index bit followed by
// its dependency bits in ascending decision order.
struct Landscape {
  InfluenceMatrix matrix;
  std::vector<std::vector<double>> tables;
  DecisionVector optimum_vector;
  double optimum_value = 0.0;
  std::uint64_t seed = 0;  // key of the stream the tables were drawn from
};

// Fills tables with i.i.d. U(0,1) draws (row-major, index-ascending) and
// caches the exhaustive optimum.
Landscape generate_landscape(const InfluenceMatrix& matrix, RandomStream& rng);

// Assembles a landscape around externally supplied tables (tests, file
// import). Table sizes must match the matrix rows.
Landscape make_landscape(const InfluenceMatrix& matrix,
                         std::vector<std::vector<double>> tables,
                         std::uint64_t seed = 0);

double contribution(const Landscape& ls, int n, const DecisionVector& d);

// Mean contribution over all decisions (left-to-right summation).
double performance(const Landscape& ls, const DecisionVector& d);

// Mean contribution over `subset`, evaluated in the context of the full
// vector d. Throws DomainError on an empty subset.
double partial_performance(const Landscape& ls, std::span<const int> subset,
                           const DecisionVector& d);

// Enumerates all 2^N vectors (N <= 25). Ties break toward the lowest
// binary value, where decision i contributes d_i * 2^i.
std::pair<DecisionVector, double> exhaustive_optimum(const Landscape& ls);

// Text serialization: header (kind, seed, n, k), matrix rows as 0/1
// strings, one table per line with 17-significant-digit reals. Round
// trips bit-exactly.
void save_landscape(const Landscape& ls, std::ostream& out);
Landscape load_landscape(std::istream& in);
void save_landscape_file(const Landscape& ls, const std::string& path);
Landscape load_landscape_file(const std::string& path);

}  // namespace orgsim
