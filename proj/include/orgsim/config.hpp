#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "orgsim/engine.hpp"

namespace orgsim {

// Parsed grid configuration file: dimension lists plus fixed parameters.
// Numeric lists accept comma values ("0.25, 0.5") or ranges
// ("start:step:stop", inclusive).
struct GridSpec {
  std::optional<std::uint64_t> seed;  // required; never defaulted
  int runs = 800;
  int n = 15;
  int m = 5;
  int horizon = 150;
  std::vector<int> capacities;  // scalar replicated when one value given
  int tau = 25;                 // applies to emergent cells
  int random_k = 0;             // k for `random` kind cells
  bool paired_landscapes = true;
  bool record_beliefs = false;

  std::vector<std::string> kinds{"decomposable2", "nondecomposable5"};
  std::vector<double> alphas{0.25, 0.5, 0.75};
  std::vector<double> pair_probs;  // default 0:0.05:0.5
  std::vector<std::string> modes{"top_down", "emergent"};

  GridSpec();
};

GridSpec parse_grid_file(const std::string& path);
GridSpec parse_grid_text(const std::string& text, const std::string& origin);

// Full domain validation (Table-style bounds, divisibility, capacity fit,
// mandatory seed). Throws ConfigError naming the offending field.
void validate_grid(const GridSpec& spec);

// Enumerates cells kind-major, then alpha, pair_prob, mode; assigns
// config ids in that order.
std::vector<SimConfig> expand_grid(const GridSpec& spec);

}  // namespace orgsim
