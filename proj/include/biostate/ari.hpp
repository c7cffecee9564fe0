#pragma once

#include <cmath>
#include <map>
#include <span>
#include <utility>
#include <vector>

#include "biostate/error.hpp"

namespace biostate {

/// Adjusted Rand Index between two labelings of the same items. Permutation
/// invariant, bounded by 1; 0 is chance-level agreement. The degenerate case
/// (both labelings trivial, zero adjustment denominator) is defined as 1.
inline double adjusted_rand_index(std::span<const std::size_t> a,
                                  std::span<const std::size_t> b) {
  require(a.size() == b.size(), Errc::ShapeMismatch,
          "labelings of different length");
  require(!a.empty(), Errc::BadArgument, "empty labelings");
  const double n = static_cast<double>(a.size());
  std::map<std::pair<std::size_t, std::size_t>, double> cells;
  std::map<std::size_t, double> rows, cols;
  for (std::size_t i = 0; i < a.size(); ++i) {
    cells[{a[i], b[i]}] += 1.0;
    rows[a[i]] += 1.0;
    cols[b[i]] += 1.0;
  }
  auto comb2 = [](double x) { return x * (x - 1.0) / 2.0; };
  double sum_cells = 0.0, sum_rows = 0.0, sum_cols = 0.0;
  for (const auto& [key, c] : cells) sum_cells += comb2(c);
  for (const auto& [key, c] : rows) sum_rows += comb2(c);
  for (const auto& [key, c] : cols) sum_cols += comb2(c);
  const double expected = sum_rows * sum_cols / comb2(n);
  const double max_index = 0.5 * (sum_rows + sum_cols);
  const double denom = max_index - expected;
  if (std::abs(denom) < 1e-12) return 1.0;
  return (sum_cells - expected) / denom;
}

}  // namespace biostate
