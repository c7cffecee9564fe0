#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <vector>

#include "biostate/error.hpp"
#include "biostate/matrix.hpp"
#include "biostate/numeric.hpp"
#include "biostate/panel.hpp"

namespace biostate {

/// Mean silhouette over all points, Euclidean distances.
/// s_i = (b_i - a_i) / max(a_i, b_i); a_i is the mean distance to the point's
/// own cluster (excluding itself), b_i the smallest mean distance to another
/// cluster. Singletons contribute 0, as does the degenerate a = b = 0 case.
inline double silhouette_score(const Matrix& z, std::span<const std::size_t> labels) {
  const std::size_t n = z.rows;
  require(labels.size() == n, Errc::ShapeMismatch, "label count disagrees with matrix");
  std::size_t k = 0;
  for (std::size_t l : labels) k = std::max(k, l + 1);
  std::vector<std::size_t> counts(k, 0);
  for (std::size_t l : labels) counts[l]++;
  std::size_t nonempty = 0;
  for (std::size_t c : counts) nonempty += c > 0 ? 1 : 0;
  require(nonempty >= 2, Errc::SingleCluster,
          "silhouette needs at least 2 distinct clusters");

  double total = 0.0;
  std::vector<double> sums(k);
  for (std::size_t i = 0; i < n; ++i) {
    std::fill(sums.begin(), sums.end(), 0.0);
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      sums[labels[j]] += std::sqrt(squared_distance(z.row(i), z.row(j)));
    }
    const std::size_t own = labels[i];
    if (counts[own] <= 1) continue;  // singleton: s_i = 0
    const double a = sums[own] / static_cast<double>(counts[own] - 1);
    double b = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < k; ++c) {
      if (c == own || counts[c] == 0) continue;
      b = std::min(b, sums[c] / static_cast<double>(counts[c]));
    }
    const double denom = std::max(a, b);
    if (denom > 0.0) total += (b - a) / denom;
  }
  return total / static_cast<double>(n);
}

inline double silhouette_score(const NormalizedPanel& panel,
                               std::span<const std::size_t> labels) {
  return silhouette_score(panel.z, labels);
}

}  // namespace biostate
