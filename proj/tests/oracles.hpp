// Independent reference implementations used to check the library. These
// deliberately recompute everything from first principles instead of sharing
// code with the implementation under test.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <vector>

#include "biostate/linkage.hpp"
#include "biostate/matrix.hpp"
#include "biostate/panel.hpp"
#include "biostate/rng.hpp"

namespace oracles {

using biostate::LinkageTree;
using biostate::Matrix;
using biostate::Merge;

/// Ward agglomeration by brute force: every step recomputes
/// delta(A,B) = |A||B|/(|A|+|B|) * ||mean_A - mean_B||^2 from the raw rows.
/// Recorded heights are sqrt(2*delta); ties break on (min id, max id).
inline LinkageTree naive_ward(const Matrix& z) {
  const std::size_t n = z.rows;
  struct Cluster {
    std::size_t id;
    std::vector<std::size_t> members;
  };
  std::vector<Cluster> clusters;
  for (std::size_t i = 0; i < n; ++i) clusters.push_back({i, {i}});

  auto centroid = [&](const Cluster& c) {
    std::vector<double> mean(z.cols, 0.0);
    for (std::size_t row : c.members)
      for (std::size_t j = 0; j < z.cols; ++j) mean[j] += z(row, j);
    for (double& v : mean) v /= static_cast<double>(c.members.size());
    return mean;
  };

  LinkageTree tree;
  tree.leaf_count = n;
  for (std::size_t step = 0; step + 1 < n; ++step) {
    double best_cost = std::numeric_limits<double>::infinity();
    std::size_t best_a = 0, best_b = 1;
    std::size_t best_lo = 0, best_hi = 0;
    for (std::size_t a = 0; a < clusters.size(); ++a) {
      for (std::size_t b = a + 1; b < clusters.size(); ++b) {
        const auto ca = centroid(clusters[a]);
        const auto cb = centroid(clusters[b]);
        double d2 = 0.0;
        for (std::size_t j = 0; j < z.cols; ++j) {
          const double d = ca[j] - cb[j];
          d2 += d * d;
        }
        const double na = static_cast<double>(clusters[a].members.size());
        const double nb = static_cast<double>(clusters[b].members.size());
        const double cost = 2.0 * (na * nb / (na + nb)) * d2;
        const std::size_t lo = std::min(clusters[a].id, clusters[b].id);
        const std::size_t hi = std::max(clusters[a].id, clusters[b].id);
        if (cost < best_cost || (cost == best_cost &&
                                 (lo < best_lo || (lo == best_lo && hi < best_hi)))) {
          best_cost = cost;
          best_a = a;
          best_b = b;
          best_lo = lo;
          best_hi = hi;
        }
      }
    }
    Cluster merged;
    merged.id = n + step;
    merged.members = clusters[best_a].members;
    merged.members.insert(merged.members.end(), clusters[best_b].members.begin(),
                          clusters[best_b].members.end());
    tree.merges.push_back(Merge{best_lo, best_hi, std::sqrt(std::max(best_cost, 0.0)),
                                merged.members.size()});
    clusters.erase(clusters.begin() + static_cast<std::ptrdiff_t>(best_b));
    clusters.erase(clusters.begin() + static_cast<std::ptrdiff_t>(best_a));
    clusters.push_back(std::move(merged));
  }
  return tree;
}

/// Per-point silhouette by direct definition.
inline double brute_silhouette(const Matrix& z, const std::vector<std::size_t>& labels) {
  const std::size_t n = z.rows;
  auto dist = [&](std::size_t a, std::size_t b) {
    double s = 0.0;
    for (std::size_t j = 0; j < z.cols; ++j) {
      const double d = z(a, j) - z(b, j);
      s += d * d;
    }
    return std::sqrt(s);
  };
  std::size_t k = 0;
  for (std::size_t l : labels) k = std::max(k, l + 1);
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t own_count = 0;
    for (std::size_t j = 0; j < n; ++j)
      if (j != i && labels[j] == labels[i]) ++own_count;
    if (own_count == 0) continue;  // singleton contributes 0
    double a = 0.0;
    for (std::size_t j = 0; j < n; ++j)
      if (j != i && labels[j] == labels[i]) a += dist(i, j);
    a /= static_cast<double>(own_count);
    double b = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < k; ++c) {
      if (c == labels[i]) continue;
      double sum = 0.0;
      std::size_t count = 0;
      for (std::size_t j = 0; j < n; ++j)
        if (labels[j] == c) {
          sum += dist(i, j);
          ++count;
        }
      if (count > 0) b = std::min(b, sum / static_cast<double>(count));
    }
    if (std::max(a, b) > 0.0) total += (b - a) / std::max(a, b);
  }
  return total / static_cast<double>(n);
}

/// Composite Simpson integration on [lo, hi].
inline double simpson(const std::function<double(double)>& f, double lo, double hi,
                      std::size_t intervals) {
  if (intervals % 2 == 1) ++intervals;
  const double h = (hi - lo) / static_cast<double>(intervals);
  double sum = f(lo) + f(hi);
  for (std::size_t i = 1; i < intervals; ++i)
    sum += f(lo + h * static_cast<double>(i)) * (i % 2 == 1 ? 4.0 : 2.0);
  return sum * h / 3.0;
}

/// Uniform random matrix in [-scale, scale], reproducible.
inline Matrix random_matrix(std::size_t n, std::size_t b, std::uint64_t seed,
                            double scale = 3.0) {
  biostate::Rng rng(seed);
  Matrix m(n, b);
  for (double& v : m.data) v = (2.0 * rng.next_double() - 1.0) * scale;
  return m;
}

/// Wrap a raw z matrix as a panel with generated subject ids.
inline biostate::NormalizedPanel panel_from(const Matrix& z) {
  biostate::BiomarkerPanel raw;
  raw.values = z;
  for (std::size_t j = 0; j < z.cols; ++j)
    raw.schema.push_back({"m" + std::to_string(j + 1), "", biostate::Window::Pre});
  for (std::size_t i = 0; i < z.rows; ++i)
    raw.subjects.push_back("s" + std::to_string(i + 1));
  return biostate::wrap_zspace(std::move(raw));
}

}  // namespace oracles
