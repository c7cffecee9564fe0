#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "biostate/cluster_model.hpp"
#include "biostate/error.hpp"
#include "biostate/matrix.hpp"
#include "biostate/numeric.hpp"
#include "biostate/panel.hpp"
#include "biostate/rng.hpp"

namespace biostate {

/// k-means++ seeding: first center uniform, then D^2-weighted picks.
inline std::vector<std::size_t> kmeanspp_indices(const Matrix& z, std::size_t k, Rng& rng) {
  const std::size_t n = z.rows;
  require(k >= 1 && k <= n, Errc::KOutOfRange, "k outside [1, n]");
  std::vector<std::size_t> chosen;
  chosen.reserve(k);
  chosen.push_back(rng.next_index(n));
  std::vector<double> d2(n);
  for (std::size_t i = 0; i < n; ++i)
    d2[i] = squared_distance(z.row(i), z.row(chosen[0]));
  while (chosen.size() < k) {
    const std::size_t pick = rng.next_weighted(d2);
    chosen.push_back(pick);
    for (std::size_t i = 0; i < n; ++i)
      d2[i] = std::min(d2[i], squared_distance(z.row(i), z.row(pick)));
  }
  return chosen;
}

struct KMeansTrace {
  std::vector<double> wcss;  // one entry per Lloyd iteration
  std::size_t iterations = 0;
  bool converged = false;
};

/// Lloyd iterations from a k-means++ start, on a raw matrix. Assignment ties
/// go to the lowest centroid index; an emptied cluster is re-seeded with the
/// point farthest from its current centroid (taken from a cluster of size
/// > 1). Returns the final labels; `trace`, when given, records per-iteration
/// WCSS.
inline std::vector<std::size_t> kmeans_labels(const Matrix& z, std::size_t k,
                                              std::uint64_t seed,
                                              std::size_t max_iter = 300,
                                              double tol = 1e-6,
                                              KMeansTrace* trace = nullptr) {
  const std::size_t n = z.rows;
  const std::size_t b = z.cols;
  require(k >= 2 && k <= n, Errc::KOutOfRange,
          "k=" + std::to_string(k) + " outside [2, " + std::to_string(n) + "]");

  Rng rng(seed);
  Matrix centroids(k, b);
  {
    const auto seeds = kmeanspp_indices(z, k, rng);
    for (std::size_t c = 0; c < k; ++c) {
      auto src = z.row(seeds[c]);
      std::copy(src.begin(), src.end(), centroids.row(c).begin());
    }
  }

  std::vector<std::size_t> labels(n, 0);
  std::vector<std::size_t> counts(k, 0);
  bool converged = false;
  std::size_t iter = 0;
  for (; iter < max_iter; ++iter) {
    // assignment
    std::fill(counts.begin(), counts.end(), 0);
    for (std::size_t i = 0; i < n; ++i) {
      double best = std::numeric_limits<double>::infinity();
      std::size_t arg = 0;
      for (std::size_t c = 0; c < k; ++c) {
        const double d = squared_distance(z.row(i), centroids.row(c));
        if (d < best) {
          best = d;
          arg = c;
        }
      }
      labels[i] = arg;
      counts[arg]++;
    }
    // empty-cluster repair: donate the globally farthest point
    for (std::size_t c = 0; c < k; ++c) {
      if (counts[c] > 0) continue;
      double worst = -1.0;
      std::size_t pick = n;
      for (std::size_t i = 0; i < n; ++i) {
        if (counts[labels[i]] <= 1) continue;
        const double d = squared_distance(z.row(i), centroids.row(labels[i]));
        if (d > worst) {
          worst = d;
          pick = i;
        }
      }
      require(pick < n, Errc::NumericalFailure, "no donor point for empty cluster");
      counts[labels[pick]]--;
      labels[pick] = c;
      counts[c] = 1;
      auto src = z.row(pick);
      std::copy(src.begin(), src.end(), centroids.row(c).begin());
    }
    // centroid update
    Matrix updated(k, b);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < b; ++j) updated(labels[i], j) += z(i, j);
    double shift = 0.0;
    for (std::size_t c = 0; c < k; ++c) {
      for (std::size_t j = 0; j < b; ++j)
        updated(c, j) /= static_cast<double>(counts[c]);
      shift = std::max(shift, std::sqrt(squared_distance(updated.row(c), centroids.row(c))));
    }
    centroids = std::move(updated);
    if (trace != nullptr) {
      double wcss = 0.0;
      for (std::size_t i = 0; i < n; ++i)
        wcss += squared_distance(z.row(i), centroids.row(labels[i]));
      trace->wcss.push_back(wcss);
    }
    if (shift < tol) {
      converged = true;
      ++iter;
      break;
    }
  }
  if (trace != nullptr) {
    trace->iterations = iter;
    trace->converged = converged;
  }
  return labels;
}

inline ClusterModel kmeans(const NormalizedPanel& panel, std::size_t k,
                           std::uint64_t seed, std::size_t max_iter = 300,
                           double tol = 1e-6, KMeansTrace* trace = nullptr) {
  const auto labels = kmeans_labels(panel.z, k, seed, max_iter, tol, trace);
  return model_from_assignments(panel, labels, ClusterMethod::KMeans, seed,
                                /*relabel=*/false);
}

}  // namespace biostate
