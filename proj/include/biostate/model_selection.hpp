#pragma once

#include <algorithm>
#include <cstdint>
#include <utility>
#include <vector>

#include "biostate/ari.hpp"
#include "biostate/cluster_model.hpp"
#include "biostate/error.hpp"
#include "biostate/kmeans.hpp"
#include "biostate/linkage.hpp"
#include "biostate/panel.hpp"

namespace biostate {

/// Silhouette per k over [k_min, k_max], ranked descending; ties prefer the
/// smaller k. KMeans runs use the given seed; Ward reuses one linkage.
inline std::vector<std::pair<std::size_t, double>> select_k(
    const NormalizedPanel& panel, std::size_t k_min, std::size_t k_max,
    ClusterMethod method, std::uint64_t seed = 0) {
  require(k_min >= 2 && k_min <= k_max && k_max <= panel.subject_count(),
          Errc::KOutOfRange, "k range outside [2, n]");
  std::vector<std::pair<std::size_t, double>> scores;
  LinkageTree tree;
  if (method == ClusterMethod::Ward) tree = ward_linkage(panel);
  for (std::size_t k = k_min; k <= k_max; ++k) {
    const ClusterModel model = method == ClusterMethod::Ward
                                   ? cut_tree(tree, k, panel)
                                   : kmeans(panel, k, seed);
    scores.emplace_back(k, model.silhouette);
  }
  std::stable_sort(scores.begin(), scores.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  return scores;
}

/// Multi-seed stability of a clustering configuration.
struct StabilityReport {
  std::size_t runs = 10;
  double mean_ari = 1.0;  // mean pairwise ARI across runs
  std::vector<double> per_run_silhouette;
};

/// KMeans runs with seeds 0..runs-1 and reports the mean pairwise ARI. Ward
/// is deterministic; it is still executed per run so the ARI certifies that.
inline StabilityReport stability(const NormalizedPanel& panel, std::size_t k,
                                 ClusterMethod method, std::size_t runs = 10) {
  require(runs >= 2, Errc::BadArgument, "stability needs at least 2 runs");
  StabilityReport report;
  report.runs = runs;
  std::vector<std::vector<std::size_t>> labelings;
  labelings.reserve(runs);
  for (std::size_t r = 0; r < runs; ++r) {
    // Ward relinks from scratch each run; the ARI of 1 is then an executed
    // determinism check rather than an assumption.
    const ClusterModel model = method == ClusterMethod::Ward
                                   ? cut_tree(ward_linkage(panel), k, panel)
                                   : kmeans(panel, k, static_cast<std::uint64_t>(r));
    labelings.push_back(model.assignments);
    report.per_run_silhouette.push_back(model.silhouette);
  }
  double total = 0.0;
  std::size_t pairs = 0;
  for (std::size_t i = 0; i < runs; ++i)
    for (std::size_t j = i + 1; j < runs; ++j) {
      total += adjusted_rand_index(labelings[i], labelings[j]);
      ++pairs;
    }
  report.mean_ari = total / static_cast<double>(pairs);
  return report;
}

}  // namespace biostate
