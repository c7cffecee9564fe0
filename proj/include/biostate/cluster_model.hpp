#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "biostate/error.hpp"
#include "biostate/matrix.hpp"
#include "biostate/panel.hpp"
#include "biostate/silhouette.hpp"

namespace biostate {

enum class ClusterMethod { Ward, KMeans };

inline const char* method_token(ClusterMethod m) {
  return m == ClusterMethod::Ward ? "ward" : "kmeans";
}

inline std::optional<ClusterMethod> parse_method(std::string_view token) {
  if (token == "ward") return ClusterMethod::Ward;
  if (token == "kmeans") return ClusterMethod::KMeans;
  return std::nullopt;
}

/// A flat clustering at resolution k: labels in 0..k-1 (each nonempty),
/// z-space centroids, mean silhouette.
struct ClusterModel {
  std::size_t k = 0;
  std::vector<std::size_t> assignments;
  Matrix centroids;  // k x b
  double silhouette = 0.0;
  ClusterMethod method = ClusterMethod::Ward;
  std::optional<std::uint64_t> seed;  // KMeans only
};

/// Build a model from raw labels: relabels to 0..k-1 by first appearance,
/// computes centroids, and scores silhouette (0 for a single cluster).
inline ClusterModel model_from_assignments(const NormalizedPanel& panel,
                                           std::span<const std::size_t> labels,
                                           ClusterMethod method,
                                           std::optional<std::uint64_t> seed = std::nullopt,
                                           bool relabel = true) {
  require(labels.size() == panel.subject_count(), Errc::ShapeMismatch,
          "label count disagrees with panel");
  ClusterModel model;
  model.method = method;
  model.seed = seed;
  model.assignments.resize(labels.size());

  std::vector<std::size_t> order;  // old label -> new label, by first appearance
  if (relabel) {
    std::vector<std::ptrdiff_t> remap;
    for (std::size_t i = 0; i < labels.size(); ++i) {
      if (labels[i] >= remap.size()) remap.resize(labels[i] + 1, -1);
      if (remap[labels[i]] < 0) {
        remap[labels[i]] = static_cast<std::ptrdiff_t>(order.size());
        order.push_back(labels[i]);
      }
      model.assignments[i] = static_cast<std::size_t>(remap[labels[i]]);
    }
    model.k = order.size();
  } else {
    std::size_t k = 0;
    for (std::size_t l : labels) k = std::max(k, l + 1);
    model.k = k;
    std::copy(labels.begin(), labels.end(), model.assignments.begin());
  }

  const std::size_t b = panel.column_count();
  model.centroids = Matrix(model.k, b);
  std::vector<std::size_t> counts(model.k, 0);
  for (std::size_t i = 0; i < model.assignments.size(); ++i) {
    const std::size_t c = model.assignments[i];
    counts[c]++;
    for (std::size_t j = 0; j < b; ++j) model.centroids(c, j) += panel.z(i, j);
  }
  for (std::size_t c = 0; c < model.k; ++c) {
    require(counts[c] > 0, Errc::BadArgument,
            "cluster " + std::to_string(c) + " is empty");
    for (std::size_t j = 0; j < b; ++j)
      model.centroids(c, j) /= static_cast<double>(counts[c]);
  }
  model.silhouette =
      model.k >= 2 ? silhouette_score(panel.z, model.assignments) : 0.0;
  return model;
}

inline std::vector<std::size_t> cluster_sizes(const ClusterModel& model) {
  std::vector<std::size_t> counts(model.k, 0);
  for (std::size_t l : model.assignments) counts[l]++;
  return counts;
}

}  // namespace biostate
