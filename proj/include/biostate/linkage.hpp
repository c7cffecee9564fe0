#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "biostate/cluster_model.hpp"
#include "biostate/error.hpp"
#include "biostate/matrix.hpp"
#include "biostate/numeric.hpp"
#include "biostate/panel.hpp"

namespace biostate {

/// One agglomerative merge. Node ids follow the usual dendrogram numbering:
/// leaves are 0..n-1, the merge at step t creates node n+t. left < right.
struct Merge {
  std::size_t left = 0;
  std::size_t right = 0;
  double height = 0.0;
  std::size_t size = 0;  // leaves under the new node

  bool operator==(const Merge&) const = default;
};

/// Full agglomerative merge history (n-1 merges over n leaves).
struct LinkageTree {
  std::size_t leaf_count = 0;
  std::vector<Merge> merges;
};

/// Ward agglomeration via the Lance-Williams recurrence on squared Euclidean
/// distances. The maintained quantity for clusters A, B is
///   d2(A,B) = 2 * |A||B|/(|A|+|B|) * ||centroid_A - centroid_B||^2,
/// which for singletons is the plain squared Euclidean distance; recorded
/// merge heights are sqrt(d2), the convention of standard dendrogram tooling.
/// Cost ties break lexicographically on (smaller node id, larger node id).
inline LinkageTree ward_linkage(const Matrix& z) {
  const std::size_t n = z.rows;
  require(n >= 2, Errc::EmptyPanel, "ward_linkage needs at least 2 rows");

  // Slot i holds an active cluster; merged clusters reuse the left slot.
  std::vector<std::size_t> node_id(n), size(n, 1);
  std::vector<bool> alive(n, true);
  for (std::size_t i = 0; i < n; ++i) node_id[i] = i;

  std::vector<double> d2(n * n, 0.0);
  auto at = [&](std::size_t a, std::size_t b) -> double& { return d2[a * n + b]; };
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      at(i, j) = at(j, i) = squared_distance(z.row(i), z.row(j));

  LinkageTree tree;
  tree.leaf_count = n;
  tree.merges.reserve(n - 1);

  // TODO: switch the pair search to nearest-neighbor chains if panels outgrow
  // a few thousand rows; the full scan is O(n^3) overall.
  for (std::size_t step = 0; step + 1 < n; ++step) {
    std::size_t best_a = 0, best_b = 0;
    double best = std::numeric_limits<double>::infinity();
    std::size_t best_lo = 0, best_hi = 0;
    for (std::size_t a = 0; a < n; ++a) {
      if (!alive[a]) continue;
      for (std::size_t b = a + 1; b < n; ++b) {
        if (!alive[b]) continue;
        const double cost = at(a, b);
        const std::size_t lo = std::min(node_id[a], node_id[b]);
        const std::size_t hi = std::max(node_id[a], node_id[b]);
        if (cost < best ||
            (cost == best && (lo < best_lo || (lo == best_lo && hi < best_hi)))) {
          best = cost;
          best_a = a;
          best_b = b;
          best_lo = lo;
          best_hi = hi;
        }
      }
    }

    const std::size_t sa = size[best_a], sb = size[best_b];
    tree.merges.push_back(Merge{best_lo, best_hi,
                                std::sqrt(std::max(best, 0.0)), sa + sb});

    for (std::size_t c = 0; c < n; ++c) {
      if (!alive[c] || c == best_a || c == best_b) continue;
      const double sc = static_cast<double>(size[c]);
      const double updated =
          ((static_cast<double>(sa) + sc) * at(best_a, c) +
           (static_cast<double>(sb) + sc) * at(best_b, c) - sc * best) /
          static_cast<double>(sa + sb + size[c]);
      at(best_a, c) = at(c, best_a) = updated;
    }
    node_id[best_a] = n + step;
    size[best_a] = sa + sb;
    alive[best_b] = false;
  }
  return tree;
}

inline LinkageTree ward_linkage(const NormalizedPanel& panel) {
  return ward_linkage(panel.z);
}

/// Flat labels from undoing the last k-1 merges. Clusters are numbered by
/// their smallest leaf index, ascending.
inline std::vector<std::size_t> cut_assignments(const LinkageTree& tree, std::size_t k) {
  const std::size_t n = tree.leaf_count;
  require(k >= 2 && k <= n, Errc::KOutOfRange,
          "k=" + std::to_string(k) + " outside [2, " + std::to_string(n) + "]");
  // parent chain over dendrogram node ids, applied for the first n-k merges
  std::vector<std::size_t> parent(2 * n - 1);
  for (std::size_t i = 0; i < parent.size(); ++i) parent[i] = i;
  for (std::size_t t = 0; t + k < n; ++t) {
    parent[tree.merges[t].left] = n + t;
    parent[tree.merges[t].right] = n + t;
  }
  auto find_root = [&](std::size_t v) {
    while (parent[v] != v) v = parent[v];
    return v;
  };
  std::map<std::size_t, std::size_t> label_of_root;
  std::vector<std::size_t> labels(n);
  for (std::size_t leaf = 0; leaf < n; ++leaf) {
    const std::size_t root = find_root(leaf);
    auto [it, inserted] = label_of_root.emplace(root, label_of_root.size());
    labels[leaf] = it->second;
  }
  require(label_of_root.size() == k, Errc::KOutOfRange, "cut did not produce k clusters");
  return labels;
}

inline ClusterModel cut_tree(const LinkageTree& tree, std::size_t k,
                             const NormalizedPanel& panel) {
  require(tree.leaf_count == panel.subject_count(), Errc::StaleModel,
          "linkage tree does not match panel");
  return model_from_assignments(panel, cut_assignments(tree, k), ClusterMethod::Ward);
}

/// 4-column merge-list text: left right height size, one merge per line.
inline void save_linkage(std::ostream& out, const LinkageTree& tree,
                         std::span<const std::string> meta = {}) {
  for (const auto& m : meta) out << "# " << m << "\n";
  for (const auto& m : tree.merges)
    out << m.left << " " << m.right << " " << format_double(m.height) << " "
        << m.size << "\n";
}

}  // namespace biostate
