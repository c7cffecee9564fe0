#pragma once

#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "biostate/error.hpp"
#include "biostate/numeric.hpp"
#include "biostate/panel.hpp"

namespace biostate {

inline double euclidean_distance(std::span<const double> x, std::span<const double> y) {
  require(x.size() == y.size(), Errc::ShapeMismatch,
          "vectors of length " + std::to_string(x.size()) + " and " +
              std::to_string(y.size()));
  return std::sqrt(squared_distance(x, y));
}

/// Outcome of multivariate safety screening against the global centroid.
/// flagged and retained partition the subject list; flagged subjects sit
/// strictly beyond the threshold.
struct ScreeningReport {
  double threshold = 25.0;
  std::vector<std::string> subjects;  // panel order
  std::vector<double> distances;      // parallel to subjects
  std::vector<std::string> flagged;
  std::vector<std::string> retained;
};

/// Distance of every subject from the column-mean centroid of z; the centroid
/// includes eventual outliers.
inline ScreeningReport screen(const NormalizedPanel& panel, double threshold) {
  require(threshold > 0.0, Errc::BadArgument, "screening threshold must be positive");
  ScreeningReport report;
  report.threshold = threshold;
  report.subjects = panel.subjects;
  const std::vector<double> centroid = column_means(panel.z);
  report.distances.resize(panel.subject_count());
  for (std::size_t i = 0; i < panel.subject_count(); ++i) {
    report.distances[i] = euclidean_distance(panel.z.row(i), centroid);
    if (report.distances[i] > threshold)
      report.flagged.push_back(panel.subjects[i]);
    else
      report.retained.push_back(panel.subjects[i]);
  }
  return report;
}

/// Panel restricted to retained subjects, order preserved. Normalization
/// params are carried unchanged; z values are not refit.
inline NormalizedPanel exclude(const NormalizedPanel& panel, const ScreeningReport& report) {
  require(report.subjects == panel.subjects, Errc::StaleReport,
          "screening report subjects disagree with panel");
  std::vector<std::size_t> keep;
  keep.reserve(report.retained.size());
  std::size_t next = 0;
  for (std::size_t i = 0; i < panel.subjects.size(); ++i) {
    if (next < report.retained.size() && report.retained[next] == panel.subjects[i]) {
      keep.push_back(i);
      ++next;
    }
  }
  require(next == report.retained.size(), Errc::StaleReport,
          "retained list is not a subsequence of panel subjects");
  return select_subjects(panel, keep);
}

}  // namespace biostate
