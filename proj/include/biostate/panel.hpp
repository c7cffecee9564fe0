#pragma once

#include <cmath>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "biostate/error.hpp"
#include "biostate/matrix.hpp"
#include "biostate/numeric.hpp"

namespace biostate {

/// Blood-sampling window of a biomarker measurement.
enum class Window { Pre, Post, Rec24h };

inline const char* window_token(Window w) {
  switch (w) {
    case Window::Pre: return "Pre";
    case Window::Post: return "Post";
    case Window::Rec24h: return "Rec24h";
  }
  return "Pre";
}

inline std::optional<Window> parse_window(std::string_view token) {
  if (token == "Pre") return Window::Pre;
  if (token == "Post") return Window::Post;
  if (token == "Rec24h") return Window::Rec24h;
  return std::nullopt;
}

/// One measured quantity: marker name, free-text unit, acquisition window.
/// (name, window) identifies a column within a panel schema.
struct BiomarkerDescriptor {
  std::string name;
  std::string unit;
  Window window = Window::Pre;

  bool operator==(const BiomarkerDescriptor&) const = default;
};

/// Canonical column label, e.g. "CK@Post".
inline std::string column_label(const BiomarkerDescriptor& d) {
  return d.name + "@" + window_token(d.window);
}

/// Rectangular athletes x measurements table in native units.
struct BiomarkerPanel {
  std::vector<std::string> subjects;        // length n, unique
  std::vector<BiomarkerDescriptor> schema;  // length b
  Matrix values;                            // n x b, all finite

  std::size_t subject_count() const { return subjects.size(); }
  std::size_t column_count() const { return schema.size(); }
};

inline void validate_panel(const BiomarkerPanel& p) {
  require(p.subjects.size() == p.values.rows && p.schema.size() == p.values.cols,
          Errc::ShapeMismatch, "panel dimensions disagree with matrix");
  require(p.subjects.size() >= 2, Errc::EmptyPanel,
          "panel needs at least 2 subjects, got " + std::to_string(p.subjects.size()));
  require(!p.schema.empty(), Errc::EmptyPanel, "panel needs at least 1 column");
  {
    std::set<std::string> ids(p.subjects.begin(), p.subjects.end());
    require(ids.size() == p.subjects.size(), Errc::DuplicateSubject,
            "subject identifiers are not unique");
  }
  {
    std::set<std::pair<std::string, int>> cols;
    for (const auto& d : p.schema)
      require(cols.emplace(d.name, static_cast<int>(d.window)).second,
              Errc::DuplicateColumn, "duplicate column " + column_label(d));
  }
  for (std::size_t i = 0; i < p.values.rows; ++i)
    for (std::size_t j = 0; j < p.values.cols; ++j)
      require(std::isfinite(p.values(i, j)), Errc::NonFiniteValue,
              "non-finite value at subject '" + p.subjects[i] + "' (row " +
                  std::to_string(i + 1) + "), column " + column_label(p.schema[j]));
}

/// Per-column centering/scaling parameters in native units.
struct NormalizationParams {
  std::vector<double> means;
  std::vector<double> stds;  // strictly positive

  bool operator==(const NormalizationParams&) const = default;
};

/// Z-scored panel together with the parameters that produced it, so new
/// observations can be projected into the same space.
struct NormalizedPanel {
  std::vector<std::string> subjects;
  std::vector<BiomarkerDescriptor> schema;
  Matrix z;
  NormalizationParams params;

  std::size_t subject_count() const { return subjects.size(); }
  std::size_t column_count() const { return schema.size(); }
};

/// Column means and population standard deviations (divisor n).
inline NormalizationParams fit_normalization(const BiomarkerPanel& panel) {
  validate_panel(panel);
  const std::size_t n = panel.values.rows;
  const std::size_t b = panel.values.cols;
  NormalizationParams params;
  params.means.resize(b);
  params.stds.resize(b);
  std::vector<double> col(n);
  for (std::size_t j = 0; j < b; ++j) {
    for (std::size_t i = 0; i < n; ++i) col[i] = panel.values(i, j);
    const double mu = vec_mean(col);
    const double sigma = std::sqrt(vec_population_variance(col, mu));
    require(sigma > 0.0, Errc::ZeroVariance,
            "column " + column_label(panel.schema[j]) + " has zero variance");
    params.means[j] = mu;
    params.stds[j] = sigma;
  }
  return params;
}

inline NormalizedPanel apply_normalization(const BiomarkerPanel& panel,
                                           const NormalizationParams& params) {
  require(params.means.size() == panel.column_count() &&
              params.stds.size() == panel.column_count(),
          Errc::ShapeMismatch, "normalization params do not match panel width");
  for (double s : params.stds)
    require(s > 0.0, Errc::ZeroVariance, "normalization std must be positive");
  NormalizedPanel out;
  out.subjects = panel.subjects;
  out.schema = panel.schema;
  out.params = params;
  out.z = Matrix(panel.values.rows, panel.values.cols);
  for (std::size_t i = 0; i < panel.values.rows; ++i)
    for (std::size_t j = 0; j < panel.values.cols; ++j)
      out.z(i, j) = (panel.values(i, j) - params.means[j]) / params.stds[j];
  return out;
}

/// Inverse transform: x = z * sigma + mu.
inline BiomarkerPanel denormalize(const NormalizedPanel& panel) {
  BiomarkerPanel out;
  out.subjects = panel.subjects;
  out.schema = panel.schema;
  out.values = Matrix(panel.z.rows, panel.z.cols);
  for (std::size_t i = 0; i < panel.z.rows; ++i)
    for (std::size_t j = 0; j < panel.z.cols; ++j)
      out.values(i, j) = panel.z(i, j) * panel.params.stds[j] + panel.params.means[j];
  return out;
}

/// Identity parameters for data that is already in z-space.
inline NormalizedPanel wrap_zspace(BiomarkerPanel panel) {
  validate_panel(panel);
  NormalizedPanel out;
  out.subjects = std::move(panel.subjects);
  out.schema = std::move(panel.schema);
  out.z = std::move(panel.values);
  out.params.means.assign(out.z.cols, 0.0);
  out.params.stds.assign(out.z.cols, 1.0);
  return out;
}

/// Row-subset of a normalized panel, order preserved; params carried along.
inline NormalizedPanel select_subjects(const NormalizedPanel& panel,
                                       std::span<const std::size_t> rows) {
  NormalizedPanel out;
  out.schema = panel.schema;
  out.params = panel.params;
  out.subjects.reserve(rows.size());
  for (std::size_t r : rows) {
    require(r < panel.subjects.size(), Errc::ShapeMismatch, "subject index out of range");
    out.subjects.push_back(panel.subjects[r]);
  }
  out.z = panel.z.select_rows(rows);
  return out;
}

}  // namespace biostate
