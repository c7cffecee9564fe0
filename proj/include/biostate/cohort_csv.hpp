#pragma once

#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "biostate/csv.hpp"
#include "biostate/error.hpp"
#include "biostate/gmm.hpp"
#include "biostate/panel.hpp"

namespace biostate {

/// Cohort CSV: the panel schema plus trailing `provenance` and `component`
/// columns.
inline void save_cohort(std::ostream& out, const Cohort& cohort,
                        std::span<const std::string> meta = {}) {
  for (const auto& m : meta) out << "# " << m << "\n";
  out << "id";
  for (const auto& d : cohort.panel.schema) out << "," << column_label(d);
  out << ",provenance,component\n";
  for (std::size_t i = 0; i < cohort.panel.z.rows; ++i) {
    out << cohort.panel.subjects[i];
    for (std::size_t j = 0; j < cohort.panel.z.cols; ++j)
      out << "," << format_double(cohort.panel.z(i, j));
    out << "," << cohort.provenance[i] << "," << cohort.component[i] << "\n";
  }
}

inline Cohort load_cohort(std::istream& in) {
  using namespace csv_detail;
  const auto lines = content_lines(in);
  require(lines.size() >= 2, Errc::MalformedCsv, "cohort file has no data rows");
  const auto header = split_line(lines.front());
  require(header.size() >= 4 && header.front() == "id" &&
              header[header.size() - 2] == "provenance" &&
              header.back() == "component",
          Errc::MalformedCsv,
          "cohort header must be id,<markers...>,provenance,component");

  Cohort cohort;
  BiomarkerPanel raw;
  const std::size_t b = header.size() - 3;
  for (std::size_t c = 1; c <= b; ++c)
    raw.schema.push_back(parse_column_header(header[c]));
  raw.values = Matrix(lines.size() - 1, b);
  for (std::size_t r = 1; r < lines.size(); ++r) {
    const auto cells = split_line(lines[r]);
    require(cells.size() == header.size(), Errc::MalformedCsv,
            "cohort row " + std::to_string(r + 1) + " has wrong cell count");
    raw.subjects.push_back(cells.front());
    for (std::size_t c = 1; c <= b; ++c)
      raw.values(r - 1, c - 1) = parse_cell(cells[c], r + 1, c + 1);
    const std::string& prov = cells[header.size() - 2];
    require(prov == "seed" || prov == "synthetic", Errc::MalformedCsv,
            "bad provenance '" + prov + "' at row " + std::to_string(r + 1));
    cohort.provenance.push_back(prov);
    double comp = 0.0;
    require(try_parse_double(cells.back(), comp) && comp >= 0.0, Errc::MalformedCsv,
            "bad component at row " + std::to_string(r + 1));
    cohort.component.push_back(static_cast<std::size_t>(comp));
  }
  cohort.panel = wrap_zspace(std::move(raw));
  return cohort;
}

/// 2-D PCA scores with cluster and provenance annotations.
inline void save_scores(std::ostream& out, std::span<const std::string> subjects,
                        const Matrix& scores, std::span<const std::size_t> clusters,
                        std::span<const std::string> provenance,
                        std::span<const std::string> meta = {}) {
  require(scores.cols >= 2, Errc::ShapeMismatch, "score export needs >= 2 columns");
  require(subjects.size() == scores.rows && clusters.size() == scores.rows &&
              provenance.size() == scores.rows,
          Errc::ShapeMismatch, "score export inputs disagree");
  for (const auto& m : meta) out << "# " << m << "\n";
  out << "id,pc1,pc2,cluster,provenance\n";
  for (std::size_t i = 0; i < scores.rows; ++i)
    out << subjects[i] << "," << format_double(scores(i, 0)) << ","
        << format_double(scores(i, 1)) << "," << clusters[i] << "," << provenance[i]
        << "\n";
}

}  // namespace biostate
