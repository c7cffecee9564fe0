#pragma once

#include <cmath>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "biostate/error.hpp"
#include "biostate/panel.hpp"

namespace biostate {

namespace csv_detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
    s.remove_suffix(1);
  return s;
}

inline std::vector<std::string> split_line(std::string_view line) {
  std::vector<std::string> cells;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= line.size(); ++i) {
    if (i == line.size() || line[i] == ',') {
      cells.emplace_back(trim(line.substr(start, i - start)));
      start = i + 1;
    }
  }
  return cells;
}

/// Content lines of a CSV stream: comment ('#') and blank lines dropped,
/// CR stripped.
inline std::vector<std::string> content_lines(std::istream& in) {
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const std::string_view t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    lines.emplace_back(line);
  }
  return lines;
}

inline BiomarkerDescriptor parse_column_header(std::string_view cell) {
  BiomarkerDescriptor d;
  const auto at = cell.rfind('@');
  if (at == std::string_view::npos) {
    d.name = std::string(cell);
    d.window = Window::Pre;  // window omitted
  } else {
    d.name = std::string(cell.substr(0, at));
    const auto w = parse_window(cell.substr(at + 1));
    require(w.has_value(), Errc::MalformedCsv,
            "unknown acquisition window in column '" + std::string(cell) + "'");
    d.window = *w;
  }
  require(!d.name.empty(), Errc::MalformedCsv, "empty column name in header");
  return d;
}

inline double parse_cell(std::string_view cell, std::size_t row1, std::size_t col1) {
  double v = 0.0;
  require(try_parse_double(cell, v), Errc::MalformedCsv,
          "unparseable number '" + std::string(cell) + "' at row " +
              std::to_string(row1) + ", column " + std::to_string(col1));
  return v;
}

}  // namespace csv_detail

/// Parse a panel CSV with a header-derived schema. Header: `id,NAME@WINDOW,...`
/// (window omitted means Pre). Comment lines starting with '#' are skipped.
inline BiomarkerPanel load_panel(std::istream& in) {
  using namespace csv_detail;
  const auto lines = content_lines(in);
  require(!lines.empty(), Errc::MalformedCsv, "missing header row");
  const auto header = split_line(lines.front());
  require(header.size() >= 2, Errc::EmptyPanel, "header has no data columns");
  require(header.front() == "id", Errc::MalformedCsv,
          "first header cell must be 'id', got '" + header.front() + "'");

  BiomarkerPanel panel;
  for (std::size_t c = 1; c < header.size(); ++c)
    panel.schema.push_back(parse_column_header(header[c]));

  const std::size_t b = panel.schema.size();
  panel.values = Matrix(lines.size() - 1, b);
  for (std::size_t r = 1; r < lines.size(); ++r) {
    const auto cells = split_line(lines[r]);
    require(cells.size() == header.size(), Errc::MalformedCsv,
            "row " + std::to_string(r + 1) + " has " + std::to_string(cells.size()) +
                " cells, expected " + std::to_string(header.size()));
    require(!cells.front().empty(), Errc::MalformedCsv,
            "empty subject id at row " + std::to_string(r + 1));
    panel.subjects.push_back(cells.front());
    for (std::size_t c = 1; c < cells.size(); ++c)
      panel.values(r - 1, c - 1) = parse_cell(cells[c], r + 1, c + 1);
  }
  validate_panel(panel);
  return panel;
}

/// Parse against an explicit schema: header columns must match the expected
/// (name, window) sequence exactly; descriptors (incl. units) come from the
/// caller.
inline BiomarkerPanel load_panel(std::istream& in,
                                 std::span<const BiomarkerDescriptor> schema) {
  BiomarkerPanel panel = load_panel(in);
  require(panel.schema.size() == schema.size(), Errc::ShapeMismatch,
          "file has " + std::to_string(panel.schema.size()) + " columns, schema expects " +
              std::to_string(schema.size()));
  for (std::size_t j = 0; j < schema.size(); ++j)
    require(panel.schema[j].name == schema[j].name &&
                panel.schema[j].window == schema[j].window,
            Errc::ShapeMismatch,
            "column " + std::to_string(j + 1) + " is " + column_label(panel.schema[j]) +
                ", schema expects " + column_label(schema[j]));
  panel.schema.assign(schema.begin(), schema.end());
  return panel;
}

/// Canonical panel serialization; parse(serialize(p)) reproduces p bit for
/// bit. Optional metadata lines are emitted as leading '#' comments.
inline void save_panel(std::ostream& out, const BiomarkerPanel& panel,
                       std::span<const std::string> meta = {}) {
  for (const auto& m : meta) out << "# " << m << "\n";
  out << "id";
  for (const auto& d : panel.schema) out << "," << column_label(d);
  out << "\n";
  for (std::size_t i = 0; i < panel.values.rows; ++i) {
    out << panel.subjects[i];
    for (std::size_t j = 0; j < panel.values.cols; ++j)
      out << "," << format_double(panel.values(i, j));
    out << "\n";
  }
}

inline void save_panel(std::ostream& out, const NormalizedPanel& panel,
                       std::span<const std::string> meta = {}) {
  BiomarkerPanel raw;
  raw.subjects = panel.subjects;
  raw.schema = panel.schema;
  raw.values = panel.z;
  save_panel(out, raw, meta);
}

inline std::string panel_to_csv(const BiomarkerPanel& panel) {
  std::ostringstream out;
  save_panel(out, panel);
  return out.str();
}

/// First '#' line of a stream parsed as whitespace-separated key=value
/// tokens; used to sniff self-describing metadata (e.g. space=z).
inline std::map<std::string, std::string> read_csv_metadata(std::istream& in) {
  std::map<std::string, std::string> meta;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto t = csv_detail::trim(line);
    if (t.empty()) continue;
    if (t.front() != '#') break;
    std::istringstream tokens{std::string(t.substr(1))};
    std::string tok;
    while (tokens >> tok) {
      const auto eq = tok.find('=');
      if (eq != std::string::npos && eq > 0)
        meta.emplace(tok.substr(0, eq), tok.substr(eq + 1));
    }
    break;  // only the first comment line carries metadata
  }
  return meta;
}

}  // namespace biostate
