#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "biostate/error.hpp"
#include "biostate/linkage.hpp"
#include "biostate/matrix.hpp"
#include "biostate/panel.hpp"

namespace biostate {
namespace svg {

inline std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

inline std::string xml_escape(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

/// Line-oriented SVG assembly; output is byte-stable for identical input.
class Document {
 public:
  Document(double width, double height) : width_(width), height_(height) {}

  void comment(const std::string& text) {
    body_ << "<!-- " << xml_escape(text) << " -->\n";
  }
  void line(double x1, double y1, double x2, double y2, const std::string& stroke,
            double stroke_width = 1.0) {
    body_ << "<line x1=\"" << fmt(x1) << "\" y1=\"" << fmt(y1) << "\" x2=\""
          << fmt(x2) << "\" y2=\"" << fmt(y2) << "\" stroke=\"" << stroke
          << "\" stroke-width=\"" << fmt(stroke_width) << "\"/>\n";
  }
  void rect(double x, double y, double w, double h, const std::string& fill,
            const std::string& stroke = "none") {
    body_ << "<rect x=\"" << fmt(x) << "\" y=\"" << fmt(y) << "\" width=\""
          << fmt(w) << "\" height=\"" << fmt(h) << "\" fill=\"" << fill
          << "\" stroke=\"" << stroke << "\"/>\n";
  }
  void circle(double cx, double cy, double r, const std::string& fill,
              const std::string& stroke = "none") {
    body_ << "<circle cx=\"" << fmt(cx) << "\" cy=\"" << fmt(cy) << "\" r=\""
          << fmt(r) << "\" fill=\"" << fill << "\" stroke=\"" << stroke << "\"/>\n";
  }
  void text(double x, double y, const std::string& content, double size = 10.0,
            const std::string& anchor = "start", const std::string& transform = "") {
    body_ << "<text x=\"" << fmt(x) << "\" y=\"" << fmt(y) << "\" font-size=\""
          << fmt(size) << "\" font-family=\"monospace\" text-anchor=\"" << anchor
          << "\"";
    if (!transform.empty()) body_ << " transform=\"" << transform << "\"";
    body_ << ">" << xml_escape(content) << "</text>\n";
  }

  std::string str() const {
    std::ostringstream out;
    out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
        << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fmt(width_)
        << "\" height=\"" << fmt(height_) << "\" viewBox=\"0 0 " << fmt(width_)
        << " " << fmt(height_) << "\">\n"
        << "<rect x=\"0\" y=\"0\" width=\"" << fmt(width_) << "\" height=\""
        << fmt(height_) << "\" fill=\"white\"/>\n"
        << body_.str() << "</svg>\n";
    return out.str();
  }

 private:
  double width_;
  double height_;
  std::ostringstream body_;
};

inline constexpr std::array<std::string_view, 10> kPalette = {
    "#4e79a7", "#f28e2b", "#e15759", "#76b7b2", "#59a14f",
    "#edc948", "#b07aa1", "#ff9da7", "#9c755f", "#bab0ac"};

inline std::string palette_color(std::size_t index) {
  return std::string(kPalette[index % kPalette.size()]);
}

/// Diverging fill for a z value: white at 0, warm toward +3, cool toward -3,
/// clipped at |z| = 3.
inline std::string diverging_fill(double z) {
  constexpr double warm[3] = {178.0, 24.0, 43.0};
  constexpr double cool[3] = {33.0, 102.0, 172.0};
  const double t = std::clamp(z / 3.0, -1.0, 1.0);
  const double* target = t >= 0.0 ? warm : cool;
  const double a = std::abs(t);
  int rgb[3];
  for (int c = 0; c < 3; ++c)
    rgb[c] = static_cast<int>(std::lround(255.0 + (target[c] - 255.0) * a));
  char buf[32];
  std::snprintf(buf, sizeof(buf), "rgb(%d,%d,%d)", rgb[0], rgb[1], rgb[2]);
  return buf;
}

}  // namespace svg

/// Dendrogram: leaves along the x axis in tree order, merge heights on y.
inline std::string render_dendrogram(const LinkageTree& tree,
                                     std::span<const std::string> leaf_names,
                                     std::span<const std::string> meta = {}) {
  const std::size_t n = tree.leaf_count;
  require(leaf_names.size() == n, Errc::ShapeMismatch,
          "leaf names do not match tree");

  // Leaf order by traversing children left-first from the root.
  std::vector<std::size_t> order;
  order.reserve(n);
  std::vector<std::size_t> stack = {2 * n - 2};
  while (!stack.empty()) {
    const std::size_t node = stack.back();
    stack.pop_back();
    if (node < n) {
      order.push_back(node);
      continue;
    }
    const Merge& m = tree.merges[node - n];
    stack.push_back(m.right);  // right popped after left
    stack.push_back(m.left);
  }

  const bool draw_labels = n <= 64;
  const double spacing = n > 120 ? 6.0 : 14.0;
  const double margin_left = 50.0, margin_top = 30.0;
  const double plot_h = 360.0;
  const double label_h = draw_labels ? 70.0 : 10.0;
  const double width = margin_left + spacing * static_cast<double>(n) + 30.0;
  const double height = margin_top + plot_h + label_h + 10.0;

  double max_h = 0.0;
  for (const auto& m : tree.merges) max_h = std::max(max_h, m.height);
  if (max_h <= 0.0) max_h = 1.0;
  auto y_of = [&](double h) { return margin_top + plot_h * (1.0 - h / max_h); };

  std::vector<double> x(2 * n - 1, 0.0), y(2 * n - 1, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    x[order[i]] = margin_left + spacing * (static_cast<double>(i) + 0.5);
    y[order[i]] = y_of(0.0);
  }

  svg::Document doc(width, height);
  for (const auto& m : meta) doc.comment(m);
  // height axis with 5 ticks
  doc.line(margin_left - 8.0, margin_top, margin_left - 8.0, margin_top + plot_h, "#444444");
  for (int t = 0; t <= 4; ++t) {
    const double h = max_h * t / 4.0;
    doc.line(margin_left - 12.0, y_of(h), margin_left - 8.0, y_of(h), "#444444");
    doc.text(margin_left - 14.0, y_of(h) + 3.0, svg::fmt(h), 9.0, "end");
  }
  for (std::size_t t = 0; t < tree.merges.size(); ++t) {
    const Merge& m = tree.merges[t];
    const std::size_t node = n + t;
    const double ym = y_of(m.height);
    doc.line(x[m.left], y[m.left], x[m.left], ym, "#1f77b4");
    doc.line(x[m.right], y[m.right], x[m.right], ym, "#1f77b4");
    doc.line(x[m.left], ym, x[m.right], ym, "#1f77b4");
    x[node] = 0.5 * (x[m.left] + x[m.right]);
    y[node] = ym;
  }
  if (draw_labels) {
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t leaf = order[i];
      char transform[96];
      std::snprintf(transform, sizeof(transform), "rotate(90 %s %s)",
                    svg::fmt(x[leaf]).c_str(), svg::fmt(margin_top + plot_h + 6.0).c_str());
      doc.text(x[leaf], margin_top + plot_h + 6.0, leaf_names[leaf], 8.0, "start",
               transform);
    }
  }
  return doc.str();
}

/// Cluster x biomarker z-score heatmap on the diverging scale, annotated with
/// one-decimal values.
inline std::string render_heatmap(const Matrix& signatures,
                                  std::span<const BiomarkerDescriptor> schema,
                                  std::span<const std::string> row_labels = {},
                                  std::span<const std::string> meta = {}) {
  require(!signatures.empty(), Errc::BadArgument, "empty signature matrix");
  require(signatures.cols == schema.size(), Errc::ShapeMismatch,
          "signature width does not match schema");
  require(row_labels.empty() || row_labels.size() == signatures.rows,
          Errc::ShapeMismatch, "row labels do not match signature rows");

  const double cell_w = 34.0, cell_h = 26.0;
  const double margin_left = 150.0, margin_top = 90.0;
  const double width = margin_left + cell_w * static_cast<double>(signatures.cols) + 20.0;
  const double height = margin_top + cell_h * static_cast<double>(signatures.rows) + 20.0;
  svg::Document doc(width, height);
  for (const auto& m : meta) doc.comment(m);

  for (std::size_t j = 0; j < schema.size(); ++j) {
    const double cx = margin_left + cell_w * (static_cast<double>(j) + 0.5);
    char transform[96];
    std::snprintf(transform, sizeof(transform), "rotate(-60 %s %s)",
                  svg::fmt(cx).c_str(), svg::fmt(margin_top - 6.0).c_str());
    doc.text(cx, margin_top - 6.0, column_label(schema[j]), 9.0, "start", transform);
  }
  char annotation[16];
  for (std::size_t r = 0; r < signatures.rows; ++r) {
    const double ry = margin_top + cell_h * static_cast<double>(r);
    const std::string label = row_labels.empty()
                                  ? "cluster " + std::to_string(r)
                                  : row_labels[r];
    doc.text(margin_left - 8.0, ry + cell_h * 0.5 + 3.0, label, 10.0, "end");
    for (std::size_t j = 0; j < signatures.cols; ++j) {
      const double v = signatures(r, j);
      doc.rect(margin_left + cell_w * static_cast<double>(j), ry, cell_w, cell_h,
               svg::diverging_fill(v), "#cccccc");
      std::snprintf(annotation, sizeof(annotation), "%.1f", v);
      if (std::strcmp(annotation, "-0.0") == 0)
        std::snprintf(annotation, sizeof(annotation), "0.0");
      doc.text(margin_left + cell_w * (static_cast<double>(j) + 0.5),
               ry + cell_h * 0.5 + 3.0, annotation, 8.0, "middle");
    }
  }
  return doc.str();
}

/// 2-D score scatter, one color per cluster; seed-provenance points carry a
/// black outline.
inline std::string render_scatter(const Matrix& scores,
                                  std::span<const std::size_t> clusters,
                                  std::span<const std::string> provenance = {},
                                  std::span<const std::string> meta = {}) {
  require(scores.cols >= 2, Errc::ShapeMismatch, "scatter needs at least 2 score columns");
  require(clusters.size() == scores.rows, Errc::ShapeMismatch,
          "cluster labels do not match scores");
  require(provenance.empty() || provenance.size() == scores.rows, Errc::ShapeMismatch,
          "provenance does not match scores");

  double min_x = 0.0, max_x = 1.0, min_y = 0.0, max_y = 1.0;
  if (scores.rows > 0) {
    min_x = max_x = scores(0, 0);
    min_y = max_y = scores(0, 1);
    for (std::size_t i = 0; i < scores.rows; ++i) {
      min_x = std::min(min_x, scores(i, 0));
      max_x = std::max(max_x, scores(i, 0));
      min_y = std::min(min_y, scores(i, 1));
      max_y = std::max(max_y, scores(i, 1));
    }
  }
  if (max_x - min_x <= 0.0) max_x = min_x + 1.0;
  if (max_y - min_y <= 0.0) max_y = min_y + 1.0;

  const double plot = 420.0, margin = 50.0;
  svg::Document doc(plot + 2.0 * margin + 120.0, plot + 2.0 * margin);
  for (const auto& m : meta) doc.comment(m);
  auto sx = [&](double v) { return margin + plot * (v - min_x) / (max_x - min_x); };
  auto sy = [&](double v) { return margin + plot * (1.0 - (v - min_y) / (max_y - min_y)); };

  doc.rect(margin, margin, plot, plot, "none", "#444444");
  doc.text(margin + plot * 0.5, margin + plot + 24.0, "pc1", 10.0, "middle");
  doc.text(margin - 30.0, margin + plot * 0.5, "pc2", 10.0, "middle");
  std::size_t k = 0;
  for (std::size_t l : clusters) k = std::max(k, l + 1);
  for (std::size_t i = 0; i < scores.rows; ++i) {
    const bool is_seed = !provenance.empty() && provenance[i] == "seed";
    doc.circle(sx(scores(i, 0)), sy(scores(i, 1)), is_seed ? 4.0 : 2.5,
               svg::palette_color(clusters[i]), is_seed ? "#000000" : "none");
  }
  for (std::size_t c = 0; c < k; ++c) {
    const double ly = margin + 14.0 * static_cast<double>(c);
    doc.circle(margin + plot + 20.0, ly, 4.0, svg::palette_color(c));
    doc.text(margin + plot + 30.0, ly + 3.0, "cluster " + std::to_string(c), 9.0);
  }
  return doc.str();
}

}  // namespace biostate
