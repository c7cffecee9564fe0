#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "biostate/error.hpp"
#include "biostate/matrix.hpp"
#include "biostate/numeric.hpp"

namespace biostate {

/// Eigendecomposition of a symmetric matrix by cyclic Jacobi rotations.
/// Returns eigenvalues in descending order with matching eigenvector columns.
inline void symmetric_eigen(Matrix a, std::vector<double>& eigenvalues, Matrix& eigenvectors) {
  require(a.rows == a.cols, Errc::ShapeMismatch, "matrix must be square");
  const std::size_t m = a.rows;
  eigenvectors = Matrix::identity(m);
  double frob2 = 0.0;
  for (double v : a.data) frob2 += v * v;
  const double stop = std::max(frob2, 1e-300) * 1e-26;

  for (int sweep = 0; sweep < 100; ++sweep) {
    double off2 = 0.0;
    for (std::size_t p = 0; p < m; ++p)
      for (std::size_t q = p + 1; q < m; ++q) off2 += 2.0 * a(p, q) * a(p, q);
    if (off2 <= stop) break;
    for (std::size_t p = 0; p + 1 < m; ++p) {
      for (std::size_t q = p + 1; q < m; ++q) {
        const double apq = a(p, q);
        if (std::abs(apq) < 1e-300) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (std::size_t i = 0; i < m; ++i) {
          const double aip = a(i, p), aiq = a(i, q);
          a(i, p) = c * aip - s * aiq;
          a(i, q) = s * aip + c * aiq;
        }
        for (std::size_t i = 0; i < m; ++i) {
          const double api = a(p, i), aqi = a(q, i);
          a(p, i) = c * api - s * aqi;
          a(q, i) = s * api + c * aqi;
        }
        for (std::size_t i = 0; i < m; ++i) {
          const double vip = eigenvectors(i, p), viq = eigenvectors(i, q);
          eigenvectors(i, p) = c * vip - s * viq;
          eigenvectors(i, q) = s * vip + c * viq;
        }
      }
    }
  }

  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t i, std::size_t j) { return a(i, i) > a(j, j); });
  eigenvalues.resize(m);
  Matrix sorted(m, m);
  for (std::size_t c = 0; c < m; ++c) {
    eigenvalues[c] = a(order[c], order[c]);
    for (std::size_t i = 0; i < m; ++i) sorted(i, c) = eigenvectors(i, order[c]);
  }
  eigenvectors = std::move(sorted);
}

/// Principal axes of a data matrix. components holds one orthonormal axis per
/// row, ordered by descending explained variance; explained_ratio is relative
/// to the total variance (trace of the sample covariance).
struct PcaModel {
  std::vector<double> mean;          // length b
  Matrix components;                 // r x b
  std::vector<double> explained_variance;  // length r
  std::vector<double> explained_ratio;     // length r
};

/// Sample covariance (divisor n-1) eigendecomposition, keeping the top r
/// eigenpairs. Sign convention: each component's largest-magnitude entry is
/// positive, so repeated runs emit identical axes.
inline PcaModel fit_pca(const Matrix& rows, std::size_t r) {
  const std::size_t n = rows.rows;
  const std::size_t b = rows.cols;
  require(n >= 2 && b >= 1, Errc::BadArgument, "fit_pca needs n >= 2 and b >= 1");
  require(r >= 1 && r <= std::min(n - 1, b), Errc::ROutOfRange,
          "r=" + std::to_string(r) + " outside [1, min(n-1, b)]");

  PcaModel model;
  model.mean = column_means(rows);
  Matrix cov(b, b);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t p = 0; p < b; ++p) {
      const double dp = rows(i, p) - model.mean[p];
      for (std::size_t q = p; q < b; ++q)
        cov(p, q) += dp * (rows(i, q) - model.mean[q]);
    }
  }
  double trace = 0.0;
  for (std::size_t p = 0; p < b; ++p) {
    for (std::size_t q = p; q < b; ++q) {
      cov(p, q) /= static_cast<double>(n - 1);
      cov(q, p) = cov(p, q);
    }
    trace += cov(p, p);
  }

  std::vector<double> eigenvalues;
  Matrix eigenvectors;
  symmetric_eigen(cov, eigenvalues, eigenvectors);

  model.components = Matrix(r, b);
  model.explained_variance.resize(r);
  model.explained_ratio.resize(r);
  for (std::size_t c = 0; c < r; ++c) {
    model.explained_variance[c] = std::max(eigenvalues[c], 0.0);
    model.explained_ratio[c] = trace > 0.0 ? model.explained_variance[c] / trace : 0.0;
    std::size_t arg = 0;
    double best = -1.0;
    for (std::size_t j = 0; j < b; ++j) {
      if (std::abs(eigenvectors(j, c)) > best) {
        best = std::abs(eigenvectors(j, c));
        arg = j;
      }
    }
    const double sign = eigenvectors(arg, c) < 0.0 ? -1.0 : 1.0;
    for (std::size_t j = 0; j < b; ++j)
      model.components(c, j) = sign * eigenvectors(j, c);
  }
  return model;
}

/// Scores: (rows - mean) * components^T.
inline Matrix pca_project(const PcaModel& model, const Matrix& rows) {
  require(rows.cols == model.mean.size(), Errc::ShapeMismatch,
          "row dimension does not match PCA model");
  const std::size_t r = model.components.rows;
  Matrix scores(rows.rows, r);
  for (std::size_t i = 0; i < rows.rows; ++i)
    for (std::size_t c = 0; c < r; ++c) {
      double s = 0.0;
      for (std::size_t j = 0; j < rows.cols; ++j)
        s += (rows(i, j) - model.mean[j]) * model.components(c, j);
      scores(i, c) = s;
    }
  return scores;
}

/// Back-projection from score space: scores * components + mean.
inline Matrix pca_reconstruct(const PcaModel& model, const Matrix& scores) {
  require(scores.cols == model.components.rows, Errc::ShapeMismatch,
          "score dimension does not match PCA model");
  const std::size_t b = model.mean.size();
  Matrix rows(scores.rows, b);
  for (std::size_t i = 0; i < scores.rows; ++i)
    for (std::size_t j = 0; j < b; ++j) {
      double v = model.mean[j];
      for (std::size_t c = 0; c < scores.cols; ++c)
        v += scores(i, c) * model.components(c, j);
      rows(i, j) = v;
    }
  return rows;
}

}  // namespace biostate
