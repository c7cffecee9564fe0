#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "biostate/error.hpp"

namespace biostate {

/// Dense row-major matrix of doubles. Small and value-semantic; all heavier
/// linear algebra in this library operates on spans over its rows.
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c, double fill = 0.0)
      : rows(r), cols(c), data(r * c, fill) {}

  double& operator()(std::size_t i, std::size_t j) { return data[i * cols + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data[i * cols + j]; }

  std::span<double> row(std::size_t i) { return {data.data() + i * cols, cols}; }
  std::span<const double> row(std::size_t i) const {
    return {data.data() + i * cols, cols};
  }

  bool empty() const { return rows == 0 || cols == 0; }

  static Matrix identity(std::size_t n) {
    Matrix m(n, n, 0.0);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  /// Row-subset copy, keeping the given row order.
  Matrix select_rows(std::span<const std::size_t> idx) const {
    Matrix out(idx.size(), cols);
    for (std::size_t i = 0; i < idx.size(); ++i) {
      require(idx[i] < rows, Errc::ShapeMismatch, "row index out of range");
      auto src = row(idx[i]);
      std::copy(src.begin(), src.end(), out.row(i).begin());
    }
    return out;
  }

  bool operator==(const Matrix&) const = default;
};

}  // namespace biostate
