#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "dsr/common.hpp"

namespace dsr {

/// Minimal row-major dense matrix.
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c, double fill = 0.0) : rows(r), cols(c), data(r * c, fill) {}

  double& at(std::size_t r, std::size_t c) { return data[r * cols + c]; }
  double at(std::size_t r, std::size_t c) const { return data[r * cols + c]; }

  std::span<double> row(std::size_t r) { return {data.data() + r * cols, cols}; }
  std::span<const double> row(std::size_t r) const { return {data.data() + r * cols, cols}; }

  static Matrix from_rows(const std::vector<std::vector<double>>& rows_in) {
    if (rows_in.empty()) return {};
    Matrix m(rows_in.size(), rows_in[0].size());
    for (std::size_t r = 0; r < m.rows; ++r) {
      if (rows_in[r].size() != m.cols) throw ValidationError("Matrix::from_rows: ragged input");
      for (std::size_t c = 0; c < m.cols; ++c) m.at(r, c) = rows_in[r][c];
    }
    return m;
  }
};

inline double squared_distance(std::span<const double> a, std::span<const double> b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    acc += d * d;
  }
  return acc;
}

}  // namespace dsr
