#pragma once

#include <array>
#include <cmath>
#include <span>

#include "dsr/common.hpp"
#include "dsr/corpus/types.hpp"

namespace dsr {

/// 2-D affine map p -> A p + t.
struct AffineTransform {
  std::array<std::array<double, 2>, 2> linear{{{1.0, 0.0}, {0.0, 1.0}}};
  std::array<double, 2> translation{0.0, 0.0};

  Point2 apply(const Point2& p) const {
    return {linear[0][0] * p.first + linear[0][1] * p.second + translation[0],
            linear[1][0] * p.first + linear[1][1] * p.second + translation[1]};
  }
};

namespace detail {

// Solves the symmetric 3x3 system M v = b by Gaussian elimination with
// partial pivoting. Throws on rank deficiency.
inline std::array<double, 3> solve3(std::array<std::array<double, 3>, 3> m, std::array<double, 3> b) {
  for (int col = 0; col < 3; ++col) {
    int pivot = col;
    for (int r = col + 1; r < 3; ++r)
      if (std::abs(m[r][col]) > std::abs(m[pivot][col])) pivot = r;
    if (std::abs(m[pivot][col]) < 1e-12)
      throw NumericError("fit_affine: degenerate (rank-deficient) point configuration");
    std::swap(m[col], m[pivot]);
    std::swap(b[col], b[pivot]);
    for (int r = 0; r < 3; ++r) {
      if (r == col) continue;
      double f = m[r][col] / m[col][col];
      for (int c = col; c < 3; ++c) m[r][c] -= f * m[col][c];
      b[r] -= f * b[col];
    }
  }
  return {b[0] / m[0][0], b[1] / m[1][1], b[2] / m[2][2]};
}

}  // namespace detail

/// Least-squares 6-parameter affine mapping source points onto reference
/// points, via the normal equations of the linearized system. The x and y
/// rows share one Gram matrix.
inline AffineTransform fit_affine(std::span<const Point2> source, std::span<const Point2> reference) {
  if (source.size() != reference.size() || source.size() < 3)
    throw ValidationError("fit_affine: need matching point sets of size >= 3");

  const auto n = static_cast<double>(source.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
  double rx = 0, ry = 0, rxx = 0, rxy = 0, ryx = 0, ryy = 0;
  for (std::size_t i = 0; i < source.size(); ++i) {
    const auto [x, y] = source[i];
    const auto [u, v] = reference[i];
    if (!std::isfinite(x) || !std::isfinite(y) || !std::isfinite(u) || !std::isfinite(v))
      throw ValidationError("fit_affine: non-finite point");
    sx += x; sy += y;
    sxx += x * x; sxy += x * y; syy += y * y;
    rx += u; ry += v;
    rxx += u * x; rxy += u * y;
    ryx += v * x; ryy += v * y;
  }
  const std::array<std::array<double, 3>, 3> gram = {{{sxx, sxy, sx}, {sxy, syy, sy}, {sx, sy, n}}};
  const auto row_x = detail::solve3(gram, {rxx, rxy, rx});
  const auto row_y = detail::solve3(gram, {ryx, ryy, ry});

  AffineTransform t;
  t.linear = {{{row_x[0], row_x[1]}, {row_y[0], row_y[1]}}};
  t.translation = {row_x[2], row_y[2]};
  return t;
}

}  // namespace dsr
