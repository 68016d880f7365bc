#pragma once

#include <cmath>
#include <span>
#include <vector>

#include "dsr/common.hpp"

namespace dsr {

/// First n_coeffs coefficients of the orthonormal DCT-II. With this
/// normalization a constant signal c of length N yields c*sqrt(N) in
/// coefficient 0 and zeros elsewhere. Coefficients past the signal length
/// are zero-padded so feature vectors keep a fixed width.
inline std::vector<double> dct_truncated(std::span<const double> x, std::size_t n_coeffs) {
  if (x.empty()) throw ValidationError("dct: empty signal");
  const std::size_t n = x.size();
  std::vector<double> out(n_coeffs, 0.0);
  const double s0 = std::sqrt(1.0 / static_cast<double>(n));
  const double sk = std::sqrt(2.0 / static_cast<double>(n));
  for (std::size_t kc = 0; kc < std::min(n_coeffs, n); ++kc) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      acc += x[i] * std::cos(M_PI * (2.0 * static_cast<double>(i) + 1.0) * static_cast<double>(kc) /
                             (2.0 * static_cast<double>(n)));
    out[kc] = (kc == 0 ? s0 : sk) * acc;
  }
  return out;
}

/// Full orthonormal DCT-II.
inline std::vector<double> dct(std::span<const double> x) { return dct_truncated(x, x.size()); }

/// Inverse of the orthonormal DCT-II (i.e. DCT-III with matching scaling).
inline std::vector<double> idct(std::span<const double> coeffs) {
  if (coeffs.empty()) throw ValidationError("idct: empty input");
  const std::size_t n = coeffs.size();
  const double s0 = std::sqrt(1.0 / static_cast<double>(n));
  const double sk = std::sqrt(2.0 / static_cast<double>(n));
  std::vector<double> out(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double acc = s0 * coeffs[0];
    for (std::size_t kc = 1; kc < n; ++kc)
      acc += sk * coeffs[kc] *
             std::cos(M_PI * (2.0 * static_cast<double>(i) + 1.0) * static_cast<double>(kc) /
                      (2.0 * static_cast<double>(n)));
    out[i] = acc;
  }
  return out;
}

}  // namespace dsr
