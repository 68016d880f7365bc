#pragma once

#include <array>
#include <cmath>

#include "dsr/corpus/types.hpp"

namespace dsr {

/// A synthetic but geometrically plausible 68-point reference face in the
/// iBUG-68 ordering (jaw 1-17, brows 18-27, nose 28-36, eyes 37-48, mouth
/// 49-68), in pixel coordinates with y growing downwards. Serves as the
/// default alignment reference; callers may substitute their own.
inline std::array<Point2, kLandmarkCount> canonical_face() {
  std::array<Point2, kLandmarkCount> pts{};
  auto set = [&](int one_based, double x, double y) {
    pts[static_cast<std::size_t>(one_based - 1)] = {320.0 + 1.6 * x, 240.0 + 1.6 * y};
  };

  // Jaw: lower half-ellipse, left ear to right ear through the chin.
  for (int i = 0; i < 17; ++i) {
    double theta = M_PI + M_PI * static_cast<double>(i) / 16.0;
    set(1 + i, 80.0 * std::cos(theta), -90.0 * std::sin(theta));
  }
  // Brows.
  for (int i = 0; i < 5; ++i) {
    double t = static_cast<double>(i) / 4.0;
    set(18 + i, -60.0 + 40.0 * t, -45.0 - 5.0 * std::sin(M_PI * t));
    set(23 + i, 20.0 + 40.0 * t, -45.0 - 5.0 * std::sin(M_PI * t));
  }
  // Nose bridge and nostril line.
  set(28, 0, -30); set(29, 0, -15); set(30, 0, 0); set(31, 0, 15);
  set(32, -15, 25); set(33, -7, 27); set(34, 0, 28); set(35, 7, 27); set(36, 15, 25);
  // Eyes.
  set(37, -52, -25); set(38, -45, -30); set(39, -35, -30);
  set(40, -28, -25); set(41, -35, -20); set(42, -45, -20);
  set(43, 28, -25); set(44, 35, -30); set(45, 45, -30);
  set(46, 52, -25); set(47, 45, -20); set(48, 35, -20);
  // Outer lip.
  set(49, -25, 55); set(50, -15, 48); set(51, -7, 46); set(52, 0, 45);
  set(53, 7, 46); set(54, 15, 48); set(55, 25, 55); set(56, 15, 62);
  set(57, 7, 64); set(58, 0, 65); set(59, -7, 64); set(60, -15, 62);
  // Inner lip.
  set(61, -18, 55); set(62, -7, 51); set(63, 0, 50); set(64, 7, 51);
  set(65, 18, 55); set(66, 7, 59); set(67, 0, 60); set(68, -7, 59);
  return pts;
}

}  // namespace dsr
