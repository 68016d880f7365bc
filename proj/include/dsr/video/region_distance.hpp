#pragma once

#include <array>
#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "dsr/corpus/types.hpp"
#include "dsr/video/affine.hpp"

namespace dsr {

inline constexpr std::array<const char*, 10> kRegionSeriesNames = {
    "left_eye_h", "left_eye_v", "right_eye_h", "right_eye_v", "mouth_h",
    "mouth_v",    "head_h",     "head_v",      "brow_h",      "brow_v"};

/// The 10 per-video distance series, each sum-normalized over retained
/// frames. series[k][t] is region k at retained frame t.
struct RegionDistanceSeries {
  std::array<std::vector<double>, 10> series;

  std::size_t frame_count() const { return series[0].size(); }

  /// Pooled descriptors: one 10-vector per retained frame.
  std::vector<std::array<double, 10>> descriptors() const {
    std::vector<std::array<double, 10>> out(frame_count());
    for (std::size_t t = 0; t < out.size(); ++t)
      for (std::size_t k = 0; k < 10; ++k) out[t][k] = series[k][t];
    return out;
  }
};

namespace detail {

inline double dist(const std::array<Point2, kLandmarkCount>& pts, int a, int b) {
  const auto& pa = pts[static_cast<std::size_t>(a - 1)];
  const auto& pb = pts[static_cast<std::size_t>(b - 1)];
  return std::hypot(pa.first - pb.first, pa.second - pb.second);
}

}  // namespace detail

/// Region distances over valid frames subsampled by `subsample`, after
/// aligning each retained frame to the reference with a least-squares
/// affine fit. Each series is normalized by its own sum.
inline RegionDistanceSeries region_distance_series(std::span<const LandmarkFrame> frames,
                                                   const std::array<Point2, kLandmarkCount>& reference,
                                                   std::size_t subsample = 3) {
  if (subsample == 0) throw ValidationError("region_distance_series: subsample must be >= 1");
  RegionDistanceSeries out;

  std::size_t valid_index = 0;
  for (const auto& frame : frames) {
    if (!frame.valid) continue;
    const bool retained = valid_index % subsample == 0;
    ++valid_index;
    if (!retained) continue;

    const auto t = fit_affine(frame.points, reference);
    std::array<Point2, kLandmarkCount> pts;
    for (std::size_t i = 0; i < kLandmarkCount; ++i) pts[i] = t.apply(frame.points[i]);

    using detail::dist;
    out.series[0].push_back(dist(pts, 37, 40));
    out.series[1].push_back(dist(pts, 38, 42));
    out.series[2].push_back(dist(pts, 43, 46));
    out.series[3].push_back(dist(pts, 44, 48));
    out.series[4].push_back(0.5 * (dist(pts, 55, 49) + dist(pts, 65, 61)));
    out.series[5].push_back(dist(pts, 52, 58));
    out.series[6].push_back(0.5 * (dist(pts, 2, 16) + dist(pts, 4, 14)));
    out.series[7].push_back(0.5 * (dist(pts, 22, 8) + dist(pts, 23, 10)));
    out.series[8].push_back(0.5 * (dist(pts, 22, 23) + dist(pts, 27, 18)));
    out.series[9].push_back(0.5 * (dist(pts, 31, 25) + dist(pts, 31, 20)));
  }
  if (out.series[0].empty()) throw ValidationError("region_distance_series: no valid frames");

  for (std::size_t k = 0; k < 10; ++k) {
    double sum = 0.0;
    for (double v : out.series[k]) sum += v;
    if (sum <= 0.0)
      throw NumericError(std::string("region_distance_series: zero-sum series ") + kRegionSeriesNames[k]);
    for (double& v : out.series[k]) v /= sum;
  }
  return out;
}

}  // namespace dsr
