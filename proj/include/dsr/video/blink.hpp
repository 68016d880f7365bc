#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include "dsr/common.hpp"
#include "dsr/corpus/stats.hpp"
#include "dsr/corpus/types.hpp"

namespace dsr {

struct BlinkFeatures {
  std::size_t blink_count = 0;
  double blink_frequency = 0.0;  // blinks per second
  double open_area = 0.0;        // pixel^2
  double closed_area = 0.0;      // pixel^2
};

/// Absolute shoelace area of the left-eye polygon (points 37-42).
inline double eye_area(const LandmarkFrame& frame) {
  static constexpr std::array<int, 6> eye = {37, 38, 39, 40, 41, 42};
  double acc = 0.0;
  for (std::size_t i = 0; i < eye.size(); ++i) {
    const auto& a = frame.point(eye[i]);
    const auto& b = frame.point(eye[(i + 1) % eye.size()]);
    acc += a.first * b.second - b.first * a.second;
  }
  return std::abs(acc) / 2.0;
}

/// Counts maximal runs of below-threshold values. Shared with the blink
/// detector and reusable as an oracle-comparable primitive.
inline std::size_t count_runs_below(std::span<const double> areas, double threshold) {
  std::size_t count = 0;
  bool in_run = false;
  for (double a : areas) {
    if (a < threshold) {
      if (!in_run) ++count;
      in_run = true;
    } else {
      in_run = false;
    }
  }
  return count;
}

/// Blink statistics from per-frame eye areas. Open area is the mode of the
/// trace; closed area the minimum over a seeded sample of frames; a blink
/// is a maximal run of frames with area below 0.9 x open area.
inline BlinkFeatures blink_features(std::span<const LandmarkFrame> frames, double duration,
                                    std::size_t sample_count = 1000, std::uint64_t seed = 0) {
  if (duration <= 0.0) throw ValidationError("blink_features: duration must be positive");
  std::vector<double> areas;
  for (const auto& f : frames)
    if (f.valid) areas.push_back(eye_area(f));
  if (areas.empty()) throw ValidationError("blink_features: no valid frames");

  BlinkFeatures out;
  out.open_area = detail::mode_of(areas);
  if (out.open_area <= 0.0) throw NumericError("blink_features: zero open-eye area");

  Rng rng(seed);
  double sampled_min = areas[0];
  for (std::size_t i : rng.sample_without_replacement(areas.size(), sample_count))
    sampled_min = std::min(sampled_min, areas[i]);
  out.closed_area = std::min(sampled_min, out.open_area);

  out.blink_count = count_runs_below(areas, 0.9 * out.open_area);
  out.blink_frequency = static_cast<double>(out.blink_count) / duration;
  return out;
}

}  // namespace dsr
