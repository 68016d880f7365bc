#pragma once

#include <array>
#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "dsr/corpus/stats.hpp"
#include "dsr/corpus/types.hpp"

namespace dsr {

inline constexpr std::array<int, 4> kHeadMotionPoints = {2, 4, 14, 16};

/// 4 tracked points x 6 motion channels x {mean, median, mode} = 72 reals,
/// in that nesting order. Channels per point: dx, dy, |d|, vx, vy, |v|.
struct HeadMotionFeatures {
  std::array<double, 72> values{};

  static std::vector<std::string> column_names() {
    std::vector<std::string> names;
    static const std::array<const char*, 6> chan = {"dx", "dy", "dmag", "vx", "vy", "vmag"};
    static const std::array<const char*, 3> stat = {"mean", "median", "mode"};
    for (int p : kHeadMotionPoints)
      for (const char* c : chan)
        for (const char* s : stat)
          names.push_back("p" + std::to_string(p) + "_" + c + "_" + s);
    return names;
  }
};

/// Displacement/velocity statistics of the four rigid head points between
/// consecutive valid frames. Velocity is displacement scaled by fps.
inline HeadMotionFeatures head_motion_features(std::span<const LandmarkFrame> frames, double fps = 30.0) {
  if (fps <= 0.0) throw ValidationError("head_motion_features: fps must be positive");
  std::vector<const LandmarkFrame*> valid;
  for (const auto& f : frames)
    if (f.valid) valid.push_back(&f);
  if (valid.size() < 2) throw ValidationError("head_motion_features: need at least 2 valid frames");

  static const StatSet kStats = {Stat::Mean, Stat::Median, Stat::Mode};
  HeadMotionFeatures out;
  std::size_t idx = 0;
  std::vector<double> dx(valid.size() - 1), dy(valid.size() - 1), mag(valid.size() - 1), scaled(valid.size() - 1);
  for (int p : kHeadMotionPoints) {
    for (std::size_t i = 0; i + 1 < valid.size(); ++i) {
      const auto& a = valid[i]->point(p);
      const auto& b = valid[i + 1]->point(p);
      dx[i] = b.first - a.first;
      dy[i] = b.second - a.second;
      mag[i] = std::hypot(dx[i], dy[i]);
    }
    for (const auto* series : {&dx, &dy, &mag}) {
      for (double v : descriptive_stats(*series, kStats)) out.values[idx++] = v;
    }
    for (const auto* series : {&dx, &dy, &mag}) {
      for (std::size_t i = 0; i < series->size(); ++i) scaled[i] = (*series)[i] * fps;
      for (double v : descriptive_stats(scaled, kStats)) out.values[idx++] = v;
    }
  }
  return out;
}

}  // namespace dsr
