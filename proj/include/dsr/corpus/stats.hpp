#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "dsr/common.hpp"

namespace dsr {

enum class Stat {
  Min,
  Max,
  Mean,
  Mode,
  Median,
  Range,
  MeanDeviation,
  Variance,
  StdDev,
  Skewness,
  Kurtosis,
  PeakToRms,
  RmsLevel,
  Iqr,
};

inline const char* stat_name(Stat s) {
  switch (s) {
    case Stat::Min: return "min";
    case Stat::Max: return "max";
    case Stat::Mean: return "mean";
    case Stat::Mode: return "mode";
    case Stat::Median: return "median";
    case Stat::Range: return "range";
    case Stat::MeanDeviation: return "meandev";
    case Stat::Variance: return "var";
    case Stat::StdDev: return "std";
    case Stat::Skewness: return "skew";
    case Stat::Kurtosis: return "kurt";
    case Stat::PeakToRms: return "peak2rms";
    case Stat::RmsLevel: return "rms";
    default: return "iqr";
  }
}

using StatSet = std::vector<Stat>;

/// The eleven statistics applied to AU/gaze/pose channels.
inline const StatSet& video11_stats() {
  static const StatSet s = {Stat::Min,      Stat::Max,           Stat::Mean,
                            Stat::Mode,     Stat::Median,        Stat::Range,
                            Stat::MeanDeviation, Stat::Variance, Stat::StdDev,
                            Stat::Skewness, Stat::Kurtosis};
  return s;
}

/// The nine statistics applied to audio low-level descriptors.
inline const StatSet& audio9_stats() {
  static const StatSet s = {Stat::Mean,   Stat::Min,       Stat::Skewness,
                            Stat::Kurtosis, Stat::StdDev,  Stat::Median,
                            Stat::PeakToRms, Stat::RmsLevel, Stat::Iqr};
  return s;
}

namespace detail {

/// Mode over reals: round to 4 decimals, most frequent wins, ties broken
/// by the smallest value.
inline double mode_of(std::span<const double> x) {
  std::map<std::int64_t, std::size_t> counts;
  for (double v : x) {
    auto key = static_cast<std::int64_t>(std::llround(v * 1e4));
    ++counts[key];
  }
  std::int64_t best_key = counts.begin()->first;
  std::size_t best_count = counts.begin()->second;
  for (const auto& [key, count] : counts) {
    if (count > best_count) {
      best_key = key;
      best_count = count;
    }
  }
  return static_cast<double>(best_key) / 1e4;
}

/// Type-7 (linear interpolation) quantile of a sorted sequence.
inline double quantile_sorted(const std::vector<double>& sorted, double q) {
  const std::size_t n = sorted.size();
  if (n == 1) return sorted[0];
  double h = q * static_cast<double>(n - 1);
  auto lo = static_cast<std::size_t>(std::floor(h));
  auto hi = std::min(lo + 1, n - 1);
  double frac = h - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

}  // namespace detail

/// Computes the requested statistics of a real sequence, in StatSet
/// declaration order. Variance/std use the sample (n-1) form; skewness and
/// kurtosis are standardized central moments (kurtosis non-excess) and are
/// 0 on zero-variance input; peak-to-RMS is 0 when RMS is 0.
inline std::vector<double> descriptive_stats(std::span<const double> series, const StatSet& stats) {
  if (series.empty()) throw ValidationError("descriptive_stats: empty series");
  if (stats.empty()) throw ValidationError("descriptive_stats: empty StatSet");

  const auto n = static_cast<double>(series.size());
  double sum = 0.0;
  for (double v : series) sum += v;
  const double mean = sum / n;

  double m2 = 0.0, m3 = 0.0, m4 = 0.0, abs_dev = 0.0, sum_sq = 0.0, peak = 0.0;
  double min_v = series[0], max_v = series[0];
  for (double v : series) {
    const double d = v - mean;
    m2 += d * d;
    m3 += d * d * d;
    m4 += d * d * d * d;
    abs_dev += std::abs(d);
    sum_sq += v * v;
    peak = std::max(peak, std::abs(v));
    min_v = std::min(min_v, v);
    max_v = std::max(max_v, v);
  }
  m2 /= n;
  m3 /= n;
  m4 /= n;
  const double variance = series.size() > 1 ? m2 * n / (n - 1.0) : 0.0;
  const double stddev = std::sqrt(variance);
  const double skew = m2 > 0.0 ? m3 / std::pow(m2, 1.5) : 0.0;
  const double kurt = m2 > 0.0 ? m4 / (m2 * m2) : 0.0;
  const double rms = std::sqrt(sum_sq / n);
  const double peak2rms = rms > 0.0 ? peak / rms : 0.0;

  std::vector<double> sorted;
  const bool need_sorted =
      std::any_of(stats.begin(), stats.end(),
                  [](Stat s) { return s == Stat::Median || s == Stat::Iqr; });
  if (need_sorted) {
    sorted.assign(series.begin(), series.end());
    std::sort(sorted.begin(), sorted.end());
  }

  std::vector<double> out;
  out.reserve(stats.size());
  for (Stat s : stats) {
    switch (s) {
      case Stat::Min: out.push_back(min_v); break;
      case Stat::Max: out.push_back(max_v); break;
      case Stat::Mean: out.push_back(mean); break;
      case Stat::Mode: out.push_back(detail::mode_of(series)); break;
      case Stat::Median: out.push_back(detail::quantile_sorted(sorted, 0.5)); break;
      case Stat::Range: out.push_back(max_v - min_v); break;
      case Stat::MeanDeviation: out.push_back(abs_dev / n); break;
      case Stat::Variance: out.push_back(variance); break;
      case Stat::StdDev: out.push_back(stddev); break;
      case Stat::Skewness: out.push_back(skew); break;
      case Stat::Kurtosis: out.push_back(kurt); break;
      case Stat::PeakToRms: out.push_back(peak2rms); break;
      case Stat::RmsLevel: out.push_back(rms); break;
      case Stat::Iqr:
        out.push_back(detail::quantile_sorted(sorted, 0.75) - detail::quantile_sorted(sorted, 0.25));
        break;
    }
  }
  return out;
}

}  // namespace dsr
