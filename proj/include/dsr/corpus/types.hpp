#pragma once

#include <array>
#include <numeric>
#include <string>
#include <vector>

#include "dsr/common.hpp"

namespace dsr {

inline constexpr std::size_t kLandmarkCount = 68;

/// One frame of 2-D facial landmarks, 1-indexed externally per the
/// iBUG-68 scheme (point n lives at points[n-1]).
struct LandmarkFrame {
  std::int64_t frame_index = 0;
  double timestamp = 0.0;   // seconds
  double confidence = 0.0;  // [0, 1]
  bool valid = true;
  std::array<Point2, kLandmarkCount> points{};

  const Point2& point(int one_based) const { return points[static_cast<std::size_t>(one_based - 1)]; }
};

enum class Speaker { Participant, Interviewer };

struct TranscriptEntry {
  double start_time = 0.0;  // seconds
  double stop_time = 0.0;   // seconds
  Speaker speaker = Speaker::Interviewer;
  std::vector<std::string> text;  // whitespace tokens, verbatim
};

/// Frame-synchronous low-level descriptor matrix. Channel naming comes
/// from the file header, never hard-coded.
struct LldFrameSeries {
  double frame_period = 0.010;  // seconds
  std::vector<std::string> channel_names;
  std::vector<std::vector<double>> values;  // [channel][frame]
  std::vector<bool> voiced_flag;            // per frame; empty means all voiced

  std::size_t channel_count() const { return channel_names.size(); }
  std::size_t frame_count() const { return values.empty() ? 0 : values[0].size(); }
};

inline constexpr std::array<const char*, 8> kPhq8ItemNames = {
    "NoInterest", "Depressed", "Sleep",         "Tired",
    "Appetite",   "Failure",   "Concentrating", "Moving"};

struct Phq8Labels {
  std::array<int, 8> items{};  // each in [0, 3]
  int total = 0;               // == sum(items), in [0, 24]
  bool binary = false;

  static Phq8Labels from_items(const std::array<int, 8>& items) {
    Phq8Labels l;
    l.items = items;
    for (int v : items) {
      if (v < 0 || v > 3) throw ValidationError("PHQ-8 item value " + std::to_string(v) + " outside [0,3]");
      l.total += v;
    }
    l.binary = l.total >= 10;
    return l;
  }
};

enum class Split { Train, Dev, Test };

inline std::string to_string(Split s) {
  switch (s) {
    case Split::Train: return "train";
    case Split::Dev: return "dev";
    default: return "test";
  }
}

inline Split split_from_string(const std::string& s) {
  if (s == "train") return Split::Train;
  if (s == "dev") return Split::Dev;
  if (s == "test") return Split::Test;
  throw ValidationError("unknown split '" + s + "'");
}

struct SessionManifest {
  std::string session_id;
  double duration = 0.0;  // seconds
  std::string landmark_path;
  std::string au_gaze_pose_path;
  std::string lld_path;
  std::string transcript_path;
  std::string labels_path;  // optional, empty when unlabeled
  Split split = Split::Train;
};

}  // namespace dsr
