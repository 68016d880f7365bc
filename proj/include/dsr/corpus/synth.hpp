#pragma once

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "dsr/common.hpp"
#include "dsr/corpus/manifest.hpp"
#include "dsr/corpus/types.hpp"
#include "dsr/video/canonical_face.hpp"

namespace dsr {

struct SynthConfig {
  double duration = 40.0;  // seconds
  double fps = 30.0;
  double lld_frame_period = 0.010;
};

namespace detail {

// Fixed-width formatting so regenerated files are byte-identical.
inline std::string fmt6(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

inline std::ofstream open_out(const std::filesystem::path& p) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw IoError("cannot write " + p.string());
  return out;
}

// Small word pools for transcript synthesis. The negative pool overlaps the
// shipped depression lexicon so the text modality carries signal.
inline const std::vector<std::string>& neutral_words() {
  static const std::vector<std::string> w = {
      "well", "today", "about", "going", "home",  "work", "people", "think",
      "time", "maybe", "really", "things", "okay", "fine", "weekend", "family",
      "friends", "watch", "music", "outside", "morning", "later", "coffee", "walking"};
  return w;
}

inline const std::vector<std::string>& negative_words() {
  static const std::vector<std::string> w = {
      "sad",   "tired",   "empty",  "hopeless", "worthless", "lonely",
      "worried", "anxious", "numb",  "exhausted", "guilty",  "miserable"};
  return w;
}

}  // namespace detail

/// Writes one fully synthetic interview session (landmarks, AU/gaze/pose,
/// LLDs, transcript, labels) under out_dir. Deterministic in (seed,
/// profile): the severity profile modulates blink rate, head-motion
/// variance, expression amplitude, voice pitch and word choice so that
/// downstream classifiers have a learnable signal.
inline SessionManifest generate_synthetic_session(std::uint64_t seed, int profile,
                                                  const std::string& session_id,
                                                  const std::string& out_dir,
                                                  const SynthConfig& cfg = {}) {
  if (profile < 0 || profile > 24) throw ValidationError("profile must be in [0,24]");
  namespace fs = std::filesystem;
  const fs::path dir = fs::path(out_dir) / session_id;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());

  Rng rng(derive_seed(seed, "session"));
  const double severity = static_cast<double>(profile) / 24.0;

  // --- Landmarks -----------------------------------------------------------
  const auto base = canonical_face();
  const auto n_frames = static_cast<std::size_t>(cfg.duration * cfg.fps);
  const double head_step = 0.9 * (1.0 - 0.6 * severity);
  const double blink_rate = 0.15 + 0.55 * severity;  // blinks per second
  const double expr_amp = 3.0 * (1.0 - 0.7 * severity);

  {
    auto out = detail::open_out(dir / "landmarks.csv");
    out << "frame,timestamp,confidence,success";
    for (std::size_t p = 1; p <= kLandmarkCount; ++p) out << ",x" << p;
    for (std::size_t p = 1; p <= kLandmarkCount; ++p) out << ",y" << p;
    out << "\n";

    double hx = 0.0, hy = 0.0;
    int blink_left = 0;
    for (std::size_t i = 0; i < n_frames; ++i) {
      hx += rng.normal(0.0, head_step);
      hy += rng.normal(0.0, head_step);
      if (blink_left == 0 && rng.uniform() < blink_rate / cfg.fps) blink_left = 3;
      const bool blinking = blink_left > 0;
      if (blink_left > 0) --blink_left;
      const double mouth_open = expr_amp * std::sin(2.0 * M_PI * 0.4 * static_cast<double>(i) / cfg.fps) +
                                rng.normal(0.0, 0.4);
      const bool success = (i % 97) != 53;  // sporadic tracking dropouts

      std::array<Point2, kLandmarkCount> pts = base;
      for (auto& [x, y] : pts) {
        x += hx + rng.normal(0.0, 0.25);
        y += hy + rng.normal(0.0, 0.25);
      }
      if (blinking) {
        // Collapse the upper/lower lid points of both eyes toward the lid line.
        for (int p : {38, 39, 44, 45}) pts[p - 1].second += 6.5;
        for (int p : {41, 42, 47, 48}) pts[p - 1].second -= 6.5;
      }
      // Mouth opening oscillation drives the region-distance descriptors.
      for (int p : {56, 57, 58, 59, 60, 66, 67, 68}) pts[p - 1].second += mouth_open;
      for (int p : {50, 51, 52, 53, 54, 62, 63, 64}) pts[p - 1].second -= 0.3 * mouth_open;

      out << i << "," << detail::fmt6(static_cast<double>(i) / cfg.fps) << ","
          << detail::fmt6(0.90 + 0.05 * rng.uniform()) << "," << (success ? 1 : 0);
      for (const auto& pt : pts) out << "," << detail::fmt6(pt.first);
      for (const auto& pt : pts) out << "," << detail::fmt6(pt.second);
      out << "\n";
    }
  }

  // --- AU / gaze / pose ----------------------------------------------------
  {
    auto out = detail::open_out(dir / "au_gaze_pose.csv");
    static const std::array<const char*, 10> names = {"AU01_r", "AU04_r",  "AU06_r",  "AU12_r",  "AU15_r",
                                                      "gaze_x", "gaze_y",  "pose_Tx", "pose_Ty", "pose_Rz"};
    // Per-channel (baseline, severity shift) pairs.
    static const std::array<std::pair<double, double>, 10> gen = {{{0.5, 0.4},
                                                                   {0.4, 0.8},
                                                                   {0.9, -0.6},
                                                                   {1.1, -0.9},
                                                                   {0.3, 0.7},
                                                                   {0.0, -0.15},
                                                                   {0.0, 0.25},
                                                                   {0.0, 0.0},
                                                                   {0.0, 0.0},
                                                                   {0.0, 0.1}}};
    out << names[0];
    for (std::size_t c = 1; c < names.size(); ++c) out << "," << names[c];
    out << "\n";
    for (std::size_t i = 0; i < n_frames; ++i) {
      for (std::size_t c = 0; c < names.size(); ++c) {
        double v = gen[c].first + gen[c].second * severity + rng.normal(0.0, 0.2);
        out << (c ? "," : "") << detail::fmt6(v);
      }
      out << "\n";
    }
  }

  // --- Low-level descriptors -----------------------------------------------
  {
    auto out = detail::open_out(dir / "lld.csv");
    static const std::array<const char*, 9> glottal = {"F0",  "NAQ",       "QOQ", "H1H2", "PSP",
                                                       "MDQ", "peakSlope", "Rd",  "Rd_conf"};
    out << "timestamp,VUV";
    for (const char* n : glottal) out << "," << n;
    for (int k = 0; k < 10; ++k) out << ",MCEP_" << k;
    out << "\n";
    const auto n_lld = static_cast<std::size_t>(cfg.duration / cfg.lld_frame_period);
    const double f0_mean = 130.0 - 25.0 * severity;
    const double f0_sd = 18.0 * (1.0 - 0.5 * severity);  // flatter prosody
    for (std::size_t i = 0; i < n_lld; ++i) {
      const bool voiced = rng.uniform() < 0.7;
      out << detail::fmt6(static_cast<double>(i) * cfg.lld_frame_period) << "," << (voiced ? 1 : 0);
      out << "," << detail::fmt6(voiced ? rng.normal(f0_mean, f0_sd) : 0.0);
      for (std::size_t c = 1; c < glottal.size(); ++c)
        out << "," << detail::fmt6(rng.normal(0.1 * static_cast<double>(c) + 0.3 * severity, 0.5));
      for (int k = 0; k < 10; ++k)
        out << "," << detail::fmt6(rng.normal(-0.2 * k + (k % 3 == 0 ? 0.6 * severity : 0.0), 0.8));
      out << "\n";
    }
  }

  // --- Transcript ------------------------------------------------------------
  {
    auto out = detail::open_out(dir / "transcript.csv");
    out << "start_time\tstop_time\tspeaker\tvalue\n";
    const double p_negative = 0.03 + 0.30 * severity;
    const double p_laughter = 0.08 * (1.0 - severity);
    double t = 0.5;
    bool participant_turn = false;
    while (t < cfg.duration - 6.0) {
      if (!participant_turn) {
        double dur = 2.0 + rng.uniform();
        out << detail::fmt6(t) << "\t" << detail::fmt6(t + dur) << "\tEllie\thow have you been feeling\n";
        t += dur + 0.3;
      } else {
        double dur = 3.0 + 2.0 * rng.uniform();
        std::size_t n_words = 4 + rng.uniform_index(8);
        std::string utt;
        for (std::size_t w = 0; w < n_words; ++w) {
          if (!utt.empty()) utt += ' ';
          double u = rng.uniform();
          if (u < p_negative) {
            utt += detail::negative_words()[rng.uniform_index(detail::negative_words().size())];
          } else if (u < p_negative + p_laughter) {
            utt += "<laughter>";
          } else {
            utt += detail::neutral_words()[rng.uniform_index(detail::neutral_words().size())];
          }
        }
        out << detail::fmt6(t) << "\t" << detail::fmt6(t + dur) << "\tParticipant\t" << utt << "\n";
        t += dur + 0.4;
      }
      participant_turn = !participant_turn;
    }
  }

  // --- Labels ----------------------------------------------------------------
  {
    std::array<int, 8> items{};
    int remaining = profile;
    while (remaining > 0) {
      auto i = rng.uniform_index(8);
      if (items[i] < 3) {
        ++items[i];
        --remaining;
      }
    }
    const Phq8Labels labels = Phq8Labels::from_items(items);
    auto out = detail::open_out(dir / "labels.csv");
    out << "PHQ8_NoInterest,PHQ8_Depressed,PHQ8_Sleep,PHQ8_Tired,PHQ8_Appetite,"
           "PHQ8_Failure,PHQ8_Concentrating,PHQ8_Moving,PHQ8_Total,PHQ8_Binary\n";
    for (int v : labels.items) out << v << ",";
    out << labels.total << "," << (labels.binary ? 1 : 0) << "\n";
  }

  SessionManifest m;
  m.session_id = session_id;
  m.duration = cfg.duration;
  m.landmark_path = (dir / "landmarks.csv").string();
  m.au_gaze_pose_path = (dir / "au_gaze_pose.csv").string();
  m.lld_path = (dir / "lld.csv").string();
  m.transcript_path = (dir / "transcript.csv").string();
  m.labels_path = (dir / "labels.csv").string();
  return m;
}

/// Generates a corpus of n sessions with severity profiles spread over
/// [0,24], writes manifest.json, and returns the manifest entries.
inline std::vector<SessionManifest> generate_synthetic_corpus(std::uint64_t seed, std::size_t n_sessions,
                                                              const std::string& out_dir,
                                                              const SynthConfig& cfg = {}) {
  if (n_sessions == 0) throw ValidationError("need at least one session");
  std::vector<SessionManifest> sessions;
  for (std::size_t i = 0; i < n_sessions; ++i) {
    const int profile = n_sessions == 1
                            ? 12
                            : static_cast<int>(std::lround(24.0 * static_cast<double>(i) /
                                                           static_cast<double>(n_sessions - 1)));
    char sid[16];
    std::snprintf(sid, sizeof(sid), "S%03zu", i);
    auto m = generate_synthetic_session(derive_seed(seed, std::string("corpus-") + sid), profile, sid, out_dir, cfg);
    // Every 4th session goes to dev so both splits span the severity range.
    m.split = (i % 4 == 3) ? Split::Dev : Split::Train;
    sessions.push_back(std::move(m));
  }
  save_manifest((std::filesystem::path(out_dir) / "manifest.json").string(), sessions);
  return sessions;
}

}  // namespace dsr
