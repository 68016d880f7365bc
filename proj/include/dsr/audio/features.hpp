#pragma once

#include <algorithm>
#include <string>
#include <vector>

#include "dsr/audio/dct.hpp"
#include "dsr/corpus/stats.hpp"
#include "dsr/corpus/types.hpp"
#include "dsr/video/channel_stats.hpp"

namespace dsr {

/// Frame selection for participant-only audio analysis.
struct ParticipantMask {
  std::vector<bool> selected;                       // per LLD frame
  std::vector<std::pair<double, double>> segments;  // merged participant intervals

  std::size_t selected_count() const {
    return static_cast<std::size_t>(std::count(selected.begin(), selected.end(), true));
  }
};

/// Selects LLD frames whose center time falls inside a participant speaking
/// interval; overlapping intervals are merged first.
inline ParticipantMask participant_mask(const std::vector<TranscriptEntry>& transcript,
                                        const LldFrameSeries& series) {
  if (transcript.empty()) throw ValidationError("participant_mask: empty transcript");

  std::vector<std::pair<double, double>> intervals;
  for (const auto& e : transcript)
    if (e.speaker == Speaker::Participant) intervals.emplace_back(e.start_time, e.stop_time);
  if (intervals.empty()) throw ValidationError("participant_mask: no participant speech in transcript");
  std::sort(intervals.begin(), intervals.end());

  ParticipantMask mask;
  for (const auto& iv : intervals) {
    if (!mask.segments.empty() && iv.first <= mask.segments.back().second)
      mask.segments.back().second = std::max(mask.segments.back().second, iv.second);
    else
      mask.segments.push_back(iv);
  }

  mask.selected.assign(series.frame_count(), false);
  std::size_t seg = 0;
  std::size_t n_selected = 0;
  for (std::size_t i = 0; i < series.frame_count(); ++i) {
    const double center = (static_cast<double>(i) + 0.5) * series.frame_period;
    while (seg < mask.segments.size() && center >= mask.segments[seg].second) ++seg;
    if (seg < mask.segments.size() && center >= mask.segments[seg].first) {
      mask.selected[i] = true;
      ++n_selected;
    }
  }
  if (n_selected == 0) throw ValidationError("participant_mask: no frames inside participant speech");
  return mask;
}

namespace detail {

inline std::vector<double> masked_channel(const LldFrameSeries& series, const ParticipantMask& mask,
                                          std::size_t channel) {
  std::vector<double> out;
  out.reserve(mask.selected_count());
  for (std::size_t i = 0; i < series.frame_count(); ++i)
    if (mask.selected[i]) out.push_back(series.values[channel][i]);
  return out;
}

}  // namespace detail

/// Statistical descriptors of every channel over the masked frames.
inline NamedVector lld_statistics(const LldFrameSeries& series, const ParticipantMask& mask,
                                  const StatSet& stats = audio9_stats()) {
  if (mask.selected_count() < 2) throw ValidationError("lld_statistics: fewer than 2 selected frames");
  NamedVector out;
  for (std::size_t c = 0; c < series.channel_count(); ++c) {
    const auto vals = descriptive_stats(detail::masked_channel(series, mask, c), stats);
    for (std::size_t s = 0; s < stats.size(); ++s)
      out.append(series.channel_names[c] + "_" + stat_name(stats[s]), vals[s]);
  }
  return out;
}

/// First n_coeffs orthonormal DCT-II coefficients of every channel's
/// masked sequence, zero-padded when the sequence is shorter than n_coeffs.
inline NamedVector dct_features(const LldFrameSeries& series, const ParticipantMask& mask,
                                std::size_t n_coeffs = 10) {
  if (mask.selected_count() == 0) throw ValidationError("dct_features: empty mask");
  NamedVector out;
  for (std::size_t c = 0; c < series.channel_count(); ++c) {
    const auto coeffs = dct_truncated(detail::masked_channel(series, mask, c), n_coeffs);
    for (std::size_t kc = 0; kc < n_coeffs; ++kc)
      out.append(series.channel_names[c] + "_dct" + std::to_string(kc), coeffs[kc]);
  }
  return out;
}

/// Per channel: the 9 statistics followed by the 10 DCT coefficients,
/// channels concatenated in header order (length = channels x 19).
inline NamedVector audio_feature_vector(const LldFrameSeries& series,
                                        const std::vector<TranscriptEntry>& transcript,
                                        std::size_t n_dct = 10) {
  const auto mask = participant_mask(transcript, series);
  const auto stats = lld_statistics(series, mask);
  const auto dcts = dct_features(series, mask, n_dct);
  NamedVector out;
  const std::size_t n_stats = audio9_stats().size();
  for (std::size_t c = 0; c < series.channel_count(); ++c) {
    for (std::size_t s = 0; s < n_stats; ++s)
      out.append(stats.names[c * n_stats + s], stats.values[c * n_stats + s]);
    for (std::size_t kc = 0; kc < n_dct; ++kc)
      out.append(dcts.names[c * n_dct + kc], dcts.values[c * n_dct + kc]);
  }
  return out;
}

}  // namespace dsr
