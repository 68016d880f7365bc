#pragma once

#include <algorithm>
#include <cctype>
#include <string>
#include <vector>

#include "dsr/corpus/csv.hpp"
#include "dsr/corpus/types.hpp"

namespace dsr {

namespace detail {

inline std::string lowercase(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

}  // namespace detail

/// Parses the per-frame landmark CSV: frame_index, timestamp, confidence,
/// success, x1..x68, y1..y68. A non-numeric first row is treated as a header.
inline std::vector<LandmarkFrame> parse_landmark_file(const std::string& path) {
  const auto lines = csv::read_lines(path);
  constexpr std::size_t kCols = 4 + 2 * kLandmarkCount;

  std::vector<LandmarkFrame> frames;
  double prev_ts = 0.0;
  for (std::size_t row = 0; row < lines.size(); ++row) {
    const auto fields = csv::split(lines[row], ',');
    if (row == 0 && !csv::looks_numeric(fields[0])) continue;  // header
    if (fields.size() != kCols)
      throw ParseError(path + ":" + std::to_string(row + 1) + ": expected " + std::to_string(kCols) +
                       " columns, got " + std::to_string(fields.size()));
    LandmarkFrame f;
    f.frame_index = static_cast<std::int64_t>(csv::require_double(fields[0], path, row + 1, 0));
    f.timestamp = csv::require_double(fields[1], path, row + 1, 1);
    f.confidence = csv::require_double(fields[2], path, row + 1, 2);
    f.valid = csv::require_double(fields[3], path, row + 1, 3) != 0.0;
    for (std::size_t p = 0; p < kLandmarkCount; ++p) {
      f.points[p].first = csv::require_double(fields[4 + p], path, row + 1, 4 + p);
      f.points[p].second = csv::require_double(fields[4 + kLandmarkCount + p], path, row + 1, 4 + kLandmarkCount + p);
    }
    if (!frames.empty() && f.timestamp <= prev_ts)
      throw ParseError(path + ":" + std::to_string(row + 1) + ": timestamps not strictly increasing");
    prev_ts = f.timestamp;
    frames.push_back(f);
  }
  if (frames.empty()) throw ParseError(path + ": no frame rows");
  return frames;
}

/// Parses a transcript: start_time <sep> stop_time <sep> speaker <sep> text.
/// The separator (tab or comma) is auto-detected per file; entries come back
/// sorted by start time.
inline std::vector<TranscriptEntry> parse_transcript(const std::string& path) {
  const auto lines = csv::read_lines(path);
  const char sep = lines[0].find('\t') != std::string::npos ? '\t' : ',';

  std::vector<TranscriptEntry> entries;
  for (std::size_t row = 0; row < lines.size(); ++row) {
    auto fields = csv::split(lines[row], sep);
    if (row == 0 && !csv::looks_numeric(fields[0])) continue;  // header
    if (fields.size() < 4)
      throw ParseError(path + ":" + std::to_string(row + 1) + ": expected 4 fields, got " +
                       std::to_string(fields.size()));
    TranscriptEntry e;
    e.start_time = csv::require_double(fields[0], path, row + 1, 0);
    e.stop_time = csv::require_double(fields[1], path, row + 1, 1);
    if (e.stop_time <= e.start_time)
      throw ParseError(path + ":" + std::to_string(row + 1) + ": stop_time <= start_time");
    e.speaker = detail::lowercase(csv::trim(fields[2])) == "participant" ? Speaker::Participant
                                                                         : Speaker::Interviewer;
    // Text may itself contain the separator; rejoin the tail.
    std::string text = fields[3];
    for (std::size_t i = 4; i < fields.size(); ++i) text += sep + fields[i];
    std::istringstream toks(text);
    std::string tok;
    while (toks >> tok) e.text.push_back(tok);
    entries.push_back(std::move(e));
  }
  if (entries.empty()) throw ParseError(path + ": no transcript rows");
  std::stable_sort(entries.begin(), entries.end(),
                   [](const TranscriptEntry& a, const TranscriptEntry& b) { return a.start_time < b.start_time; });
  return entries;
}

/// Parses a low-level-descriptor CSV. The one-line header names the
/// channels; a leading "timestamp"/"time" column sets the frame period and
/// a "VUV" column populates the voicing flags. Everything else is a channel.
inline LldFrameSeries parse_lld_file(const std::string& path) {
  const auto lines = csv::read_lines(path);
  const auto header = csv::split(lines[0], ',');
  if (csv::looks_numeric(header[0]))
    throw ParseError(path + ":1: LLD file requires a channel-name header");

  LldFrameSeries series;
  std::size_t ts_col = static_cast<std::size_t>(-1);
  std::size_t vuv_col = static_cast<std::size_t>(-1);
  std::vector<std::size_t> channel_cols;
  for (std::size_t c = 0; c < header.size(); ++c) {
    const std::string name = csv::trim(header[c]);
    const std::string lower = detail::lowercase(name);
    if (c == 0 && (lower == "timestamp" || lower == "time")) {
      ts_col = c;
    } else if (lower == "vuv") {
      vuv_col = c;
    } else {
      series.channel_names.push_back(name);
      channel_cols.push_back(c);
    }
  }
  if (series.channel_names.empty()) throw ParseError(path + ": no descriptor channels in header");
  series.values.resize(series.channel_names.size());

  double first_ts = 0.0, second_ts = 0.0;
  std::size_t n_rows = 0;
  for (std::size_t row = 1; row < lines.size(); ++row) {
    const auto fields = csv::split(lines[row], ',');
    if (fields.size() != header.size())
      throw ParseError(path + ":" + std::to_string(row + 1) + ": expected " + std::to_string(header.size()) +
                       " columns, got " + std::to_string(fields.size()));
    if (ts_col != static_cast<std::size_t>(-1)) {
      double ts = csv::require_double(fields[ts_col], path, row + 1, ts_col);
      if (n_rows == 0) first_ts = ts;
      if (n_rows == 1) second_ts = ts;
    }
    if (vuv_col != static_cast<std::size_t>(-1))
      series.voiced_flag.push_back(csv::require_double(fields[vuv_col], path, row + 1, vuv_col) != 0.0);
    for (std::size_t k = 0; k < channel_cols.size(); ++k)
      series.values[k].push_back(csv::require_double(fields[channel_cols[k]], path, row + 1, channel_cols[k]));
    ++n_rows;
  }
  if (n_rows == 0) throw ParseError(path + ": no frame rows");
  if (ts_col != static_cast<std::size_t>(-1) && n_rows > 1) {
    series.frame_period = second_ts - first_ts;
    if (series.frame_period <= 0.0)
      throw ParseError(path + ": non-positive frame period derived from timestamps");
  }
  return series;
}

/// Parses a PHQ-8 labels CSV: 8 item columns, then optional total and
/// optional binary columns. Any item outside [0,3] is rejected.
inline Phq8Labels parse_labels(const std::string& path) {
  const auto lines = csv::read_lines(path);
  std::size_t row = 0;
  auto fields = csv::split(lines[0], ',');
  if (!csv::looks_numeric(fields[0])) {
    if (lines.size() < 2) throw ParseError(path + ": header but no data row");
    row = 1;
    fields = csv::split(lines[1], ',');
  }
  if (fields.size() < 8 || fields.size() > 10)
    throw ParseError(path + ":" + std::to_string(row + 1) + ": expected 8-10 columns, got " +
                     std::to_string(fields.size()));
  std::array<int, 8> items{};
  for (std::size_t i = 0; i < 8; ++i) {
    double v = csv::require_double(fields[i], path, row + 1, i);
    if (v != std::floor(v) || v < 0 || v > 3)
      throw ParseError(path + ":" + std::to_string(row + 1) + ": item " + std::to_string(i + 1) +
                       " value " + csv::trim(fields[i]) + " outside {0,1,2,3}");
    items[i] = static_cast<int>(v);
  }
  Phq8Labels labels = Phq8Labels::from_items(items);
  if (fields.size() >= 9) {
    int total = static_cast<int>(csv::require_double(fields[8], path, row + 1, 8));
    if (total != labels.total)
      throw ParseError(path + ":" + std::to_string(row + 1) + ": total " + std::to_string(total) +
                       " does not equal item sum " + std::to_string(labels.total));
  }
  if (fields.size() == 10)
    labels.binary = csv::require_double(fields[9], path, row + 1, 9) != 0.0;
  return labels;
}

}  // namespace dsr
