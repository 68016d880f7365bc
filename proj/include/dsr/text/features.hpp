#pragma once

#include <algorithm>
#include <array>
#include <cctype>
#include <string>
#include <vector>

#include "dsr/text/lexicon.hpp"
#include "dsr/corpus/types.hpp"

namespace dsr {

inline const std::vector<std::string>& default_laughter_markers() {
  static const std::vector<std::string> m = {"<laughter>", "[laughter]", "laughter"};
  return m;
}

/// The 12 transcript-derived features. warning is set when a session has
/// no usable participant words (ratios and affect features fall back to 0).
struct TextFeatureVector {
  double sentences_per_second = 0.0;
  double words_per_second = 0.0;
  double mean_words_per_sentence = 0.0;
  double laughter_ratio = 0.0;
  double depression_word_ratio = 0.0;
  std::array<double, 7> affect{};  // pleasure mu/sd, arousal mu/sd, dominance mu/sd, frequency
  bool warning = false;

  static std::vector<std::string> column_names() {
    return {"sentences_per_second", "words_per_second",      "mean_words_per_sentence",
            "laughter_ratio",       "depression_word_ratio", "pleasure_mean",
            "pleasure_sd",          "arousal_mean",          "arousal_sd",
            "dominance_mean",       "dominance_sd",          "word_frequency"};
  }

  std::vector<double> to_vector() const {
    std::vector<double> v = {sentences_per_second, words_per_second, mean_words_per_sentence,
                             laughter_ratio, depression_word_ratio};
    v.insert(v.end(), affect.begin(), affect.end());
    return v;
  }
};

namespace detail {

/// Lowercase, strip leading/trailing punctuation. Returns "" for tokens
/// that are pure punctuation.
inline std::string normalize_token(const std::string& tok) {
  std::size_t b = 0, e = tok.size();
  auto is_punct = [](unsigned char c) { return std::ispunct(c) != 0; };
  while (b < e && is_punct(static_cast<unsigned char>(tok[b]))) ++b;
  while (e > b && is_punct(static_cast<unsigned char>(tok[e - 1]))) --e;
  std::string out = tok.substr(b, e - b);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

inline bool is_laughter_marker(const std::string& raw_token, const std::vector<std::string>& markers) {
  std::string lower = raw_token;
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return std::find(markers.begin(), markers.end(), lower) != markers.end();
}

/// Participant words after tokenization, with annotation markers removed.
inline std::vector<std::string> participant_words(const std::vector<TranscriptEntry>& transcript,
                                                  const std::vector<std::string>& markers,
                                                  std::size_t& laughter_count,
                                                  std::size_t& sentence_count) {
  std::vector<std::string> words;
  laughter_count = 0;
  sentence_count = 0;
  for (const auto& e : transcript) {
    if (e.speaker != Speaker::Participant) continue;
    ++sentence_count;
    for (const auto& tok : e.text) {
      if (is_laughter_marker(tok, markers)) {
        ++laughter_count;
        continue;
      }
      auto w = normalize_token(tok);
      if (!w.empty()) words.push_back(std::move(w));
    }
  }
  return words;
}

}  // namespace detail

/// Counts, rates and lexicon ratios over participant speech. Ratios are
/// clamped to [0,1]; a session with zero participant words yields zeros
/// with the warning flag set.
inline TextFeatureVector text_counts(const std::vector<TranscriptEntry>& transcript, double duration,
                                     const DepressionLexicon& lexicon = default_depression_lexicon(),
                                     const std::vector<std::string>& laughter_markers = default_laughter_markers()) {
  if (duration <= 0.0) throw ValidationError("text_counts: duration must be positive");
  std::size_t laughter = 0, sentences = 0;
  const auto words = detail::participant_words(transcript, laughter_markers, laughter, sentences);

  TextFeatureVector out;
  out.sentences_per_second = static_cast<double>(sentences) / duration;
  out.words_per_second = static_cast<double>(words.size()) / duration;
  out.mean_words_per_sentence =
      sentences > 0 ? static_cast<double>(words.size()) / static_cast<double>(sentences) : 0.0;
  if (words.empty()) {
    out.warning = true;
    return out;
  }
  std::size_t hits = 0;
  for (const auto& w : words)
    if (lexicon.words.count(w)) ++hits;
  const auto n = static_cast<double>(words.size());
  out.laughter_ratio = std::min(static_cast<double>(laughter) / n, 1.0);
  out.depression_word_ratio = static_cast<double>(hits) / n;
  return out;
}

/// Per-dimension mean of the 7 affect ratings over participant words found
/// in the lexicon; zero lexicon hits yields zeros with warning semantics
/// (flagged through text_features below).
inline std::array<double, 7> affect_features(const std::vector<TranscriptEntry>& transcript,
                                             const AffectLexicon& lexicon = default_affect_lexicon(),
                                             const std::vector<std::string>& laughter_markers = default_laughter_markers(),
                                             bool* warning = nullptr) {
  if (lexicon.words.empty()) throw ValidationError("affect_features: empty lexicon");
  std::size_t laughter = 0, sentences = 0;
  const auto words = detail::participant_words(transcript, laughter_markers, laughter, sentences);

  std::array<double, 7> acc{};
  std::size_t hits = 0;
  for (const auto& w : words) {
    auto it = lexicon.words.find(w);
    if (it == lexicon.words.end()) continue;  // out-of-lexicon words skipped
    ++hits;
    for (std::size_t i = 0; i < 7; ++i) acc[i] += it->second.values[i];
  }
  if (hits == 0) {
    if (warning) *warning = true;
    return {};
  }
  for (double& v : acc) v /= static_cast<double>(hits);
  return acc;
}

/// The full 12-feature text vector for one session.
inline TextFeatureVector text_features(const std::vector<TranscriptEntry>& transcript, double duration,
                                       const DepressionLexicon& dep_lexicon = default_depression_lexicon(),
                                       const AffectLexicon& affect_lexicon = default_affect_lexicon(),
                                       const std::vector<std::string>& laughter_markers = default_laughter_markers()) {
  TextFeatureVector out = text_counts(transcript, duration, dep_lexicon, laughter_markers);
  bool affect_warning = false;
  out.affect = affect_features(transcript, affect_lexicon, laughter_markers, &affect_warning);
  out.warning = out.warning || affect_warning;
  return out;
}

}  // namespace dsr
