#pragma once

#include <array>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>

#include "dsr/corpus/csv.hpp"

namespace dsr {

/// Per-word (pleasure mu, pleasure sd, arousal mu, arousal sd, dominance mu,
/// dominance sd, frequency) ratings.
struct AffectRatings {
  std::array<double, 7> values{};
};

struct AffectLexicon {
  std::map<std::string, AffectRatings> words;  // lowercase keys
};

struct DepressionLexicon {
  std::set<std::string> words;  // lowercase
};

/// One lowercase word per line; '#' starts a comment.
inline DepressionLexicon load_depression_lexicon(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  DepressionLexicon lex;
  std::string line;
  while (std::getline(in, line)) {
    auto word = csv::trim(line);
    if (word.empty() || word[0] == '#') continue;
    lex.words.insert(word);
  }
  if (lex.words.empty()) throw ParseError(path + ": empty depression lexicon");
  return lex;
}

/// CSV: word, then the 7 ratings.
inline AffectLexicon load_affect_lexicon(const std::string& path) {
  AffectLexicon lex;
  for (const auto& line : csv::read_lines(path)) {
    const auto fields = csv::split(line, ',');
    if (fields.size() != 8) throw ParseError(path + ": expected word + 7 ratings per row");
    if (!csv::looks_numeric(fields[1])) continue;  // header
    AffectRatings r;
    for (std::size_t i = 0; i < 7; ++i) r.values[i] = csv::require_double(fields[i + 1], path, 0, i + 1);
    lex.words[csv::trim(fields[0])] = r;
  }
  if (lex.words.empty()) throw ParseError(path + ": empty affect lexicon");
  return lex;
}

/// Built-in stand-in for the manually built ~720-word negative-word
/// dictionary; users supply their own file for real experiments.
inline const DepressionLexicon& default_depression_lexicon() {
  static const DepressionLexicon lex = [] {
    DepressionLexicon l;
    static const char* const words[] = {
        "abandoned", "afraid", "agitated", "alone", "angry", "anguish", "anxious", "apathetic",
        "ashamed", "awful", "bad", "bitter", "bleak", "broken", "burden", "crying",
        "dark", "dead", "defeated", "dejected", "depressed", "despair", "desperate", "devastated",
        "disappointed", "discouraged", "disgusted", "dismal", "distressed", "down", "drained", "dread",
        "dreary", "dull", "empty", "exhausted", "failing", "failure", "fatigued", "fear",
        "fearful", "forgotten", "fragile", "frightened", "frustrated", "gloomy", "grief", "grim",
        "guilt", "guilty", "hate", "heartbroken", "heavy", "helpless", "hopeless", "hurt",
        "inadequate", "insecure", "insomnia", "irritable", "isolated", "joyless", "lifeless", "lonely",
        "lost", "low", "melancholy", "miserable", "misery", "moody", "mourning", "negative",
        "nervous", "numb", "overwhelmed", "pain", "painful", "panic", "paralyzed", "pathetic",
        "pessimistic", "pointless", "powerless", "rejected", "restless", "sad", "scared", "shame",
        "sleepless", "slow", "sorrow", "stressed", "struggling", "stuck", "suffering", "suicidal",
        "tearful", "terrible", "tired", "tormented", "trapped", "troubled", "unhappy", "unloved",
        "unmotivated", "unwanted", "unworthy", "upset", "useless", "vulnerable", "weak", "weary",
        "weeping", "withdrawn", "worried", "worry", "worthless", "wretched"};
    for (const char* w : words) l.words.insert(w);
    return l;
  }();
  return lex;
}

/// Built-in stand-in affect lexicon covering common conversational words;
/// negative words carry lower pleasure/dominance ratings. The real ANEW
/// file is user-supplied via configuration.
inline const AffectLexicon& default_affect_lexicon() {
  static const AffectLexicon lex = [] {
    AffectLexicon l;
    static const char* const positive[] = {
        "well",   "today",  "about",  "going",   "home",   "work",   "people",  "think",
        "time",   "maybe",  "really", "things",  "okay",   "fine",   "weekend", "family",
        "friends", "watch", "music",  "outside", "morning", "later", "coffee",  "walking",
        "good",   "happy",  "great",  "love",    "nice",   "fun"};
    static const char* const negative[] = {
        "sad",     "tired",   "empty", "hopeless",  "worthless", "lonely",
        "worried", "anxious", "numb",  "exhausted", "guilty",    "miserable"};
    // Deterministic pseudo-ratings derived from the word itself.
    auto rate = [](const std::string& w, bool neg) {
      std::uint64_t h = 1469598103934665603ull;
      for (unsigned char c : w) h = (h ^ c) * 1099511628211ull;
      auto frac = [&](int shift) { return static_cast<double>((h >> shift) & 0xFF) / 255.0; };
      AffectRatings r;
      r.values[0] = neg ? 1.5 + 1.5 * frac(0) : 5.0 + 3.0 * frac(0);  // pleasure mean
      r.values[1] = 0.5 + 1.5 * frac(8);                              // pleasure sd
      r.values[2] = neg ? 4.0 + 3.0 * frac(16) : 3.0 + 2.0 * frac(16);  // arousal mean
      r.values[3] = 0.5 + 1.5 * frac(24);                             // arousal sd
      r.values[4] = neg ? 2.0 + 1.5 * frac(32) : 4.5 + 2.5 * frac(32);  // dominance mean
      r.values[5] = 0.5 + 1.5 * frac(40);                             // dominance sd
      r.values[6] = 1.0 + 99.0 * frac(48);                            // word frequency
      return r;
    };
    for (const char* w : positive) l.words[w] = rate(w, false);
    for (const char* w : negative) l.words[w] = rate(w, true);
    return l;
  }();
  return lex;
}

}  // namespace dsr
