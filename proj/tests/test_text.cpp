#include <catch2/catch_amalgamated.hpp>

#include <sstream>

#include "dsr/text/features.hpp"
#include "test_util.hpp"

using namespace dsr;
using namespace dsr::testutil;

namespace {

TranscriptEntry say(Speaker who, std::initializer_list<const char*> words, double start = 0.0) {
  TranscriptEntry e;
  e.start_time = start;
  e.stop_time = start + 1.0;
  e.speaker = who;
  for (const char* w : words) e.text.emplace_back(w);
  return e;
}

}  // namespace

TEST_CASE("rates from a hand-counted transcript") {
  // 2 participant sentences, 10 words total, 100 s.
  std::vector<TranscriptEntry> t = {
      say(Speaker::Interviewer, {"how", "are", "you"}),
      say(Speaker::Participant, {"i", "am", "doing", "fine", "today"}, 1.0),
      say(Speaker::Participant, {"went", "for", "a", "short", "walk"}, 2.0),
  };
  auto out = text_counts(t, 100.0);
  CHECK(out.sentences_per_second == Catch::Approx(0.02));
  CHECK(out.words_per_second == Catch::Approx(0.10));
  CHECK(out.mean_words_per_sentence == Catch::Approx(5.0));
  CHECK(out.laughter_ratio == 0.0);
  CHECK_FALSE(out.warning);
}

TEST_CASE("laughter markers are counted, not treated as words") {
  std::vector<TranscriptEntry> t = {
      say(Speaker::Participant, {"<laughter>", "that", "was", "funny", "i", "guess",
                                 "really", "quite", "funny", "yes", "indeed"}),
  };
  auto out = text_counts(t, 10.0);
  // 10 words after dropping the marker, 1 laugh -> ratio 0.1.
  CHECK(out.words_per_second == Catch::Approx(1.0));
  CHECK(out.laughter_ratio == Catch::Approx(0.1));
}

TEST_CASE("depression word ratio against a toy lexicon") {
  DepressionLexicon lex;
  lex.words = {"sad", "tired", "empty"};
  std::vector<TranscriptEntry> t = {
      say(Speaker::Participant, {"I", "feel", "sad", "and", "Tired,"}),
      say(Speaker::Participant, {"empty", "most"}, 1.0),
  };
  auto out = text_counts(t, 50.0, lex);
  // 7 words, 3 lexicon hits ("Tired," normalizes to "tired").
  CHECK(out.depression_word_ratio == Catch::Approx(3.0 / 7.0));
}

TEST_CASE("single-word affect passthrough") {
  AffectLexicon lex;
  AffectRatings r;
  r.values = {5.5, 1.2, 3.3, 0.8, 6.1, 1.0, 42.0};
  lex.words["calm"] = r;
  std::vector<TranscriptEntry> t = {say(Speaker::Participant, {"calm"})};
  auto affect = affect_features(t, lex);
  for (std::size_t i = 0; i < 7; ++i) CHECK(affect[i] == r.values[i]);
}

TEST_CASE("zero lexicon hits yields zeros with the warning set") {
  std::vector<TranscriptEntry> t = {say(Speaker::Participant, {"zzzz", "qqqq"})};
  auto out = text_features(t, 30.0);
  for (double v : out.affect) CHECK(v == 0.0);
  CHECK(out.warning);

  std::vector<TranscriptEntry> silent = {say(Speaker::Interviewer, {"hello", "there"})};
  auto empty = text_features(silent, 30.0);
  CHECK(empty.warning);
  CHECK(empty.words_per_second == 0.0);
}

TEST_CASE("affect means match a 50-word averaging oracle") {
  const auto& lex = default_affect_lexicon();
  std::vector<std::string> vocab;
  for (const auto& [w, _] : lex.words) vocab.push_back(w);

  Rng rng(17);
  std::vector<TranscriptEntry> t;
  std::array<double, 7> expected{};
  for (int i = 0; i < 50; ++i) {
    const auto& w = vocab[rng.uniform_index(vocab.size())];
    t.push_back(say(Speaker::Participant, {w.c_str()}, static_cast<double>(i)));
    const auto& r = lex.words.at(w).values;
    for (std::size_t j = 0; j < 7; ++j) expected[j] += r[j] / 50.0;
  }
  auto affect = affect_features(t, lex);
  for (std::size_t j = 0; j < 7; ++j)
    CHECK(approx_rel(affect[j], expected[j], 1e-12));
}

TEST_CASE("features are invariant to entry permutation and interviewer speech") {
  Rng rng(23);
  std::vector<TranscriptEntry> t = {
      say(Speaker::Participant, {"i", "feel", "tired", "today"}, 0.0),
      say(Speaker::Participant, {"sad", "<laughter>", "maybe"}, 1.0),
      say(Speaker::Participant, {"going", "home", "later"}, 2.0),
  };
  auto base = text_features(t, 20.0);

  auto permuted = t;
  rng.shuffle(permuted);
  auto p = text_features(permuted, 20.0);
  const auto pv = p.to_vector();
  const auto bv = base.to_vector();
  REQUIRE(pv.size() == bv.size());
  for (std::size_t i = 0; i < pv.size(); ++i) CHECK(approx_rel(pv[i], bv[i], 1e-12));

  auto with_interviewer = t;
  with_interviewer.insert(with_interviewer.begin() + 1,
                          say(Speaker::Interviewer, {"hopeless", "miserable", "sad", "sad"}, 0.5));
  auto q = text_features(with_interviewer, 20.0);
  CHECK(q.to_vector() == base.to_vector());
}

TEST_CASE("ratios stay within bounds on random transcripts") {
  Rng rng(29);
  std::vector<std::string> pool = {"sad", "fine", "<laughter>", "zzzz", "today", "tired", "ok"};
  for (int trial = 0; trial < 30; ++trial) {
    std::vector<TranscriptEntry> t;
    const int n = 1 + static_cast<int>(rng.uniform_index(8));
    for (int i = 0; i < n; ++i) {
      TranscriptEntry e;
      e.start_time = i;
      e.stop_time = i + 0.5;
      e.speaker = rng.uniform() < 0.5 ? Speaker::Participant : Speaker::Interviewer;
      const int words = 1 + static_cast<int>(rng.uniform_index(6));
      for (int w = 0; w < words; ++w) e.text.push_back(pool[rng.uniform_index(pool.size())]);
      t.push_back(e);
    }
    auto out = text_features(t, 60.0);
    CHECK(out.laughter_ratio >= 0.0);
    CHECK(out.laughter_ratio <= 1.0);
    CHECK(out.depression_word_ratio >= 0.0);
    CHECK(out.depression_word_ratio <= 1.0);
    CHECK(out.sentences_per_second >= 0.0);
  }
}

TEST_CASE("lexicon file loading") {
  TempDir dir("lex");
  write_file(dir.file("dep.txt"), "# comment\nsad\n  tired  \n\nempty\n");
  auto dep = load_depression_lexicon(dir.file("dep.txt"));
  CHECK(dep.words == std::set<std::string>{"sad", "tired", "empty"});

  write_file(dir.file("affect.csv"),
             "word,pmu,psd,amu,asd,dmu,dsd,freq\ncalm,5.5,1.2,3.3,0.8,6.1,1.0,42\n");
  auto aff = load_affect_lexicon(dir.file("affect.csv"));
  REQUIRE(aff.words.count("calm") == 1);
  CHECK(aff.words.at("calm").values[0] == 5.5);
  CHECK(aff.words.at("calm").values[6] == 42.0);

  write_file(dir.file("bad.csv"), "word,1,2\n");
  CHECK_THROWS_AS(load_affect_lexicon(dir.file("bad.csv")), ParseError);
}
