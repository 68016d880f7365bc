#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "dsr/audio/features.hpp"
#include "test_util.hpp"

using namespace dsr;
using namespace dsr::testutil;

namespace {

TranscriptEntry entry(double start, double stop, Speaker who) {
  TranscriptEntry e;
  e.start_time = start;
  e.stop_time = stop;
  e.speaker = who;
  e.text = {"hello"};
  return e;
}

LldFrameSeries series_with(std::size_t frames, std::vector<std::string> names) {
  LldFrameSeries s;
  s.frame_period = 0.010;
  s.channel_names = std::move(names);
  s.values.assign(s.channel_names.size(), std::vector<double>(frames, 0.0));
  return s;
}

}  // namespace

TEST_CASE("participant mask selects frames by center time") {
  auto s = series_with(300, {"F0"});
  std::vector<TranscriptEntry> t = {entry(1.0, 2.0, Speaker::Participant)};
  auto mask = participant_mask(t, s);
  CHECK(mask.selected_count() == 100);
  CHECK_FALSE(mask.selected[99]);  // center 0.995
  CHECK(mask.selected[100]);       // center 1.005
  CHECK(mask.selected[199]);       // center 1.995
  CHECK_FALSE(mask.selected[200]); // center 2.005
}

TEST_CASE("interviewer-only transcript is an error") {
  auto s = series_with(100, {"F0"});
  std::vector<TranscriptEntry> t = {entry(0.0, 1.0, Speaker::Interviewer)};
  CHECK_THROWS_AS(participant_mask(t, s), ValidationError);
}

TEST_CASE("overlapping intervals merge") {
  auto s = series_with(400, {"F0"});
  std::vector<TranscriptEntry> overlapping = {entry(1.0, 2.0, Speaker::Participant),
                                              entry(1.5, 3.0, Speaker::Participant)};
  std::vector<TranscriptEntry> merged = {entry(1.0, 3.0, Speaker::Participant)};
  auto a = participant_mask(overlapping, s);
  auto b = participant_mask(merged, s);
  CHECK(a.selected == b.selected);
  REQUIRE(a.segments.size() == 1);
  CHECK(a.segments[0].second == 3.0);
}

TEST_CASE("mask is monotone under interval growth") {
  auto s = series_with(500, {"F0"});
  Rng rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    const double start = rng.uniform(0.0, 2.0);
    const double stop = start + rng.uniform(0.2, 1.5);
    auto before = participant_mask({entry(start, stop, Speaker::Participant)}, s);
    auto after = participant_mask({entry(start - 0.1, stop + rng.uniform(0.0, 1.0), Speaker::Participant)}, s);
    for (std::size_t i = 0; i < before.selected.size(); ++i)
      if (before.selected[i]) CHECK(after.selected[i]);
  }
}

TEST_CASE("lld statistics on a constant channel") {
  auto s = series_with(200, {"c"});
  for (double& v : s.values[0]) v = 5.0;
  auto mask = participant_mask({entry(0.0, 2.0, Speaker::Participant)}, s);
  auto out = lld_statistics(s, mask);
  REQUIRE(out.size() == 9);
  // AUDIO9 order: mean min skew kurt std median peak2rms rms iqr
  CHECK(out.values[0] == 5.0);
  CHECK(out.values[1] == 5.0);
  CHECK(out.values[4] == 0.0);
  CHECK(out.values[6] == 1.0);
  CHECK(out.values[7] == 5.0);
  CHECK(out.names[0] == "c_mean");
}

TEST_CASE("74 channels yield 666 statistics and 1406 total features") {
  std::vector<std::string> names;
  for (int i = 0; i < 74; ++i) names.push_back("ch" + std::to_string(i));
  auto s = series_with(300, names);
  Rng rng(5);
  for (auto& ch : s.values)
    for (double& v : ch) v = rng.normal(0.0, 1.0);
  std::vector<TranscriptEntry> t = {entry(0.5, 2.5, Speaker::Participant)};
  auto mask = participant_mask(t, s);
  CHECK(lld_statistics(s, mask).size() == 666);
  CHECK(audio_feature_vector(s, t).size() == 1406);
}

TEST_CASE("statistics match the oracle over masked frames only") {
  auto s = series_with(300, {"a", "b"});
  Rng rng(7);
  for (auto& ch : s.values)
    for (double& v : ch) v = rng.uniform(-3.0, 3.0);
  std::vector<TranscriptEntry> t = {entry(0.3, 1.1, Speaker::Participant),
                                    entry(1.9, 2.4, Speaker::Participant)};
  auto mask = participant_mask(t, s);
  auto out = lld_statistics(s, mask);

  for (std::size_t c = 0; c < 2; ++c) {
    std::vector<double> masked;
    for (std::size_t i = 0; i < 300; ++i)
      if (mask.selected[i]) masked.push_back(s.values[c][i]);
    CHECK(approx_rel(out.values[c * 9 + 0], oracle::mean(masked), 1e-9));
    CHECK(approx_rel(out.values[c * 9 + 2], oracle::skewness(masked), 1e-9));
    CHECK(approx_rel(out.values[c * 9 + 6], oracle::peak_to_rms(masked), 1e-9));
    CHECK(approx_rel(out.values[c * 9 + 8], oracle::iqr(masked), 1e-9));
  }

  // Mutating unmasked frames leaves the vector bit-identical.
  auto mutated = s;
  for (std::size_t i = 0; i < 300; ++i)
    if (!mask.selected[i]) mutated.values[0][i] = 1e6;
  CHECK(lld_statistics(mutated, mask).values == out.values);
  CHECK(dct_features(mutated, mask).values == dct_features(s, mask).values);
}

TEST_CASE("DCT of a constant signal") {
  const std::size_t n = 128;
  std::vector<double> x(n, 3.0);
  auto coeffs = dct(x);
  CHECK(coeffs[0] == Catch::Approx(3.0 * std::sqrt(static_cast<double>(n))));
  for (std::size_t k = 1; k < n; ++k) CHECK(std::abs(coeffs[k]) < 1e-9);
}

TEST_CASE("DCT round trip on random length-256 signals") {
  Rng rng(11);
  for (int trial = 0; trial < 5; ++trial) {
    std::vector<double> x(256);
    for (double& v : x) v = rng.normal(0.0, 2.0);
    auto back = idct(dct(x));
    for (std::size_t i = 0; i < x.size(); ++i) CHECK(std::abs(back[i] - x[i]) < 1e-9);
  }
}

TEST_CASE("short signals zero-pad to n_coeffs") {
  std::vector<double> x = {1.0, -2.0, 0.5, 3.0};
  auto coeffs = dct_truncated(x, 10);
  REQUIRE(coeffs.size() == 10);
  auto full = dct(x);
  for (std::size_t i = 0; i < 4; ++i) CHECK(coeffs[i] == full[i]);
  for (std::size_t i = 4; i < 10; ++i) CHECK(coeffs[i] == 0.0);
}

TEST_CASE("audio feature vector composes statistics and DCT per channel") {
  auto s = series_with(400, {"a", "b", "c"});
  Rng rng(13);
  for (auto& ch : s.values)
    for (double& v : ch) v = rng.normal(1.0, 0.5);
  std::vector<TranscriptEntry> t = {entry(0.2, 3.8, Speaker::Participant)};
  auto vec = audio_feature_vector(s, t);
  REQUIRE(vec.size() == 3 * 19);

  auto mask = participant_mask(t, s);
  auto stats = lld_statistics(s, mask);
  auto dcts = dct_features(s, mask);
  for (std::size_t c = 0; c < 3; ++c) {
    for (std::size_t k = 0; k < 9; ++k) CHECK(vec.values[c * 19 + k] == stats.values[c * 9 + k]);
    for (std::size_t k = 0; k < 10; ++k) CHECK(vec.values[c * 19 + 9 + k] == dcts.values[c * 10 + k]);
  }
  CHECK(vec.names[0] == "a_mean");
  CHECK(vec.names[9] == "a_dct0");

  // Purity: identical inputs give identical output.
  CHECK(audio_feature_vector(s, t).values == vec.values);
}
