#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "dsr/corpus/synth.hpp"
#include "dsr/video/affine.hpp"
#include "dsr/video/blink.hpp"
#include "dsr/video/canonical_face.hpp"
#include "dsr/video/channel_stats.hpp"
#include "dsr/video/head_motion.hpp"
#include "dsr/video/region_distance.hpp"
#include "test_util.hpp"

using namespace dsr;
using namespace dsr::testutil;

namespace {

LandmarkFrame frame_from_points(const std::array<Point2, kLandmarkCount>& pts, std::int64_t index,
                                bool valid = true) {
  LandmarkFrame f;
  f.frame_index = index;
  f.timestamp = static_cast<double>(index) / 30.0;
  f.confidence = 1.0;
  f.valid = valid;
  f.points = pts;
  return f;
}

std::array<Point2, kLandmarkCount> transformed(const std::array<Point2, kLandmarkCount>& pts,
                                               double angle, double scale, double tx, double ty) {
  std::array<Point2, kLandmarkCount> out;
  const double c = std::cos(angle), s = std::sin(angle);
  for (std::size_t i = 0; i < pts.size(); ++i)
    out[i] = {scale * (c * pts[i].first - s * pts[i].second) + tx,
              scale * (s * pts[i].first + c * pts[i].second) + ty};
  return out;
}

}  // namespace

// ---------------------------------------------------------------------- affine

TEST_CASE("fit_affine identity") {
  const auto face = canonical_face();
  auto t = fit_affine(face, face);
  CHECK(std::abs(t.linear[0][0] - 1.0) < 1e-9);
  CHECK(std::abs(t.linear[0][1]) < 1e-9);
  CHECK(std::abs(t.linear[1][0]) < 1e-9);
  CHECK(std::abs(t.linear[1][1] - 1.0) < 1e-9);
  CHECK(std::abs(t.translation[0]) < 1e-7);
  CHECK(std::abs(t.translation[1]) < 1e-7);
}

TEST_CASE("fit_affine recovers a pure shift") {
  const auto face = canonical_face();
  auto shifted = face;
  for (auto& [x, y] : shifted) {
    x += 5.0;
    y += 7.0;
  }
  // Mapping the shifted source back onto the reference needs (-5, -7).
  auto t = fit_affine(shifted, face);
  CHECK(std::abs(t.translation[0] + 5.0) < 1e-7);
  CHECK(std::abs(t.translation[1] + 7.0) < 1e-7);
  double residual = 0.0;
  for (std::size_t i = 0; i < face.size(); ++i) {
    auto p = t.apply(shifted[i]);
    residual += std::hypot(p.first - face[i].first, p.second - face[i].second);
  }
  CHECK(residual < 1e-7);
}

TEST_CASE("fit_affine inverts rotation + scale within 1e-6") {
  const auto face = canonical_face();
  const auto src = transformed(face, 30.0 * M_PI / 180.0, 1.5, 12.0, -4.0);
  auto t = fit_affine(src, face);
  for (std::size_t i = 0; i < face.size(); ++i) {
    auto p = t.apply(src[i]);
    CHECK(std::abs(p.first - face[i].first) < 1e-6);
    CHECK(std::abs(p.second - face[i].second) < 1e-6);
  }
}

TEST_CASE("fit_affine rejects degenerate configurations") {
  std::array<Point2, kLandmarkCount> collinear;
  for (std::size_t i = 0; i < collinear.size(); ++i)
    collinear[i] = {static_cast<double>(i), 2.0 * static_cast<double>(i)};
  CHECK_THROWS_AS(fit_affine(collinear, canonical_face()), NumericError);
}

// ----------------------------------------------------------------- head motion

TEST_CASE("head motion 3-4-5 displacement") {
  auto base = canonical_face();
  std::vector<LandmarkFrame> frames = {frame_from_points(base, 0)};
  auto moved = base;
  moved[1] = {moved[1].first + 3.0, moved[1].second + 4.0};  // point 2
  frames.push_back(frame_from_points(moved, 1));

  auto f = head_motion_features(frames, 30.0);
  // Point 2 block: dx stats(3), dy stats(3), mag stats(3), then velocities.
  CHECK(f.values[0] == Catch::Approx(3.0));   // dx mean
  CHECK(f.values[3] == Catch::Approx(4.0));   // dy mean
  CHECK(f.values[6] == Catch::Approx(5.0));   // magnitude mean
  CHECK(f.values[9] == Catch::Approx(90.0));  // vx mean = dx * fps
  CHECK(f.values[15] == Catch::Approx(150.0));
}

TEST_CASE("stationary face yields all zero head-motion features") {
  auto base = canonical_face();
  std::vector<LandmarkFrame> frames;
  for (int i = 0; i < 10; ++i) frames.push_back(frame_from_points(base, i));
  auto f = head_motion_features(frames, 30.0);
  for (double v : f.values) CHECK(v == 0.0);
}

TEST_CASE("head motion matches a brute-force oracle on a random walk") {
  Rng rng(5);
  auto pts = canonical_face();
  std::vector<LandmarkFrame> frames;
  std::vector<std::vector<double>> walk_x(4), walk_y(4);  // tracked point trajectories
  for (int i = 0; i < 500; ++i) {
    for (auto& [x, y] : pts) {
      x += rng.normal(0.0, 0.5);
      y += rng.normal(0.0, 0.5);
    }
    auto f = frame_from_points(pts, i);
    frames.push_back(f);
    for (std::size_t p = 0; p < 4; ++p) {
      walk_x[p].push_back(f.point(kHeadMotionPoints[p]).first);
      walk_y[p].push_back(f.point(kHeadMotionPoints[p]).second);
    }
  }
  const double fps = 30.0;
  auto f = head_motion_features(frames, fps);

  std::size_t idx = 0;
  for (std::size_t p = 0; p < 4; ++p) {
    std::vector<double> dx, dy, mag;
    for (std::size_t i = 0; i + 1 < walk_x[p].size(); ++i) {
      dx.push_back(walk_x[p][i + 1] - walk_x[p][i]);
      dy.push_back(walk_y[p][i + 1] - walk_y[p][i]);
      mag.push_back(std::sqrt(dx.back() * dx.back() + dy.back() * dy.back()));
    }
    for (const auto* series : {&dx, &dy, &mag}) {
      CHECK(approx_rel(f.values[idx++], oracle::mean(*series), 1e-9));
      CHECK(approx_rel(f.values[idx++], oracle::median(*series), 1e-9));
      CHECK(approx_rel(f.values[idx++], oracle::mode4(*series), 1e-9));
    }
    for (const auto* series : {&dx, &dy, &mag}) {
      std::vector<double> vel(series->size());
      for (std::size_t i = 0; i < vel.size(); ++i) vel[i] = (*series)[i] * fps;
      CHECK(approx_rel(f.values[idx++], oracle::mean(vel), 1e-9));
      CHECK(approx_rel(f.values[idx++], oracle::median(vel), 1e-9));
      CHECK(approx_rel(f.values[idx++], oracle::mode4(vel), 1e-9));
    }
  }
  CHECK(idx == 72);

  // Magnitude >= max(|dx|, |dy|) holds frame-wise, so the mean magnitude
  // dominates the mean |component| as well.
  for (std::size_t p = 0; p < 4; ++p) {
    std::vector<double> adx, mag;
    for (std::size_t i = 0; i + 1 < walk_x[p].size(); ++i) {
      adx.push_back(std::abs(walk_x[p][i + 1] - walk_x[p][i]));
      mag.push_back(std::hypot(walk_x[p][i + 1] - walk_x[p][i], walk_y[p][i + 1] - walk_y[p][i]));
    }
    CHECK(oracle::mean(mag) >= oracle::mean(adx) - 1e-12);
  }
}

TEST_CASE("head motion needs two valid frames") {
  std::vector<LandmarkFrame> frames = {frame_from_points(canonical_face(), 0),
                                       frame_from_points(canonical_face(), 1, false)};
  CHECK_THROWS_AS(head_motion_features(frames, 30.0), ValidationError);
}

// ------------------------------------------------------------- region distance

TEST_CASE("region distance counting with subsample") {
  const auto face = canonical_face();
  std::vector<LandmarkFrame> frames;
  for (int i = 0; i < 300; ++i) frames.push_back(frame_from_points(face, i));
  auto rd = region_distance_series(frames, face, 3);
  CHECK(rd.frame_count() == 100);
  for (const auto& s : rd.series) {
    double sum = 0.0;
    for (double v : s) {
      CHECK(v >= 0.0);
      sum += v;
    }
    CHECK(std::abs(sum - 1.0) < 1e-9);
  }
}

TEST_CASE("invalid frames are dropped before subsampling") {
  const auto face = canonical_face();
  std::vector<LandmarkFrame> frames;
  for (int i = 0; i < 20; ++i) frames.push_back(frame_from_points(face, i, i % 2 == 0));
  // 10 valid frames, subsample 3 -> retained valid indices 0,3,6,9.
  auto rd = region_distance_series(frames, face, 3);
  CHECK(rd.frame_count() == 4);
}

TEST_CASE("normalized series invariant under global similarity transform") {
  Rng rng(9);
  auto pts = canonical_face();
  std::vector<LandmarkFrame> frames;
  for (int i = 0; i < 30; ++i) {
    auto p = pts;
    for (auto& [x, y] : p) {
      x += rng.normal(0.0, 1.0);
      y += rng.normal(0.0, 1.0);
    }
    frames.push_back(frame_from_points(p, i));
  }
  const auto ref = canonical_face();
  auto base = region_distance_series(frames, ref, 1);

  auto moved = frames;
  for (auto& f : moved) {
    auto t = transformed(f.points, 0.7, 2.3, 40.0, -15.0);
    f.points = t;
  }
  auto rd2 = region_distance_series(moved, ref, 1);
  for (std::size_t k = 0; k < 10; ++k)
    for (std::size_t t = 0; t < base.series[k].size(); ++t)
      CHECK(std::abs(base.series[k][t] - rd2.series[k][t]) < 1e-9);
}

TEST_CASE("region distances match hand-computed geometry") {
  // Scale the mouth opening over 5 frames; all other pairs stay constant.
  const auto face = canonical_face();
  std::vector<LandmarkFrame> frames;
  std::vector<double> mouth_v_raw;
  for (int i = 0; i < 5; ++i) {
    auto p = face;
    const double delta = 2.0 * i;
    p[57].second += delta;  // point 58 moves down
    frames.push_back(frame_from_points(p, i));
    // Alignment to the reference is near-identity here; compute expected
    // distance directly from the perturbed geometry.
    mouth_v_raw.push_back(std::hypot(p[51].first - p[57].first, p[51].second - p[57].second));
  }
  auto rd = region_distance_series(frames, face, 1);
  double sum = 0.0;
  for (double v : mouth_v_raw) sum += v;
  for (std::size_t t = 0; t < 5; ++t)
    CHECK(rd.series[5][t] == Catch::Approx(mouth_v_raw[t] / sum).margin(2e-3));
}

// ------------------------------------------------------------------------ blink

namespace {

/// Builds frames whose left-eye polygon area follows the given trace: the
/// eye is scaled around its centroid so area scales proportionally.
std::vector<LandmarkFrame> frames_with_eye_areas(const std::vector<double>& areas) {
  const auto face = canonical_face();
  LandmarkFrame base = frame_from_points(face, 0);
  const double base_area = eye_area(base);
  std::vector<LandmarkFrame> frames;
  for (std::size_t i = 0; i < areas.size(); ++i) {
    auto f = frame_from_points(face, static_cast<std::int64_t>(i));
    const double s = std::sqrt(areas[i] / base_area);
    double cx = 0, cy = 0;
    for (int p = 37; p <= 42; ++p) {
      cx += f.point(p).first / 6.0;
      cy += f.point(p).second / 6.0;
    }
    for (int p = 37; p <= 42; ++p) {
      auto& pt = f.points[p - 1];
      pt = {cx + s * (pt.first - cx), cy + s * (pt.second - cy)};
    }
    frames.push_back(f);
  }
  return frames;
}

}  // namespace

TEST_CASE("blink counting on a constructed trace") {
  std::vector<double> trace(1800, 100.0);
  for (std::size_t start : {100u, 700u, 1500u})
    for (std::size_t i = start; i < start + 4; ++i) trace[i] = 50.0;
  auto frames = frames_with_eye_areas(trace);
  auto b = blink_features(frames, 60.0);
  CHECK(b.blink_count == 3);
  CHECK(b.blink_frequency == Catch::Approx(0.05));
  CHECK(b.open_area == Catch::Approx(100.0).epsilon(1e-3));
  CHECK(b.closed_area <= b.open_area);
}

TEST_CASE("constant trace has zero blinks") {
  auto frames = frames_with_eye_areas(std::vector<double>(200, 80.0));
  auto b = blink_features(frames, 10.0);
  CHECK(b.blink_count == 0);
}

TEST_CASE("planted dips match an independent run counter, and the threshold is relative") {
  Rng rng(13);
  for (std::size_t k : {0u, 1u, 5u, 20u}) {
    std::vector<double> trace(3000, 100.0);
    // Jitter small enough that open frames share one mode bucket; dips are
    // themselves noisy so they never outnumber it.
    for (double& v : trace) v += rng.uniform(-4e-5, 4e-5);
    for (std::size_t b = 0; b < k; ++b) {
      const std::size_t start = 50 + b * 140;
      for (std::size_t i = start; i < start + 3; ++i) trace[i] = 60.0 + rng.uniform(0.0, 0.5);
    }
    auto frames = frames_with_eye_areas(trace);
    auto feats = blink_features(frames, 100.0);

    // Independent oracle: run-length count below 0.9 * mode.
    const double open = oracle::mode4(trace);
    std::size_t runs = 0;
    bool in = false;
    for (double v : trace) {
      if (v < 0.9 * open) {
        if (!in) ++runs;
        in = true;
      } else {
        in = false;
      }
    }
    CHECK(feats.blink_count == runs);
    CHECK(feats.blink_count == k);
    CHECK(feats.blink_frequency == Catch::Approx(static_cast<double>(k) / 100.0));

    // Scaling every area by a constant leaves the count unchanged.
    std::vector<double> scaled(trace);
    for (double& v : scaled) v *= 3.7;
    auto scaled_feats = blink_features(frames_with_eye_areas(scaled), 100.0);
    CHECK(scaled_feats.blink_count == feats.blink_count);
  }
}

// -------------------------------------------------------------- channel stats

TEST_CASE("channel statistics basics") {
  auto out = channel_statistics({"c"}, {{0.0, 1.0}}, {Stat::Min, Stat::Max, Stat::Range});
  REQUIRE(out.size() == 3);
  CHECK(out.values == std::vector<double>{0.0, 1.0, 1.0});
  CHECK(out.names[0] == "c_min");
}

TEST_CASE("channel statistics shape and oracle") {
  Rng rng(21);
  std::vector<std::string> names;
  std::vector<std::vector<double>> channels;
  for (int c = 0; c < 20; ++c) {
    names.push_back("au" + std::to_string(c));
    std::vector<double> ch(50);
    for (double& v : ch) v = rng.normal(0.0, 1.0);
    channels.push_back(ch);
  }
  auto out = channel_statistics(names, channels);
  REQUIRE(out.size() == 220);
  for (std::size_t c = 0; c < channels.size(); ++c) {
    CHECK(approx_rel(out.values[c * 11 + 2], oracle::mean(channels[c]), 1e-9));
    CHECK(approx_rel(out.values[c * 11 + 7], oracle::variance_sample(channels[c]), 1e-9));
    CHECK(approx_rel(out.values[c * 11 + 9], oracle::skewness(channels[c]), 1e-9));
  }
}

TEST_CASE("empty channel rejected") {
  CHECK_THROWS_AS(channel_statistics({"c"}, {{}}), ValidationError);
}
