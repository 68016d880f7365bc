#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>

#include "dsr/pipeline/run.hpp"
#include "test_util.hpp"

using namespace dsr;
using namespace dsr::testutil;
namespace fs = std::filesystem;

namespace {

PipelineConfig small_config(const std::string& out_dir, std::uint64_t seed) {
  PipelineConfig cfg;
  cfg.out_dir = out_dir;
  cfg.seed = seed;
  cfg.synth_sessions = 20;
  cfg.synth.duration = 10.0;
  cfg.gmm_k = 8;
  cfg.jobs = 2;
  cfg.grid.c_exponents = {-1, 1, 3};
  cfg.grid.gamma_exponents = {-7, -5, -3};
  return cfg;
}

std::string file_bytes(const fs::path& p) { return read_file(p.string()); }

}  // namespace

TEST_CASE("end-to-end pipeline on a small synthetic corpus") {
  TempDir dir("pipe");
  auto cfg = small_config(dir.file("run"), 0);
  const auto rows = run_pipeline(cfg);

  const fs::path out(cfg.out_dir);
  for (const char* f : {"corpus/manifest.json", "features/video.csv", "features/audio.csv",
                        "features/text.csv", "features/fisher.csv", "models/gmm.json",
                        "models/video.json", "models/fisher.json", "models/audio.json",
                        "models/text.json", "predictions/video.csv", "predictions/fused.csv",
                        "eval/report.txt", "meta/train.json"})
    CHECK(fs::exists(out / f));

  // Feature tables cover every session; Fisher vectors have 2*K*D columns.
  const auto sessions = load_manifest(cfg.manifest());
  const auto fisher = load_feature_table((out / "features" / "fisher.csv").string());
  CHECK(fisher.session_ids.size() == sessions.size());
  CHECK(fisher.names.size() == 2 * cfg.gmm_k * 10);

  // Predictions stay on the PHQ-8 scale and a report exists per modality
  // and split.
  for (const auto& m : pipeline_modalities()) {
    const auto preds = load_predictions((out / "predictions" / (m + ".csv")).string(), m);
    CHECK(preds.scores.size() == sessions.size());
    for (const auto& [sid, v] : preds.scores) {
      CHECK(v >= 0.0);
      CHECK(v <= 24.0);
    }
  }
  CHECK(rows.size() == 10);  // 5 prediction sets x 2 splits

  // The trained models carry real signal: train-split RMSE below the
  // predict-the-mean baseline for the fused output.
  const auto truth = detail::ground_truth(sessions, Split::Train);
  double mean_total = 0.0;
  for (const auto& [sid, l] : truth) mean_total += static_cast<double>(l.total) / static_cast<double>(truth.size());
  double baseline_sq = 0.0;
  for (const auto& [sid, l] : truth)
    baseline_sq += (mean_total - l.total) * (mean_total - l.total);
  const double baseline_rmse = std::sqrt(baseline_sq / static_cast<double>(truth.size()));
  for (const auto& row : rows)
    if (row.name == "fused" && row.split == "train") CHECK(row.report.rmse < baseline_rmse);
}

TEST_CASE("synthesis is byte-identical across runs with one seed") {
  TempDir dir("synthdet");
  PipelineConfig a, b;
  a.out_dir = dir.file("a");
  b.out_dir = dir.file("b");
  a.seed = b.seed = 7;
  a.synth_sessions = b.synth_sessions = 4;
  a.synth.duration = b.synth.duration = 8.0;
  run_synth(a);
  run_synth(b);

  for (const auto& entry : fs::recursive_directory_iterator(fs::path(a.out_dir) / "corpus")) {
    if (!entry.is_regular_file()) continue;
    const auto rel = fs::relative(entry.path(), fs::path(a.out_dir) / "corpus");
    CHECK(file_bytes(entry.path()) == file_bytes(fs::path(b.out_dir) / "corpus" / rel));
  }
}

TEST_CASE("stage artifacts are byte-identical on re-run") {
  TempDir dir("rerun");
  auto cfg = small_config(dir.file("run"), 3);
  cfg.synth_sessions = 8;
  run_pipeline(cfg);
  const auto first_features = file_bytes(fs::path(cfg.out_dir) / "features" / "fisher.csv");
  const auto first_preds = file_bytes(fs::path(cfg.out_dir) / "predictions" / "fused.csv");
  const auto first_report = file_bytes(fs::path(cfg.out_dir) / "eval" / "report.txt");

  run_pipeline(cfg);
  CHECK(file_bytes(fs::path(cfg.out_dir) / "features" / "fisher.csv") == first_features);
  CHECK(file_bytes(fs::path(cfg.out_dir) / "predictions" / "fused.csv") == first_preds);
  CHECK(file_bytes(fs::path(cfg.out_dir) / "eval" / "report.txt") == first_report);
}

TEST_CASE("feature table round trip") {
  TempDir dir("ftab");
  FeatureTable table;
  table.names = {"a", "b"};
  table.session_ids = {"s1", "s2"};
  table.values = Matrix(2, 2);
  table.values.at(0, 0) = 1.25;
  table.values.at(0, 1) = -3.5e-7;
  table.values.at(1, 0) = 0.0;
  table.values.at(1, 1) = 1e17;
  save_feature_table(dir.file("t.csv"), table);
  auto loaded = load_feature_table(dir.file("t.csv"));
  CHECK(loaded.names == table.names);
  CHECK(loaded.session_ids == table.session_ids);
  CHECK(loaded.values.data == table.values.data);
}

TEST_CASE("stages fail cleanly when inputs are missing") {
  TempDir dir("missing");
  PipelineConfig cfg;
  cfg.out_dir = dir.file("run");
  cfg.manifest_path = dir.file("nope.json");
  CHECK_THROWS_AS(run_extract(cfg), IoError);

  // extract before synth: manifest default path does not exist either.
  PipelineConfig nosynth;
  nosynth.out_dir = dir.file("run2");
  CHECK_THROWS_AS(run_extract(nosynth), IoError);
}

TEST_CASE("eval with mismatched sessions lists the difference") {
  TempDir dir("mismatch");
  auto cfg = small_config(dir.file("run"), 11);
  cfg.synth_sessions = 6;
  run_synth(cfg);
  run_extract(cfg);
  run_encode(cfg);
  run_train(cfg);
  run_predict(cfg);
  run_fuse(cfg);

  // Truncate one prediction file so the fused/session sets disagree.
  const auto path = fs::path(cfg.out_dir) / "predictions" / "audio.csv";
  auto preds = load_predictions(path.string(), "audio");
  preds.scores.erase(preds.scores.begin());
  preds.scores["ghost-session"] = 3.0;
  std::vector<std::string> order;
  for (const auto& [sid, _] : preds.scores) order.push_back(sid);
  save_predictions(path.string(), preds, order);

  try {
    run_eval(cfg);
    FAIL("expected ValidationError");
  } catch (const ValidationError& e) {
    CHECK(std::string(e.what()).find("ghost-session") != std::string::npos);
  }
}

TEST_CASE("CLI exit codes categorize failures") {
  TempDir dir("cli");
  const std::string cli = DSR_CLI_PATH;
  auto run = [&](const std::string& args) {
    const int status = std::system((cli + " " + args + " >/dev/null 2>&1").c_str());
    return WEXITSTATUS(status);
  };

  CHECK(run("synth --out " + dir.file("ok") + " --sessions 2 --duration 6") == 0);
  // Missing manifest -> 2.
  CHECK(run("extract --out " + dir.file("none") + " --manifest " + dir.file("absent.json")) == 2);
  // Bad flag value -> validation, 3.
  CHECK(run("pipeline --out " + dir.file("bad") + " --sessions 2 --duration 6 --fusion bogus") == 3);
}
