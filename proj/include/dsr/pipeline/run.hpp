#pragma once

#include <atomic>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "dsr/audio/features.hpp"
#include "dsr/corpus/manifest.hpp"
#include "dsr/corpus/parsers.hpp"
#include "dsr/corpus/synth.hpp"
#include "dsr/fusion/fusion.hpp"
#include "dsr/fv/fisher.hpp"
#include "dsr/fv/gmm.hpp"
#include "dsr/models/ensemble.hpp"
#include "dsr/text/features.hpp"
#include "dsr/video/blink.hpp"
#include "dsr/video/canonical_face.hpp"
#include "dsr/video/channel_stats.hpp"
#include "dsr/video/head_motion.hpp"
#include "dsr/video/region_distance.hpp"

namespace dsr {

inline const std::vector<std::string>& pipeline_modalities() {
  static const std::vector<std::string> m = {"video", "fisher", "audio", "text"};
  return m;
}

struct PipelineConfig {
  std::string manifest_path;  // empty for stages that run after synth
  std::string out_dir;
  std::uint64_t seed = 0;
  std::size_t jobs = 1;
  std::size_t gmm_k = 64;
  std::size_t subsample = 3;
  double fps = 30.0;
  std::size_t synth_sessions = 40;
  SynthConfig synth;
  GridSpec grid = coarse_grid();
  std::size_t cv_folds = 5;
  std::string fusion = "mean";  // "mean", "max" or "search"
  double weight_grid_step = 0.1;

  /// Default hyper-parameter grid for full runs: a coarse sweep over the
  /// usual exponent ranges, overridable per run.
  static GridSpec coarse_grid() {
    GridSpec g;
    g.c_exponents = {-3, 0, 3, 7, 11, 15};
    g.gamma_exponents = {-15, -11, -7, -3, 1};
    return g;
  }

  std::string manifest() const {
    if (!manifest_path.empty()) return manifest_path;
    return (std::filesystem::path(out_dir) / "corpus" / "manifest.json").string();
  }
};

namespace detail {

/// Fixed-width float formatting so re-runs are byte-identical across
/// platforms that agree on IEEE-754 doubles.
inline std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::ofstream create_text_file(const std::filesystem::path& p) {
  std::filesystem::create_directories(p.parent_path());
  std::ofstream out(p);
  if (!out) throw IoError("cannot write " + p.string());
  return out;
}

/// Runs fn(i) for i in [0,n) across at most `jobs` threads. Exceptions are
/// captured and rethrown on the caller thread.
template <typename Fn>
inline void parallel_for(std::size_t n, std::size_t jobs, Fn&& fn) {
  jobs = std::max<std::size_t>(jobs, 1);
  if (jobs == 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= n) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  for (std::size_t t = 0; t < std::min(jobs, n); ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

inline void write_stage_meta(const PipelineConfig& cfg, const std::string& stage,
                             nlohmann::json params) {
  params["stage"] = stage;
  params["seed"] = cfg.seed;
  params["format_versions"] = {{"manifest", kManifestFormatVersion},
                               {"gmm", kGmmFormatVersion},
                               {"svm", kSvmFormatVersion},
                               {"ensemble", kEnsembleFormatVersion}};
  auto out = create_text_file(std::filesystem::path(cfg.out_dir) / "meta" / (stage + ".json"));
  out << params.dump(2) << "\n";
}

}  // namespace detail

/// One named feature row per session, aligned with `session_ids`.
struct FeatureTable {
  std::vector<std::string> names;
  std::vector<std::string> session_ids;
  Matrix values;
};

inline void save_feature_table(const std::string& path, const FeatureTable& table) {
  auto out = detail::create_text_file(path);
  out << "session_id";
  for (const auto& n : table.names) out << "," << n;
  out << "\n";
  for (std::size_t r = 0; r < table.values.rows; ++r) {
    out << table.session_ids[r];
    for (std::size_t c = 0; c < table.values.cols; ++c)
      out << "," << detail::fmt17(table.values.at(r, c));
    out << "\n";
  }
}

inline FeatureTable load_feature_table(const std::string& path) {
  const auto lines = csv::read_lines(path);
  const auto header = csv::split(lines.front(), ',');
  if (header.empty() || header.front() != "session_id")
    throw ParseError(path + ": expected a session_id header column");
  FeatureTable table;
  table.names.assign(header.begin() + 1, header.end());
  std::vector<std::vector<double>> rows;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto fields = csv::split(lines[i], ',');
    if (fields.size() != header.size())
      throw ParseError(path + ":" + std::to_string(i + 1) + ": column count mismatch");
    table.session_ids.push_back(fields[0]);
    std::vector<double> row(fields.size() - 1);
    for (std::size_t c = 1; c < fields.size(); ++c)
      row[c - 1] = csv::require_double(fields[c], path, i + 1, c + 1);
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw ParseError(path + ": no data rows");
  table.values = Matrix::from_rows(rows);
  return table;
}

inline void save_predictions(const std::string& path, const PredictionSet& preds,
                             const std::vector<std::string>& order) {
  auto out = detail::create_text_file(path);
  out << "session_id,score\n";
  for (const auto& sid : order) out << sid << "," << detail::fmt17(preds.scores.at(sid)) << "\n";
}

inline PredictionSet load_predictions(const std::string& path, const std::string& modality) {
  PredictionSet preds;
  preds.modality = modality;
  const auto lines = csv::read_lines(path);
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto fields = csv::split(lines[i], ',');
    if (fields.size() != 2) throw ParseError(path + ":" + std::to_string(i + 1) + ": expected session_id,score");
    preds.scores[fields[0]] = csv::require_double(fields[1], path, i + 1, 2);
  }
  if (preds.scores.empty()) throw ParseError(path + ": no predictions");
  return preds;
}

/// Stage 1: write a labeled synthetic corpus plus its manifest.
inline std::vector<SessionManifest> run_synth(const PipelineConfig& cfg) {
  const auto corpus_dir = (std::filesystem::path(cfg.out_dir) / "corpus").string();
  auto sessions = generate_synthetic_corpus(cfg.seed, cfg.synth_sessions, corpus_dir, cfg.synth);
  detail::write_stage_meta(cfg, "synth",
                           {{"sessions", cfg.synth_sessions},
                            {"duration", cfg.synth.duration},
                            {"fps", cfg.synth.fps}});
  return sessions;
}

/// Stage 2: per-session feature extraction for the video, audio and text
/// modalities plus the per-frame region-distance descriptors consumed by
/// the encode stage.
inline void run_extract(const PipelineConfig& cfg) {
  const auto sessions = load_manifest(cfg.manifest());
  const auto out = std::filesystem::path(cfg.out_dir);
  const auto reference = canonical_face();

  struct SessionRow {
    NamedVector video, audio, text;
    std::vector<std::array<double, 10>> descriptors;
  };
  std::vector<SessionRow> rows(sessions.size());

  detail::parallel_for(sessions.size(), cfg.jobs, [&](std::size_t i) {
    const auto& s = sessions[i];
    const auto frames = parse_landmark_file(s.landmark_path);
    const auto transcript = parse_transcript(s.transcript_path);
    const auto lld = parse_lld_file(s.lld_path);
    const auto agp = parse_lld_file(s.au_gaze_pose_path);

    SessionRow& row = rows[i];
    const auto head = head_motion_features(frames, cfg.fps);
    const auto head_names = HeadMotionFeatures::column_names();
    for (std::size_t c = 0; c < head.values.size(); ++c) row.video.append(head_names[c], head.values[c]);
    const auto blink = blink_features(frames, s.duration);
    row.video.append("blink_count", static_cast<double>(blink.blink_count));
    row.video.append("blink_frequency", blink.blink_frequency);
    row.video.append("eye_open_area", blink.open_area);
    row.video.append("eye_closed_area", blink.closed_area);
    row.video.append(channel_statistics(agp.channel_names, agp.values));

    row.audio = audio_feature_vector(lld, transcript);

    const auto text = text_features(transcript, s.duration);
    const auto text_names = TextFeatureVector::column_names();
    const auto text_values = text.to_vector();
    for (std::size_t c = 0; c < text_values.size(); ++c) row.text.append(text_names[c], text_values[c]);

    row.descriptors = region_distance_series(frames, reference, cfg.subsample).descriptors();
  });

  auto table_of = [&](auto member) {
    FeatureTable table;
    table.names = (rows.front().*member).names;
    std::vector<std::vector<double>> data;
    for (std::size_t i = 0; i < sessions.size(); ++i) {
      table.session_ids.push_back(sessions[i].session_id);
      data.push_back((rows[i].*member).values);
    }
    table.values = Matrix::from_rows(data);
    return table;
  };
  save_feature_table((out / "features" / "video.csv").string(), table_of(&SessionRow::video));
  save_feature_table((out / "features" / "audio.csv").string(), table_of(&SessionRow::audio));
  save_feature_table((out / "features" / "text.csv").string(), table_of(&SessionRow::text));

  for (std::size_t i = 0; i < sessions.size(); ++i) {
    auto dout = detail::create_text_file(out / "descriptors" / (sessions[i].session_id + ".csv"));
    for (const auto& d : rows[i].descriptors) {
      for (std::size_t k = 0; k < 10; ++k) dout << (k ? "," : "") << detail::fmt17(d[k]);
      dout << "\n";
    }
  }
  detail::write_stage_meta(cfg, "extract",
                           {{"fps", cfg.fps}, {"subsample", cfg.subsample}, {"sessions", sessions.size()}});
}

namespace detail {

inline Matrix load_descriptors(const std::string& path) {
  const auto lines = csv::read_lines(path);
  Matrix out(lines.size(), 10);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const auto fields = csv::split(lines[i], ',');
    if (fields.size() != 10) throw ParseError(path + ": expected 10 columns");
    for (std::size_t k = 0; k < 10; ++k) out.at(i, k) = csv::require_double(fields[k], path, i + 1, k + 1);
  }
  return out;
}

}  // namespace detail

/// Stage 3: fit the GMM vocabulary on pooled train-split descriptors, then
/// Fisher-encode every session against the frozen model.
inline void run_encode(const PipelineConfig& cfg) {
  const auto sessions = load_manifest(cfg.manifest());
  const auto out = std::filesystem::path(cfg.out_dir);

  std::vector<Matrix> descriptors(sessions.size());
  for (std::size_t i = 0; i < sessions.size(); ++i)
    descriptors[i] = detail::load_descriptors((out / "descriptors" / (sessions[i].session_id + ".csv")).string());

  std::vector<std::vector<double>> pooled;
  for (std::size_t i = 0; i < sessions.size(); ++i) {
    if (sessions[i].split != Split::Train) continue;
    for (std::size_t r = 0; r < descriptors[i].rows; ++r) {
      auto row = descriptors[i].row(r);
      pooled.emplace_back(row.begin(), row.end());
    }
  }
  if (pooled.empty()) throw ValidationError("run_encode: no train-split descriptors to fit the GMM");

  const auto gmm = gmm_fit(Matrix::from_rows(pooled), cfg.gmm_k, derive_seed(cfg.seed, "gmm"));
  std::filesystem::create_directories(out / "models");
  save_gmm((out / "models" / "gmm.json").string(), gmm);

  FeatureTable table;
  for (std::size_t c = 0; c < 2 * cfg.gmm_k * 10; ++c) table.names.push_back("fv" + std::to_string(c));
  std::vector<std::vector<double>> data(sessions.size());
  detail::parallel_for(sessions.size(), cfg.jobs, [&](std::size_t i) {
    data[i] = fisher_encode(gmm, descriptors[i]).values;
  });
  for (const auto& s : sessions) table.session_ids.push_back(s.session_id);
  table.values = Matrix::from_rows(data);
  save_feature_table((out / "features" / "fisher.csv").string(), table);
  detail::write_stage_meta(cfg, "encode",
                           {{"k", cfg.gmm_k}, {"pooled_descriptors", pooled.size()}});
}

namespace detail {

struct LabeledSplit {
  Matrix features;
  std::vector<Phq8Labels> labels;
  std::vector<std::string> session_ids;
};

inline LabeledSplit train_split_rows(const FeatureTable& table,
                                     const std::vector<SessionManifest>& sessions) {
  std::map<std::string, const SessionManifest*> by_id;
  for (const auto& s : sessions) by_id[s.session_id] = &s;

  std::vector<std::vector<double>> rows;
  LabeledSplit split;
  for (std::size_t r = 0; r < table.values.rows; ++r) {
    auto it = by_id.find(table.session_ids[r]);
    if (it == by_id.end())
      throw ValidationError("feature table references unknown session " + table.session_ids[r]);
    const auto& s = *it->second;
    if (s.split != Split::Train || s.labels_path.empty()) continue;
    auto row = table.values.row(r);
    rows.emplace_back(row.begin(), row.end());
    split.labels.push_back(parse_labels(s.labels_path));
    split.session_ids.push_back(s.session_id);
  }
  if (rows.size() < 2) throw ValidationError("need at least two labeled train-split sessions");
  split.features = Matrix::from_rows(rows);
  return split;
}

}  // namespace detail

/// Stage 4: grid-searched per-item SVM ensembles, one per modality, fit on
/// the labeled train split.
inline void run_train(const PipelineConfig& cfg) {
  const auto sessions = load_manifest(cfg.manifest());
  const auto out = std::filesystem::path(cfg.out_dir);
  for (const auto& modality : pipeline_modalities()) {
    const auto table = load_feature_table((out / "features" / (modality + ".csv")).string());
    const auto split = detail::train_split_rows(table, sessions);
    EnsembleConfig ec;
    ec.grid = cfg.grid;
    ec.folds = cfg.cv_folds;
    ec.seed = derive_seed(cfg.seed, "train-" + modality);
    const auto ensemble = train_item_ensemble(split.features, split.labels, ec);
    save_ensemble((out / "models" / (modality + ".json")).string(), ensemble);
  }
  detail::write_stage_meta(cfg, "train",
                           {{"folds", cfg.cv_folds},
                            {"c_exponents", cfg.grid.c_exponents},
                            {"gamma_exponents", cfg.grid.gamma_exponents}});
}

/// Stage 5: per-modality PHQ-8 totals for every session in the manifest.
inline void run_predict(const PipelineConfig& cfg) {
  const auto sessions = load_manifest(cfg.manifest());
  const auto out = std::filesystem::path(cfg.out_dir);
  for (const auto& modality : pipeline_modalities()) {
    const auto table = load_feature_table((out / "features" / (modality + ".csv")).string());
    const auto ensemble = load_ensemble((out / "models" / (modality + ".json")).string());
    const auto totals = predict_phq8_total(ensemble, table.values);
    PredictionSet preds;
    preds.modality = modality;
    for (std::size_t r = 0; r < totals.size(); ++r)
      preds.scores[table.session_ids[r]] = static_cast<double>(totals[r]);
    save_predictions((out / "predictions" / (modality + ".csv")).string(), preds, table.session_ids);
  }
  detail::write_stage_meta(cfg, "predict", {{"modalities", pipeline_modalities()}});
}

namespace detail {

inline std::map<std::string, Phq8Labels> ground_truth(const std::vector<SessionManifest>& sessions,
                                                      Split split) {
  std::map<std::string, Phq8Labels> truth;
  for (const auto& s : sessions)
    if (s.split == split && !s.labels_path.empty()) truth[s.session_id] = parse_labels(s.labels_path);
  return truth;
}

inline PredictionSet restrict_sessions(const PredictionSet& preds,
                                       const std::map<std::string, Phq8Labels>& truth) {
  PredictionSet out;
  out.modality = preds.modality;
  for (const auto& [sid, v] : preds.scores)
    if (truth.count(sid)) out.scores[sid] = v;
  return out;
}

}  // namespace detail

/// Stage 6: combine the per-modality predictions. "mean" averages with
/// equal weights, "max" takes the pointwise maximum, and "search" runs the
/// exhaustive simplex weight search against the train split.
inline void run_fuse(const PipelineConfig& cfg) {
  const auto sessions = load_manifest(cfg.manifest());
  const auto out = std::filesystem::path(cfg.out_dir);
  std::vector<PredictionSet> predictions;
  std::vector<std::string> order;
  for (const auto& modality : pipeline_modalities())
    predictions.push_back(load_predictions((out / "predictions" / (modality + ".csv")).string(), modality));
  for (const auto& s : sessions) order.push_back(s.session_id);

  FusionSpec spec;
  nlohmann::json weights_meta;
  if (cfg.fusion == "max") {
    spec.strategy = FusionStrategy::Max;
  } else if (cfg.fusion == "mean") {
    const double w = 1.0 / static_cast<double>(predictions.size());
    for (const auto& p : predictions) spec.weights[p.modality] = w;
  } else if (cfg.fusion == "search") {
    const auto truth = detail::ground_truth(sessions, Split::Train);
    std::vector<PredictionSet> train_preds;
    for (const auto& p : predictions) train_preds.push_back(detail::restrict_sessions(p, truth));
    spec = weight_search(train_preds, truth, cfg.weight_grid_step).best;
  } else {
    throw ValidationError("unknown fusion strategy '" + cfg.fusion + "' (expected mean, max or search)");
  }
  for (const auto& [m, w] : spec.weights) weights_meta[m] = w;

  const auto fused = fuse(predictions, spec);
  save_predictions((out / "predictions" / "fused.csv").string(), fused, order);
  detail::write_stage_meta(cfg, "fuse", {{"strategy", cfg.fusion}, {"weights", weights_meta}});
}

struct PipelineEvalRow {
  std::string name;   // modality or "fused"
  std::string split;  // "train" or "dev"
  EvalReport report;
};

/// Stage 7: RMSE/MAE per modality and for the fused predictions, reported
/// separately on the train and dev splits.
inline std::vector<PipelineEvalRow> run_eval(const PipelineConfig& cfg) {
  const auto sessions = load_manifest(cfg.manifest());
  const auto out = std::filesystem::path(cfg.out_dir);

  std::vector<std::string> names = pipeline_modalities();
  names.push_back("fused");

  // Every prediction file must cover exactly the manifest's sessions.
  std::set<std::string> manifest_ids;
  for (const auto& s : sessions) manifest_ids.insert(s.session_id);
  for (const auto& name : names) {
    const auto preds = load_predictions((out / "predictions" / (name + ".csv")).string(), name);
    std::vector<std::string> diff;
    for (const auto& sid : manifest_ids)
      if (!preds.scores.count(sid)) diff.push_back(sid + " (missing in " + name + ")");
    for (const auto& [sid, _] : preds.scores)
      if (!manifest_ids.count(sid)) diff.push_back(sid + " (extra in " + name + ")");
    if (!diff.empty()) {
      std::string msg = "run_eval: session-id mismatch:";
      for (const auto& d : diff) msg += " " + d;
      throw ValidationError(msg);
    }
  }

  std::vector<PipelineEvalRow> rows;
  auto report_file = detail::create_text_file(out / "eval" / "report.txt");
  for (Split split : {Split::Train, Split::Dev}) {
    const auto truth = detail::ground_truth(sessions, split);
    if (truth.empty()) continue;
    for (const auto& name : names) {
      const auto preds = load_predictions((out / "predictions" / (name + ".csv")).string(), name);
      const auto report = evaluate(detail::restrict_sessions(preds, truth), truth);
      report_file << name << " " << to_string(split) << " RMSE=" << detail::fmt17(report.rmse)
                  << " MAE=" << detail::fmt17(report.mae) << "\n";
      rows.push_back({name, to_string(split), report});
    }
  }
  if (rows.empty()) throw ValidationError("run_eval: no labeled sessions to evaluate");
  detail::write_stage_meta(cfg, "eval", {{"rows", rows.size()}});
  return rows;
}

/// All stages in order. When no manifest is supplied a synthetic corpus is
/// generated first and used throughout.
inline std::vector<PipelineEvalRow> run_pipeline(PipelineConfig cfg) {
  if (cfg.manifest_path.empty()) run_synth(cfg);
  run_extract(cfg);
  run_encode(cfg);
  run_train(cfg);
  run_predict(cfg);
  run_fuse(cfg);
  return run_eval(cfg);
}

}  // namespace dsr
