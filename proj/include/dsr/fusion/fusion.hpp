#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "dsr/common.hpp"
#include "dsr/corpus/types.hpp"

namespace dsr {

/// Per-modality predicted PHQ-8 totals.
struct PredictionSet {
  std::string modality;
  std::map<std::string, double> scores;  // session_id -> total in [0,24]
};

enum class FusionStrategy { WeightedMean, Max };

struct FusionSpec {
  FusionStrategy strategy = FusionStrategy::WeightedMean;
  std::map<std::string, double> weights;  // modality -> weight (weighted mean only)
};

struct EvalReport {
  double rmse = 0.0;
  double mae = 0.0;
  std::map<std::string, double> residuals;  // session_id -> predicted - truth
  std::size_t session_count = 0;
};

namespace detail {

inline void require_same_sessions(const std::vector<PredictionSet>& sets) {
  if (sets.empty()) throw ValidationError("fuse: no prediction sets");
  const auto& ref = sets.front().scores;
  for (const auto& s : sets) {
    std::vector<std::string> diff;
    for (const auto& [sid, _] : ref)
      if (!s.scores.count(sid)) diff.push_back(sid + " (missing in " + s.modality + ")");
    for (const auto& [sid, _] : s.scores)
      if (!ref.count(sid)) diff.push_back(sid + " (extra in " + s.modality + ")");
    if (!diff.empty()) {
      std::string msg = "fuse: session-id mismatch:";
      for (const auto& d : diff) msg += " " + d;
      throw ValidationError(msg);
    }
  }
}

}  // namespace detail

/// Decision-level fusion. Weighted mean requires nonnegative weights over
/// exactly the given modalities summing to 1; max takes the pointwise
/// maximum. Outputs are clipped to [0,24] and left real-valued.
inline PredictionSet fuse(const std::vector<PredictionSet>& predictions, const FusionSpec& spec) {
  detail::require_same_sessions(predictions);

  PredictionSet out;
  if (spec.strategy == FusionStrategy::WeightedMean) {
    double wsum = 0.0;
    for (const auto& p : predictions) {
      auto it = spec.weights.find(p.modality);
      if (it == spec.weights.end())
        throw ValidationError("fuse: no weight for modality '" + p.modality + "'");
      if (it->second < 0.0) throw ValidationError("fuse: negative weight for '" + p.modality + "'");
      wsum += it->second;
    }
    if (std::abs(wsum - 1.0) > 1e-9)
      throw ValidationError("fuse: weights sum to " + std::to_string(wsum) + ", expected 1");
    out.modality = "fused_weighted_mean";
    for (const auto& [sid, _] : predictions.front().scores) {
      double acc = 0.0;
      for (const auto& p : predictions) acc += spec.weights.at(p.modality) * p.scores.at(sid);
      out.scores[sid] = std::clamp(acc, 0.0, 24.0);
    }
  } else {
    out.modality = "fused_max";
    for (const auto& [sid, v] : predictions.front().scores) {
      double mx = v;
      for (const auto& p : predictions) mx = std::max(mx, p.scores.at(sid));
      out.scores[sid] = std::clamp(mx, 0.0, 24.0);
    }
  }
  return out;
}

/// RMSE/MAE of predicted totals against ground truth over the common
/// session set (which must be the full prediction set).
inline EvalReport evaluate(const PredictionSet& predictions, const std::map<std::string, Phq8Labels>& truth) {
  EvalReport report;
  double sq = 0.0, ab = 0.0;
  std::vector<std::string> missing;
  for (const auto& [sid, pred] : predictions.scores) {
    auto it = truth.find(sid);
    if (it == truth.end()) {
      missing.push_back(sid);
      continue;
    }
    const double r = pred - static_cast<double>(it->second.total);
    report.residuals[sid] = r;
    sq += r * r;
    ab += std::abs(r);
  }
  if (report.residuals.empty()) throw ValidationError("evaluate: no sessions in common with ground truth");
  if (!missing.empty()) {
    std::string msg = "evaluate: sessions without ground truth:";
    for (const auto& sid : missing) msg += " " + sid;
    throw ValidationError(msg);
  }
  const auto n = static_cast<double>(report.residuals.size());
  report.rmse = std::sqrt(sq / n);
  report.mae = ab / n;
  report.session_count = report.residuals.size();
  return report;
}

struct WeightSearchRow {
  std::vector<double> weights;  // aligned with the modality order of the inputs
  double rmse = 0.0;
  double mae = 0.0;
};

struct WeightSearchResult {
  FusionSpec best;
  WeightSearchRow best_row;
  std::vector<WeightSearchRow> table;
};

namespace detail {

inline void enumerate_simplex(std::size_t modalities, std::size_t steps,
                              std::vector<std::size_t>& current,
                              std::vector<std::vector<std::size_t>>& out) {
  if (current.size() + 1 == modalities) {
    std::size_t used = 0;
    for (std::size_t v : current) used += v;
    current.push_back(steps - used);
    out.push_back(current);
    current.pop_back();
    return;
  }
  std::size_t used = 0;
  for (std::size_t v : current) used += v;
  for (std::size_t v = 0; v + used <= steps; ++v) {
    current.push_back(v);
    enumerate_simplex(modalities, steps, current, out);
    current.pop_back();
  }
}

}  // namespace detail

/// Exhaustive weighted-mean search over the simplex at grid_step
/// resolution. Best = lowest RMSE; ties break to lowest MAE, then to the
/// lexicographically smallest weight vector.
inline WeightSearchResult weight_search(const std::vector<PredictionSet>& predictions,
                                        const std::map<std::string, Phq8Labels>& truth,
                                        double grid_step = 0.1) {
  if (predictions.size() < 2) throw ValidationError("weight_search: need at least two modalities");
  if (grid_step <= 0.0 || grid_step > 1.0) throw ValidationError("weight_search: grid_step outside (0,1]");
  detail::require_same_sessions(predictions);

  const auto steps = static_cast<std::size_t>(std::lround(1.0 / grid_step));
  std::vector<std::vector<std::size_t>> combos;
  std::vector<std::size_t> current;
  detail::enumerate_simplex(predictions.size(), steps, current, combos);

  WeightSearchResult res;
  bool have_best = false;
  for (const auto& combo : combos) {
    FusionSpec spec;
    spec.strategy = FusionStrategy::WeightedMean;
    WeightSearchRow row;
    double wsum = 0.0;
    for (std::size_t m = 0; m < predictions.size(); ++m) {
      double w = static_cast<double>(combo[m]) / static_cast<double>(steps);
      if (m + 1 == predictions.size()) w = 1.0 - wsum;  // exact simplex closure
      wsum += w;
      spec.weights[predictions[m].modality] = w;
      row.weights.push_back(w);
    }
    const auto report = evaluate(fuse(predictions, spec), truth);
    row.rmse = report.rmse;
    row.mae = report.mae;
    res.table.push_back(row);

    const bool better = !have_best || row.rmse < res.best_row.rmse ||
                        (row.rmse == res.best_row.rmse &&
                         (row.mae < res.best_row.mae ||
                          (row.mae == res.best_row.mae && row.weights < res.best_row.weights)));
    if (better) {
      res.best = spec;
      res.best_row = row;
      have_best = true;
    }
  }
  return res;
}

}  // namespace dsr
