#pragma once

#include <array>
#include <fstream>
#include <string>
#include <vector>

#include "dsr/corpus/types.hpp"
#include "dsr/models/grid_search.hpp"
#include "dsr/models/svm.hpp"

namespace dsr {

inline constexpr int kEnsembleFormatVersion = 1;

/// Eight independently grid-searched per-item classifiers whose predictions
/// sum to the PHQ-8 total.
struct ItemEnsemble {
  std::array<SvmModel, 8> items;
  std::array<GridCell, 8> chosen_cells;
};

struct EnsembleConfig {
  GridSpec grid = GridSpec::defaults();
  std::size_t folds = 5;
  std::uint64_t seed = 0;
};

inline ItemEnsemble train_item_ensemble(const Matrix& features, const std::vector<Phq8Labels>& labels,
                                        const EnsembleConfig& config = {}) {
  if (features.rows != labels.size()) throw ValidationError("train_item_ensemble: feature/label count mismatch");
  if (features.rows < 2) throw ValidationError("train_item_ensemble: need >= 2 labeled sessions");

  ItemEnsemble ensemble;
  for (std::size_t item = 0; item < 8; ++item) {
    std::vector<int> y(labels.size());
    for (std::size_t i = 0; i < labels.size(); ++i) y[i] = labels[i].items[item];

    std::vector<int> distinct(y);
    std::sort(distinct.begin(), distinct.end());
    distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());

    const std::uint64_t item_seed = derive_seed(config.seed, "item-" + std::to_string(item));
    if (distinct.size() < 2) {
      // Constant item labels: skip the search, fit the degenerate model.
      KernelSpec kernel;
      kernel.kind = KernelKind::Linear;
      ensemble.items[item] = svm_train(features, y, 1.0, kernel, item_seed);
      ensemble.chosen_cells[item] = GridCell{KernelKind::Linear, 0, 0, 1.0};
      continue;
    }
    const auto search = grid_search_cv(features, y, config.grid, config.folds, item_seed);
    KernelSpec kernel;
    kernel.kind = search.best.kernel;
    kernel.gamma = std::exp2(search.best.gamma_exp);
    ensemble.items[item] =
        svm_train(features, y, std::exp2(search.best.c_exp), kernel, item_seed);
    ensemble.chosen_cells[item] = search.best;
  }
  return ensemble;
}

/// Per-item predictions for every row, 8 columns.
inline std::vector<std::array<int, 8>> predict_items(const ItemEnsemble& ensemble, const Matrix& x) {
  std::vector<std::array<int, 8>> out(x.rows);
  for (std::size_t item = 0; item < 8; ++item) {
    const auto pred = svm_predict(ensemble.items[item], x);
    for (std::size_t r = 0; r < x.rows; ++r) out[r][item] = pred[r];
  }
  return out;
}

/// Sum of the eight item predictions, always in [0, 24].
inline std::vector<int> predict_phq8_total(const ItemEnsemble& ensemble, const Matrix& x) {
  const auto items = predict_items(ensemble, x);
  std::vector<int> totals(items.size());
  for (std::size_t r = 0; r < items.size(); ++r) {
    int total = 0;
    for (int v : items[r]) total += v;
    totals[r] = total;
  }
  return totals;
}

inline nlohmann::json to_json(const ItemEnsemble& e) {
  nlohmann::json j;
  j["format_version"] = kEnsembleFormatVersion;
  j["items"] = nlohmann::json::array();
  for (std::size_t i = 0; i < 8; ++i) {
    nlohmann::json item;
    item["name"] = kPhq8ItemNames[i];
    item["model"] = to_json(e.items[i]);
    item["grid_cell"] = {{"kernel", to_string(e.chosen_cells[i].kernel)},
                         {"c_exp", e.chosen_cells[i].c_exp},
                         {"gamma_exp", e.chosen_cells[i].gamma_exp},
                         {"cv_accuracy", e.chosen_cells[i].cv_accuracy}};
    j["items"].push_back(std::move(item));
  }
  return j;
}

inline ItemEnsemble ensemble_from_json(const nlohmann::json& j) {
  if (j.at("format_version").get<int>() != kEnsembleFormatVersion)
    throw ParseError("unsupported ensemble format_version");
  ItemEnsemble e;
  const auto& items = j.at("items");
  if (items.size() != 8) throw ParseError("ensemble must have exactly 8 item models");
  for (std::size_t i = 0; i < 8; ++i) {
    e.items[i] = svm_from_json(items[i].at("model"));
    const auto& cell = items[i].at("grid_cell");
    e.chosen_cells[i] = GridCell{kernel_from_string(cell.at("kernel").get<std::string>()),
                                 cell.at("c_exp").get<int>(), cell.at("gamma_exp").get<int>(),
                                 cell.at("cv_accuracy").get<double>()};
  }
  return e;
}

inline void save_ensemble(const std::string& path, const ItemEnsemble& e) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  out << to_json(e).dump(2) << "\n";
}

inline ItemEnsemble load_ensemble(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  nlohmann::json j;
  in >> j;
  return ensemble_from_json(j);
}

}  // namespace dsr
