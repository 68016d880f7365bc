#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "dsr/models/svm.hpp"

namespace dsr {

struct GridCell {
  KernelKind kernel = KernelKind::Rbf;
  int c_exp = 0;      // C = 2^c_exp
  int gamma_exp = 0;  // gamma = 2^gamma_exp (ignored for linear)
  double cv_accuracy = 0.0;
};

struct GridSearchResult {
  GridCell best;
  std::vector<GridCell> table;
  bool stratified = true;  // false when a class is rarer than the fold count
};

struct GridSpec {
  std::vector<int> c_exponents;
  std::vector<int> gamma_exponents;
  std::vector<KernelKind> kernels = {KernelKind::Linear, KernelKind::Rbf};

  static GridSpec defaults() {
    GridSpec g;
    for (int c = -5; c <= 15; ++c) g.c_exponents.push_back(c);
    for (int e = -15; e <= 3; ++e) g.gamma_exponents.push_back(e);
    return g;
  }
};

namespace detail {

/// Stratified fold assignment: shuffle within each class, deal round-robin.
/// Falls back to plain shuffled folds when some class is rarer than the
/// fold count.
inline std::vector<std::size_t> fold_assignment(const std::vector<int>& labels, std::size_t folds,
                                                std::uint64_t seed, bool& stratified) {
  std::map<int, std::vector<std::size_t>> by_class;
  for (std::size_t i = 0; i < labels.size(); ++i) by_class[labels[i]].push_back(i);
  stratified = std::all_of(by_class.begin(), by_class.end(),
                           [&](const auto& kv) { return kv.second.size() >= folds; });

  Rng rng(derive_seed(seed, "cv-folds"));
  std::vector<std::size_t> assignment(labels.size());
  if (stratified) {
    for (auto& [cls, idx] : by_class) {
      rng.shuffle(idx);
      for (std::size_t i = 0; i < idx.size(); ++i) assignment[idx[i]] = i % folds;
    }
  } else {
    std::vector<std::size_t> idx(labels.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    rng.shuffle(idx);
    for (std::size_t i = 0; i < idx.size(); ++i) assignment[idx[i]] = i % folds;
  }
  return assignment;
}

}  // namespace detail

/// 5-fold (by default) cross-validated grid search over cost/gamma
/// exponents and kernels. Best cell = highest mean held-out accuracy; ties
/// break toward the smaller cost exponent, then the smaller gamma exponent,
/// then the earlier kernel in the grid.
inline GridSearchResult grid_search_cv(const Matrix& x, const std::vector<int>& labels,
                                       const GridSpec& grid = GridSpec::defaults(),
                                       std::size_t folds = 5, std::uint64_t seed = 0) {
  if (folds < 2) throw ValidationError("grid_search_cv: folds must be >= 2");
  if (x.rows < folds) throw ValidationError("grid_search_cv: fewer rows than folds");
  if (grid.c_exponents.empty() || grid.kernels.empty())
    throw ValidationError("grid_search_cv: empty grid");

  GridSearchResult res;
  const auto assignment = detail::fold_assignment(labels, folds, seed, res.stratified);

  bool have_best = false;
  for (KernelKind kind : grid.kernels) {
    const std::vector<int> gammas =
        kind == KernelKind::Linear ? std::vector<int>{0} : grid.gamma_exponents;
    if (gammas.empty()) throw ValidationError("grid_search_cv: empty gamma grid");
    for (int ce : grid.c_exponents) {
      for (int ge : gammas) {
        KernelSpec kernel;
        kernel.kind = kind;
        kernel.gamma = std::exp2(ge);
        const double c_param = std::exp2(ce);

        std::size_t correct = 0, total = 0;
        for (std::size_t fold = 0; fold < folds; ++fold) {
          std::vector<std::vector<double>> train_rows, test_rows;
          std::vector<int> train_y, test_y;
          for (std::size_t i = 0; i < x.rows; ++i) {
            auto row = x.row(i);
            if (assignment[i] == fold) {
              test_rows.emplace_back(row.begin(), row.end());
              test_y.push_back(labels[i]);
            } else {
              train_rows.emplace_back(row.begin(), row.end());
              train_y.push_back(labels[i]);
            }
          }
          if (test_rows.empty() || train_rows.size() < 2) continue;
          const auto model =
              svm_train(Matrix::from_rows(train_rows), train_y, c_param, kernel, seed);
          const auto pred = svm_predict(model, Matrix::from_rows(test_rows));
          for (std::size_t i = 0; i < pred.size(); ++i)
            if (pred[i] == test_y[i]) ++correct;
          total += test_rows.size();
        }

        GridCell cell{kind, ce, ge, total ? static_cast<double>(correct) / static_cast<double>(total) : 0.0};
        res.table.push_back(cell);
        const bool better =
            !have_best || cell.cv_accuracy > res.best.cv_accuracy ||
            (cell.cv_accuracy == res.best.cv_accuracy &&
             (cell.c_exp < res.best.c_exp ||
              (cell.c_exp == res.best.c_exp && cell.gamma_exp < res.best.gamma_exp)));
        if (better) {
          res.best = cell;
          have_best = true;
        }
      }
    }
  }
  return res;
}

}  // namespace dsr
