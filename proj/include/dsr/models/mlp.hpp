#pragma once

#include <array>
#include <cmath>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "dsr/common.hpp"
#include "dsr/matrix.hpp"

namespace dsr {

inline constexpr int kMlpFormatVersion = 1;

enum class MlpHead { ItemClassifier, Regression8 };
enum class MlpOptimizer { Adam, Sgd };

struct MlpConfig {
  // Full layer chain including input and output widths; 6 entries matches
  // the default depth used throughout.
  std::vector<std::size_t> layer_sizes;
  // Dropout rate per hidden layer (layer_sizes.size() - 2 entries); active
  // only during training.
  std::vector<double> dropout;
  MlpHead head = MlpHead::Regression8;
  MlpOptimizer optimizer = MlpOptimizer::Adam;
  double learning_rate = 1e-3;  // Adam default; 1e-2 is the SGD default
  double beta1 = 0.9;
  double beta2 = 0.999;
  double adam_eps = 1e-8;
  std::size_t batch_size = 16;
  std::size_t epochs = 200;

  static MlpConfig regression_default(std::size_t input_dim) {
    MlpConfig c;
    c.layer_sizes = {input_dim, 128, 64, 32, 16, 8};
    c.dropout = {0.3, 0.3, 0.25, 0.2};
    return c;
  }

  static MlpConfig classifier_default(std::size_t input_dim) {
    MlpConfig c = regression_default(input_dim);
    c.layer_sizes.back() = 4;
    c.head = MlpHead::ItemClassifier;
    return c;
  }
};

/// Fully connected network, ReLU hidden activations, linear output (the
/// classifier head applies softmax inside the loss).
struct MlpModel {
  MlpConfig config;
  std::vector<Matrix> weights;             // per layer, out x in
  std::vector<std::vector<double>> biases;  // per layer
  std::uint64_t seed = 0;

  std::size_t layer_count() const { return weights.size(); }
  std::size_t output_dim() const { return config.layer_sizes.back(); }
};

namespace detail {

inline void validate_config(const MlpConfig& c) {
  if (c.layer_sizes.size() < 2) throw ValidationError("mlp: need at least input and output layers");
  for (std::size_t s : c.layer_sizes)
    if (s == 0) throw ValidationError("mlp: zero-width layer");
  if (!c.dropout.empty() && c.dropout.size() != c.layer_sizes.size() - 2)
    throw ValidationError("mlp: dropout list must cover every hidden layer");
  for (double p : c.dropout)
    if (p < 0.0 || p >= 1.0) throw ValidationError("mlp: dropout rate outside [0,1)");
  if (c.head == MlpHead::Regression8 && c.layer_sizes.back() != 8)
    throw ValidationError("mlp: regression head requires 8 outputs");
  if (c.head == MlpHead::ItemClassifier && c.layer_sizes.back() != 4)
    throw ValidationError("mlp: item classifier head requires 4 outputs");
}

}  // namespace detail

/// He-initialized network. Heads fix the output width (8 regression /
/// 4 classifier); the gradient-check path accepts any regression-shaped
/// chain whose last width is 8.
inline MlpModel mlp_init(const MlpConfig& config, std::uint64_t seed) {
  detail::validate_config(config);
  MlpModel m;
  m.config = config;
  m.seed = seed;
  Rng rng(derive_seed(seed, "mlp-init"));
  for (std::size_t l = 0; l + 1 < config.layer_sizes.size(); ++l) {
    const std::size_t in = config.layer_sizes[l], out = config.layer_sizes[l + 1];
    Matrix w(out, in);
    const double scale = std::sqrt(2.0 / static_cast<double>(in));
    for (double& v : w.data) v = rng.normal(0.0, scale);
    m.weights.push_back(std::move(w));
    m.biases.emplace_back(out, 0.0);
  }
  return m;
}

/// Deterministic inference forward pass (dropout off). Returns the raw
/// output activations, one row per input row.
inline Matrix mlp_forward(const MlpModel& m, const Matrix& x) {
  if (x.cols != m.config.layer_sizes.front()) throw ValidationError("mlp_forward: input width mismatch");
  Matrix act = x;
  for (std::size_t l = 0; l < m.layer_count(); ++l) {
    const bool last = l + 1 == m.layer_count();
    Matrix next(act.rows, m.weights[l].rows);
    for (std::size_t r = 0; r < act.rows; ++r) {
      for (std::size_t o = 0; o < m.weights[l].rows; ++o) {
        double acc = m.biases[l][o];
        auto wrow = m.weights[l].row(o);
        auto arow = act.row(r);
        for (std::size_t i = 0; i < wrow.size(); ++i) acc += wrow[i] * arow[i];
        next.at(r, o) = last ? acc : std::max(acc, 0.0);
      }
    }
    act = std::move(next);
  }
  return act;
}

struct MlpGradients {
  std::vector<Matrix> weights;
  std::vector<std::vector<double>> biases;
};

/// Mean loss over the batch plus analytic gradients. Classifier head:
/// softmax cross-entropy against integer labels in targets[r][0].
/// Regression head: mean squared error against 8-vectors. Optional dropout
/// masks (one row per hidden layer evaluation) use inverted scaling so
/// inference needs no correction.
inline double mlp_loss_and_gradient(const MlpModel& m, const Matrix& x, const Matrix& targets,
                                    MlpGradients& grads, Rng* dropout_rng = nullptr) {
  const std::size_t n = x.rows;
  if (n == 0) throw ValidationError("mlp: empty batch");
  const std::size_t layers = m.layer_count();

  grads.weights.clear();
  grads.biases.clear();
  for (std::size_t l = 0; l < layers; ++l) {
    grads.weights.emplace_back(m.weights[l].rows, m.weights[l].cols);
    grads.biases.emplace_back(m.biases[l].size(), 0.0);
  }

  // Forward with cached activations.
  std::vector<Matrix> acts;  // acts[0] = input, acts[l+1] = layer l output
  acts.push_back(x);
  std::vector<Matrix> masks(layers);  // inverted-dropout multipliers on hidden outputs
  for (std::size_t l = 0; l < layers; ++l) {
    const bool last = l + 1 == layers;
    const Matrix& in = acts.back();
    Matrix out(n, m.weights[l].rows);
    for (std::size_t r = 0; r < n; ++r)
      for (std::size_t o = 0; o < m.weights[l].rows; ++o) {
        double acc = m.biases[l][o];
        auto wrow = m.weights[l].row(o);
        auto arow = in.row(r);
        for (std::size_t i = 0; i < wrow.size(); ++i) acc += wrow[i] * arow[i];
        out.at(r, o) = last ? acc : std::max(acc, 0.0);
      }
    if (!last && dropout_rng && !m.config.dropout.empty() && m.config.dropout[l] > 0.0) {
      const double p = m.config.dropout[l];
      masks[l] = Matrix(n, out.cols);
      for (std::size_t r = 0; r < n; ++r)
        for (std::size_t c = 0; c < out.cols; ++c) {
          const double keep = dropout_rng->uniform() >= p ? 1.0 / (1.0 - p) : 0.0;
          masks[l].at(r, c) = keep;
          out.at(r, c) *= keep;
        }
    }
    acts.push_back(std::move(out));
  }

  // Loss and output-layer delta.
  const Matrix& out = acts.back();
  Matrix delta(n, out.cols);
  double loss = 0.0;
  const auto nd = static_cast<double>(n);
  if (m.config.head == MlpHead::ItemClassifier) {
    for (std::size_t r = 0; r < n; ++r) {
      const int label = static_cast<int>(targets.at(r, 0));
      if (label < 0 || label >= static_cast<int>(out.cols))
        throw ValidationError("mlp: class label out of range");
      double mx = out.at(r, 0);
      for (std::size_t c = 1; c < out.cols; ++c) mx = std::max(mx, out.at(r, c));
      double z = 0.0;
      for (std::size_t c = 0; c < out.cols; ++c) z += std::exp(out.at(r, c) - mx);
      loss += -(out.at(r, static_cast<std::size_t>(label)) - mx - std::log(z)) / nd;
      for (std::size_t c = 0; c < out.cols; ++c) {
        const double p = std::exp(out.at(r, c) - mx) / z;
        delta.at(r, c) = (p - (static_cast<int>(c) == label ? 1.0 : 0.0)) / nd;
      }
    }
  } else {
    if (targets.cols != out.cols) throw ValidationError("mlp: regression target width mismatch");
    const auto denom = nd * static_cast<double>(out.cols);
    for (std::size_t r = 0; r < n; ++r)
      for (std::size_t c = 0; c < out.cols; ++c) {
        const double diff = out.at(r, c) - targets.at(r, c);
        loss += diff * diff / denom;
        delta.at(r, c) = 2.0 * diff / denom;
      }
  }
  if (!std::isfinite(loss)) throw NumericError("mlp: non-finite loss");

  // Backward.
  for (std::size_t li = layers; li-- > 0;) {
    const Matrix& in = acts[li];
    for (std::size_t r = 0; r < n; ++r)
      for (std::size_t o = 0; o < delta.cols; ++o) {
        const double d = delta.at(r, o);
        if (d == 0.0) continue;
        grads.biases[li][o] += d;
        auto grow = grads.weights[li].row(o);
        auto arow = in.row(r);
        for (std::size_t i = 0; i < grow.size(); ++i) grow[i] += d * arow[i];
      }
    if (li == 0) break;
    Matrix prev_delta(n, m.weights[li].cols);
    for (std::size_t r = 0; r < n; ++r)
      for (std::size_t i = 0; i < prev_delta.cols; ++i) {
        double acc = 0.0;
        for (std::size_t o = 0; o < delta.cols; ++o) acc += m.weights[li].at(o, i) * delta.at(r, o);
        // Through dropout then ReLU of the previous layer.
        if (masks[li - 1].rows > 0) acc *= masks[li - 1].at(r, i);
        if (acts[li].at(r, i) <= 0.0) acc = 0.0;
        prev_delta.at(r, i) = acc;
      }
    delta = std::move(prev_delta);
  }
  return loss;
}

struct MlpTrainReport {
  std::vector<double> epoch_losses;
};

/// Mini-batch training with Adam (default) or SGD and seeded dropout
/// masks. Classifier targets: one label per row in column 0; regression
/// targets: 8 columns.
inline MlpTrainReport mlp_train(MlpModel& model, const Matrix& x, const Matrix& targets) {
  if (x.rows != targets.rows) throw ValidationError("mlp_train: input/target row mismatch");
  const MlpConfig& cfg = model.config;
  Rng order_rng(derive_seed(model.seed, "mlp-batch"));
  Rng dropout_rng(derive_seed(model.seed, "mlp-dropout"));

  // Adam moments, laid out like the parameters.
  std::vector<Matrix> mw, vw;
  std::vector<std::vector<double>> mb, vb;
  for (std::size_t l = 0; l < model.layer_count(); ++l) {
    mw.emplace_back(model.weights[l].rows, model.weights[l].cols);
    vw.emplace_back(model.weights[l].rows, model.weights[l].cols);
    mb.emplace_back(model.biases[l].size(), 0.0);
    vb.emplace_back(model.biases[l].size(), 0.0);
  }

  MlpTrainReport report;
  MlpGradients grads;
  std::size_t step = 0;
  std::vector<std::size_t> order(x.rows);
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    order_rng.shuffle(order);
    double epoch_loss = 0.0;
    std::size_t batches = 0;
    for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
      const std::size_t end = std::min(start + cfg.batch_size, order.size());
      Matrix bx(end - start, x.cols), bt(end - start, targets.cols);
      for (std::size_t i = start; i < end; ++i) {
        for (std::size_t c = 0; c < x.cols; ++c) bx.at(i - start, c) = x.at(order[i], c);
        for (std::size_t c = 0; c < targets.cols; ++c) bt.at(i - start, c) = targets.at(order[i], c);
      }
      const bool use_dropout =
          !cfg.dropout.empty() &&
          std::any_of(cfg.dropout.begin(), cfg.dropout.end(), [](double p) { return p > 0.0; });
      epoch_loss += mlp_loss_and_gradient(model, bx, bt, grads, use_dropout ? &dropout_rng : nullptr);
      ++batches;
      ++step;

      auto update = [&](double& param, double g, double& m1, double& m2) {
        if (cfg.optimizer == MlpOptimizer::Sgd) {
          param -= cfg.learning_rate * g;
          return;
        }
        m1 = cfg.beta1 * m1 + (1.0 - cfg.beta1) * g;
        m2 = cfg.beta2 * m2 + (1.0 - cfg.beta2) * g * g;
        const double mhat = m1 / (1.0 - std::pow(cfg.beta1, static_cast<double>(step)));
        const double vhat = m2 / (1.0 - std::pow(cfg.beta2, static_cast<double>(step)));
        param -= cfg.learning_rate * mhat / (std::sqrt(vhat) + cfg.adam_eps);
      };
      for (std::size_t l = 0; l < model.layer_count(); ++l) {
        for (std::size_t i = 0; i < model.weights[l].data.size(); ++i)
          update(model.weights[l].data[i], grads.weights[l].data[i], mw[l].data[i], vw[l].data[i]);
        for (std::size_t i = 0; i < model.biases[l].size(); ++i)
          update(model.biases[l][i], grads.biases[l][i], mb[l][i], vb[l][i]);
      }
    }
    report.epoch_losses.push_back(epoch_loss / static_cast<double>(std::max<std::size_t>(batches, 1)));
  }
  return report;
}

/// Regression-head outputs rounded to the nearest integer and clipped to
/// [0,3] per item.
inline std::array<int, 8> phq8_items_from_regression(std::span<const double> outputs) {
  if (outputs.size() != 8) throw ValidationError("expected 8 regression outputs");
  std::array<int, 8> items{};
  for (std::size_t i = 0; i < 8; ++i)
    items[i] = std::clamp(static_cast<int>(std::lround(outputs[i])), 0, 3);
  return items;
}

/// Per-row PHQ-8 totals from a regression-head network: round, clip, sum.
inline std::vector<int> mlp_predict_totals(const MlpModel& model, const Matrix& x) {
  if (model.config.head != MlpHead::Regression8)
    throw ValidationError("mlp_predict_totals: regression head required");
  const Matrix out = mlp_forward(model, x);
  std::vector<int> totals(out.rows);
  for (std::size_t r = 0; r < out.rows; ++r) {
    const auto items = phq8_items_from_regression(out.row(r));
    int total = 0;
    for (int v : items) total += v;
    totals[r] = total;
  }
  return totals;
}

/// Classifier-head item predictions (argmax over the 4 logits; ties to the
/// smaller label).
inline std::vector<int> mlp_predict_labels(const MlpModel& model, const Matrix& x) {
  if (model.config.head != MlpHead::ItemClassifier)
    throw ValidationError("mlp_predict_labels: classifier head required");
  const Matrix out = mlp_forward(model, x);
  std::vector<int> labels(out.rows);
  for (std::size_t r = 0; r < out.rows; ++r) {
    std::size_t best = 0;
    for (std::size_t c = 1; c < out.cols; ++c)
      if (out.at(r, c) > out.at(r, best)) best = c;
    labels[r] = static_cast<int>(best);
  }
  return labels;
}

inline nlohmann::json to_json(const MlpModel& m) {
  nlohmann::json j;
  j["format_version"] = kMlpFormatVersion;
  j["layer_sizes"] = m.config.layer_sizes;
  j["dropout"] = m.config.dropout;
  j["head"] = m.config.head == MlpHead::Regression8 ? "regression8" : "item_classifier";
  j["optimizer"] = m.config.optimizer == MlpOptimizer::Adam ? "adam" : "sgd";
  j["learning_rate"] = m.config.learning_rate;
  j["seed"] = m.seed;
  j["weights"] = nlohmann::json::array();
  j["biases"] = nlohmann::json::array();
  for (const auto& w : m.weights)
    j["weights"].push_back({{"rows", w.rows}, {"cols", w.cols}, {"data", w.data}});
  for (const auto& b : m.biases) j["biases"].push_back(b);
  return j;
}

inline MlpModel mlp_from_json(const nlohmann::json& j) {
  if (j.at("format_version").get<int>() != kMlpFormatVersion)
    throw ParseError("unsupported MLP format_version");
  MlpConfig cfg;
  cfg.layer_sizes = j.at("layer_sizes").get<std::vector<std::size_t>>();
  cfg.dropout = j.at("dropout").get<std::vector<double>>();
  cfg.head = j.at("head").get<std::string>() == "regression8" ? MlpHead::Regression8
                                                              : MlpHead::ItemClassifier;
  cfg.optimizer = j.at("optimizer").get<std::string>() == "adam" ? MlpOptimizer::Adam
                                                                 : MlpOptimizer::Sgd;
  cfg.learning_rate = j.at("learning_rate").get<double>();
  MlpModel m;
  m.config = cfg;
  m.seed = j.at("seed").get<std::uint64_t>();
  for (const auto& w : j.at("weights")) {
    Matrix mat;
    mat.rows = w.at("rows").get<std::size_t>();
    mat.cols = w.at("cols").get<std::size_t>();
    mat.data = w.at("data").get<std::vector<double>>();
    m.weights.push_back(std::move(mat));
  }
  for (const auto& b : j.at("biases")) m.biases.push_back(b.get<std::vector<double>>());
  return m;
}

}  // namespace dsr
