#pragma once

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <string>
#include <vector>

#include <json.hpp>

#include "dsr/common.hpp"
#include "dsr/matrix.hpp"

namespace dsr {

inline constexpr int kSvmFormatVersion = 1;

enum class KernelKind { Linear, Rbf, Polynomial, Sigmoid };

inline const char* to_string(KernelKind k) {
  switch (k) {
    case KernelKind::Linear: return "linear";
    case KernelKind::Rbf: return "rbf";
    case KernelKind::Polynomial: return "polynomial";
    default: return "sigmoid";
  }
}

inline KernelKind kernel_from_string(const std::string& s) {
  if (s == "linear") return KernelKind::Linear;
  if (s == "rbf") return KernelKind::Rbf;
  if (s == "polynomial") return KernelKind::Polynomial;
  if (s == "sigmoid") return KernelKind::Sigmoid;
  throw ValidationError("unknown kernel '" + s + "'");
}

struct KernelSpec {
  KernelKind kind = KernelKind::Rbf;
  double gamma = 1.0;  // required > 0 for rbf
  double coef0 = 0.0;
  int degree = 3;

  double operator()(std::span<const double> a, std::span<const double> b) const {
    switch (kind) {
      case KernelKind::Linear: {
        double dot = 0.0;
        for (std::size_t i = 0; i < a.size(); ++i) dot += a[i] * b[i];
        return dot;
      }
      case KernelKind::Rbf:
        return std::exp(-gamma * squared_distance(a, b));
      case KernelKind::Polynomial: {
        double dot = 0.0;
        for (std::size_t i = 0; i < a.size(); ++i) dot += a[i] * b[i];
        return std::pow(gamma * dot + coef0, degree);
      }
      default: {
        double dot = 0.0;
        for (std::size_t i = 0; i < a.size(); ++i) dot += a[i] * b[i];
        return std::tanh(gamma * dot + coef0);
      }
    }
  }
};

/// Per-dimension standardization fitted on the training split and applied
/// identically at predict time.
struct Standardizer {
  std::vector<double> mean;
  std::vector<double> stddev;  // zero-variance dimensions get 1

  static Standardizer fit(const Matrix& x) {
    Standardizer s;
    s.mean.assign(x.cols, 0.0);
    s.stddev.assign(x.cols, 0.0);
    for (std::size_t r = 0; r < x.rows; ++r)
      for (std::size_t c = 0; c < x.cols; ++c) s.mean[c] += x.at(r, c);
    for (double& m : s.mean) m /= static_cast<double>(x.rows);
    for (std::size_t r = 0; r < x.rows; ++r)
      for (std::size_t c = 0; c < x.cols; ++c) {
        const double d = x.at(r, c) - s.mean[c];
        s.stddev[c] += d * d;
      }
    for (double& v : s.stddev) {
      v = std::sqrt(v / static_cast<double>(x.rows));
      if (v <= 0.0) v = 1.0;
    }
    return s;
  }

  Matrix apply(const Matrix& x) const {
    Matrix out = x;
    for (std::size_t r = 0; r < x.rows; ++r)
      for (std::size_t c = 0; c < x.cols; ++c) out.at(r, c) = (x.at(r, c) - mean[c]) / stddev[c];
    return out;
  }
};

namespace detail {

/// One-vs-rest binary sub-problem: dual coefficients (alpha_i * y_i) over
/// the stored training points plus a bias.
struct BinarySvm {
  int positive_label = 0;
  std::vector<double> dual_coef;  // aligned with the model's training matrix
  double bias = 0.0;
  double kkt_violation = 0.0;  // m - M at termination
};

/// SMO with maximal-violating-pair working-set selection on the dual
/// problem. Labels are +-1; the kernel matrix is precomputed.
inline BinarySvm smo_solve(const Matrix& kmat, const std::vector<int>& y, double c_param,
                           double tol = 1e-3, std::size_t max_iter = 10'000'000,
                           std::vector<double>* objective_trace = nullptr) {
  const std::size_t n = y.size();
  std::vector<double> alpha(n, 0.0);
  std::vector<double> grad(n, -1.0);  // G_i = (Q alpha)_i - 1

  // Dual objective (maximization form): e'alpha - 1/2 alpha'Q alpha.
  auto objective = [&] {
    double acc = 0.0;
    for (std::size_t t = 0; t < n; ++t) acc += alpha[t] - 0.5 * alpha[t] * (grad[t] + 1.0);
    return acc;
  };

  BinarySvm out;
  double m_up = 0.0, m_low = 0.0;
  for (std::size_t iter = 0; iter < max_iter; ++iter) {
    if (objective_trace) objective_trace->push_back(objective());
    // Maximal violating pair.
    std::size_t i_up = n, i_low = n;
    m_up = -std::numeric_limits<double>::infinity();
    m_low = std::numeric_limits<double>::infinity();
    for (std::size_t t = 0; t < n; ++t) {
      const double v = -static_cast<double>(y[t]) * grad[t];
      const bool in_up = (y[t] > 0 && alpha[t] < c_param) || (y[t] < 0 && alpha[t] > 0.0);
      const bool in_low = (y[t] > 0 && alpha[t] > 0.0) || (y[t] < 0 && alpha[t] < c_param);
      if (in_up && v > m_up) {
        m_up = v;
        i_up = t;
      }
      if (in_low && v < m_low) {
        m_low = v;
        i_low = t;
      }
    }
    if (i_up == n || i_low == n || m_up - m_low <= tol) break;

    const std::size_t i = i_up, j = i_low;
    double quad = kmat.at(i, i) + kmat.at(j, j) - 2.0 * kmat.at(i, j);
    if (quad <= 0.0) quad = 1e-12;
    double step = (m_up - m_low) / quad;

    // Box constraints along the feasible direction.
    double limit_i = y[i] > 0 ? c_param - alpha[i] : alpha[i];
    double limit_j = y[j] > 0 ? alpha[j] : c_param - alpha[j];
    step = std::min({step, limit_i, limit_j});

    const double dai = static_cast<double>(y[i]) * step;
    const double daj = -static_cast<double>(y[j]) * step;
    alpha[i] += dai;
    alpha[j] += daj;
    for (std::size_t t = 0; t < n; ++t)
      grad[t] += static_cast<double>(y[t]) *
                 (kmat.at(t, i) * static_cast<double>(y[i]) * dai +
                  kmat.at(t, j) * static_cast<double>(y[j]) * daj);
  }

  out.kkt_violation = std::max(m_up - m_low, 0.0);
  out.bias = std::isfinite(m_up) && std::isfinite(m_low) ? (m_up + m_low) / 2.0 : 0.0;
  out.dual_coef.resize(n);
  for (std::size_t t = 0; t < n; ++t) out.dual_coef[t] = alpha[t] * static_cast<double>(y[t]);
  return out;
}

}  // namespace detail

/// One-vs-rest multiclass SVM over item labels {0,1,2,3}. A training set
/// with a single distinct label degrades to a constant predictor with the
/// warning flag set.
struct SvmModel {
  KernelSpec kernel;
  double c_param = 1.0;
  Standardizer standardizer;
  Matrix training_points;  // standardized
  std::vector<detail::BinarySvm> machines;
  std::vector<int> class_labels;  // labels seen in training, ascending
  bool constant = false;
  int constant_label = 0;
  bool warning = false;
  std::uint64_t seed = 0;

  double max_kkt_violation() const {
    double v = 0.0;
    for (const auto& m : machines) v = std::max(v, m.kkt_violation);
    return v;
  }
};

inline SvmModel svm_train(const Matrix& x, const std::vector<int>& labels, double c_param,
                          const KernelSpec& kernel, std::uint64_t seed = 0, double tol = 1e-3) {
  if (x.rows < 2 || x.rows != labels.size())
    throw ValidationError("svm_train: need >= 2 rows with matching labels");
  for (double v : x.data)
    if (!std::isfinite(v)) throw ValidationError("svm_train: non-finite feature");
  if (kernel.kind == KernelKind::Rbf && kernel.gamma <= 0.0)
    throw ValidationError("svm_train: rbf gamma must be positive");

  SvmModel model;
  model.kernel = kernel;
  model.c_param = c_param;
  model.seed = seed;
  model.standardizer = Standardizer::fit(x);
  model.training_points = model.standardizer.apply(x);

  std::vector<int> classes(labels);
  std::sort(classes.begin(), classes.end());
  classes.erase(std::unique(classes.begin(), classes.end()), classes.end());
  model.class_labels = classes;

  if (classes.size() < 2) {
    model.constant = true;
    model.constant_label = classes.front();
    model.warning = true;
    return model;
  }

  // Shared kernel matrix across the one-vs-rest sub-problems.
  const std::size_t n = x.rows;
  Matrix kmat(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) {
      const double v = kernel(model.training_points.row(i), model.training_points.row(j));
      kmat.at(i, j) = v;
      kmat.at(j, i) = v;
    }

  for (int cls : classes) {
    std::vector<int> y(n);
    for (std::size_t i = 0; i < n; ++i) y[i] = labels[i] == cls ? 1 : -1;
    auto machine = detail::smo_solve(kmat, y, c_param, tol);
    machine.positive_label = cls;
    model.machines.push_back(std::move(machine));
  }
  return model;
}

/// Raw one-vs-rest decision values, one column per trained class.
inline Matrix svm_decision_values(const SvmModel& model, const Matrix& x) {
  if (x.cols != model.standardizer.mean.size())
    throw ValidationError("svm_predict: feature width mismatch");
  const Matrix xs = model.standardizer.apply(x);
  Matrix out(x.rows, std::max<std::size_t>(model.machines.size(), 1));
  for (std::size_t r = 0; r < xs.rows; ++r) {
    for (std::size_t m = 0; m < model.machines.size(); ++m) {
      double f = -model.machines[m].bias;
      for (std::size_t i = 0; i < model.training_points.rows; ++i) {
        const double coef = model.machines[m].dual_coef[i];
        if (coef == 0.0) continue;
        f += coef * model.kernel(model.training_points.row(i), xs.row(r));
      }
      out.at(r, m) = f;
    }
  }
  return out;
}

/// Argmax over one-vs-rest decision values; exact ties go to the smaller
/// label.
inline std::vector<int> svm_predict(const SvmModel& model, const Matrix& x) {
  if (model.constant) {
    if (x.cols != model.standardizer.mean.size())
      throw ValidationError("svm_predict: feature width mismatch");
    return std::vector<int>(x.rows, model.constant_label);
  }
  const Matrix dv = svm_decision_values(model, x);
  std::vector<int> out(x.rows);
  for (std::size_t r = 0; r < x.rows; ++r) {
    std::size_t best = 0;
    for (std::size_t m = 1; m < model.machines.size(); ++m)
      if (dv.at(r, m) > dv.at(r, best)) best = m;
    out[r] = model.machines[best].positive_label;
  }
  return out;
}

inline nlohmann::json to_json(const SvmModel& m) {
  nlohmann::json j;
  j["format_version"] = kSvmFormatVersion;
  j["kernel"] = {{"kind", to_string(m.kernel.kind)},
                 {"gamma", m.kernel.gamma},
                 {"coef0", m.kernel.coef0},
                 {"degree", m.kernel.degree}};
  j["c"] = m.c_param;
  j["seed"] = m.seed;
  j["standardizer"] = {{"mean", m.standardizer.mean}, {"stddev", m.standardizer.stddev}};
  j["constant"] = m.constant;
  j["constant_label"] = m.constant_label;
  j["warning"] = m.warning;
  j["class_labels"] = m.class_labels;
  j["training_points"] = {{"rows", m.training_points.rows},
                          {"cols", m.training_points.cols},
                          {"data", m.training_points.data}};
  j["machines"] = nlohmann::json::array();
  for (const auto& b : m.machines)
    j["machines"].push_back({{"positive_label", b.positive_label},
                             {"dual_coef", b.dual_coef},
                             {"bias", b.bias},
                             {"kkt_violation", b.kkt_violation}});
  return j;
}

inline SvmModel svm_from_json(const nlohmann::json& j) {
  if (j.at("format_version").get<int>() != kSvmFormatVersion)
    throw ParseError("unsupported SVM format_version");
  SvmModel m;
  m.kernel.kind = kernel_from_string(j.at("kernel").at("kind").get<std::string>());
  m.kernel.gamma = j.at("kernel").at("gamma").get<double>();
  m.kernel.coef0 = j.at("kernel").at("coef0").get<double>();
  m.kernel.degree = j.at("kernel").at("degree").get<int>();
  m.c_param = j.at("c").get<double>();
  m.seed = j.at("seed").get<std::uint64_t>();
  m.standardizer.mean = j.at("standardizer").at("mean").get<std::vector<double>>();
  m.standardizer.stddev = j.at("standardizer").at("stddev").get<std::vector<double>>();
  m.constant = j.at("constant").get<bool>();
  m.constant_label = j.at("constant_label").get<int>();
  m.warning = j.at("warning").get<bool>();
  m.class_labels = j.at("class_labels").get<std::vector<int>>();
  m.training_points.rows = j.at("training_points").at("rows").get<std::size_t>();
  m.training_points.cols = j.at("training_points").at("cols").get<std::size_t>();
  m.training_points.data = j.at("training_points").at("data").get<std::vector<double>>();
  for (const auto& b : j.at("machines")) {
    detail::BinarySvm bm;
    bm.positive_label = b.at("positive_label").get<int>();
    bm.dual_coef = b.at("dual_coef").get<std::vector<double>>();
    bm.bias = b.at("bias").get<double>();
    bm.kkt_violation = b.at("kkt_violation").get<double>();
    m.machines.push_back(std::move(bm));
  }
  return m;
}

}  // namespace dsr
