#pragma once

#include <cmath>
#include <vector>

#include "dsr/fv/gmm.hpp"
#include "dsr/matrix.hpp"

namespace dsr {

/// Fisher-vector encoding of a descriptor set: mean-gradient block followed
/// by variance-gradient block, 2*K*D values.
struct FisherVector {
  std::vector<double> values;
  bool power_normalized = false;
  bool l2_normalized = false;
};

/// Improved Fisher vector of T descriptors under a GMM. Mean block
/// (1/(T*sqrt(w_k))) * sum_t g_k(x_t) * (x_t - mu_k)/sigma_k; variance block
/// (1/(T*sqrt(2*w_k))) * sum_t g_k(x_t) * ((x_t - mu_k)^2/sigma_k^2 - 1);
/// optional signed square root then L2 normalization (both default on).
inline FisherVector fisher_encode(const GmmModel& model, const Matrix& descriptors,
                                  bool power_norm = true, bool l2_norm = true) {
  if (descriptors.rows == 0) throw ValidationError("fisher_encode: no descriptors");
  if (descriptors.cols != model.d) throw ValidationError("fisher_encode: descriptor dimension mismatch");
  const std::size_t k = model.k, d = model.d, t_count = descriptors.rows;

  FisherVector fv;
  fv.values.assign(2 * k * d, 0.0);
  std::vector<double> lj;
  for (std::size_t t = 0; t < t_count; ++t) {
    auto x = descriptors.row(t);
    detail::component_log_joint(model, x, lj);
    const double lse = detail::log_sum_exp(lj);
    for (std::size_t j = 0; j < k; ++j) {
      const double gamma = std::exp(lj[j] - lse);
      if (gamma == 0.0) continue;
      auto mu = model.means.row(j);
      auto var = model.variances.row(j);
      for (std::size_t c = 0; c < d; ++c) {
        const double z = (x[c] - mu[c]) / std::sqrt(var[c]);
        fv.values[j * d + c] += gamma * z;
        fv.values[k * d + j * d + c] += gamma * (z * z - 1.0);
      }
    }
  }
  const auto tn = static_cast<double>(t_count);
  for (std::size_t j = 0; j < k; ++j) {
    const double mean_scale = 1.0 / (tn * std::sqrt(model.weights[j]));
    const double var_scale = 1.0 / (tn * std::sqrt(2.0 * model.weights[j]));
    for (std::size_t c = 0; c < d; ++c) {
      fv.values[j * d + c] *= mean_scale;
      fv.values[k * d + j * d + c] *= var_scale;
    }
  }

  if (power_norm) {
    for (double& v : fv.values) v = std::copysign(std::sqrt(std::abs(v)), v);
    fv.power_normalized = true;
  }
  if (l2_norm) {
    double norm2 = 0.0;
    for (double v : fv.values) norm2 += v * v;
    if (norm2 > 0.0) {
      const double inv = 1.0 / std::sqrt(norm2);
      for (double& v : fv.values) v *= inv;
    }
    fv.l2_normalized = true;
  }
  return fv;
}

/// Draws n points from the mixture; used for the zero-expectation checks
/// and for synthetic-recovery experiments.
inline Matrix sample_from_gmm(const GmmModel& model, std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  Matrix out(n, model.d);
  for (std::size_t i = 0; i < n; ++i) {
    double r = rng.uniform();
    std::size_t j = model.k - 1;
    double acc = 0.0;
    for (std::size_t c = 0; c < model.k; ++c) {
      acc += model.weights[c];
      if (r < acc) {
        j = c;
        break;
      }
    }
    for (std::size_t c = 0; c < model.d; ++c)
      out.at(i, c) = rng.normal(model.means.at(j, c), std::sqrt(model.variances.at(j, c)));
  }
  return out;
}

}  // namespace dsr
