#pragma once

#include <cmath>
#include <fstream>
#include <limits>
#include <string>
#include <vector>

#include <json.hpp>

#include "dsr/common.hpp"
#include "dsr/fv/kmeans.hpp"
#include "dsr/matrix.hpp"

namespace dsr {

inline constexpr int kGmmFormatVersion = 1;

/// Diagonal-covariance Gaussian mixture.
struct GmmModel {
  std::size_t k = 0;
  std::size_t d = 0;
  std::vector<double> weights;  // K, sum to 1
  Matrix means;                 // K x D
  Matrix variances;             // K x D, >= floor
  double variance_floor_factor = 1e-6;
  std::uint64_t seed = 0;
  std::vector<double> log_likelihoods;  // per EM iteration, mean per point
};

namespace detail {

inline double log_sum_exp(std::span<const double> v) {
  double mx = -std::numeric_limits<double>::infinity();
  for (double x : v) mx = std::max(mx, x);
  if (!std::isfinite(mx)) return mx;
  double acc = 0.0;
  for (double x : v) acc += std::exp(x - mx);
  return mx + std::log(acc);
}

// log N(x; mu_k, diag(var_k)) + log w_k for all components.
inline void component_log_joint(const GmmModel& m, std::span<const double> x, std::vector<double>& out) {
  out.resize(m.k);
  for (std::size_t j = 0; j < m.k; ++j) {
    double acc = std::log(m.weights[j]) - 0.5 * static_cast<double>(m.d) * std::log(2.0 * M_PI);
    auto mu = m.means.row(j);
    auto var = m.variances.row(j);
    for (std::size_t c = 0; c < m.d; ++c) {
      const double diff = x[c] - mu[c];
      acc -= 0.5 * (std::log(var[c]) + diff * diff / var[c]);
    }
    out[j] = acc;
  }
}

}  // namespace detail

/// Responsibilities of every component for one point, computed in
/// log-space so they sum to exactly 1 even for far-out points.
inline std::vector<double> posteriors(const GmmModel& model, std::span<const double> x) {
  std::vector<double> lj;
  detail::component_log_joint(model, x, lj);
  const double lse = detail::log_sum_exp(lj);
  std::vector<double> out(model.k);
  for (std::size_t j = 0; j < model.k; ++j) out[j] = std::exp(lj[j] - lse);
  return out;
}

/// Mean per-point log-likelihood of a dataset under the model.
inline double log_likelihood(const GmmModel& model, const Matrix& points) {
  std::vector<double> lj;
  double acc = 0.0;
  for (std::size_t i = 0; i < points.rows; ++i) {
    detail::component_log_joint(model, points.row(i), lj);
    acc += detail::log_sum_exp(lj);
  }
  return acc / static_cast<double>(points.rows);
}

/// Fits a diagonal GMM by EM, initialized from k-means (means from
/// centroids, weights from cluster fractions, variances from within-cluster
/// spread). Variances are floored at floor_factor x per-dimension data
/// variance. Stops on relative log-likelihood improvement < tol or
/// max_iter.
inline GmmModel gmm_fit(const Matrix& points, std::size_t k, std::uint64_t seed,
                        std::size_t max_iter = 100, double tol = 1e-6,
                        double floor_factor = 1e-6) {
  const std::size_t n = points.rows, d = points.cols;
  if (n < k) throw ValidationError("gmm_fit: fewer points than components");

  // Per-dimension data variance (population form) sets the floor scale.
  std::vector<double> floor(d);
  for (std::size_t c = 0; c < d; ++c) {
    double mean = 0.0;
    for (std::size_t i = 0; i < n; ++i) mean += points.at(i, c);
    mean /= static_cast<double>(n);
    double var = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double diff = points.at(i, c) - mean;
      var += diff * diff;
    }
    var /= static_cast<double>(n);
    floor[c] = std::max(floor_factor * var, 1e-12);
  }

  GmmModel m;
  m.k = k;
  m.d = d;
  m.seed = seed;
  m.variance_floor_factor = floor_factor;
  m.weights.assign(k, 1.0 / static_cast<double>(k));
  m.variances = Matrix(k, d);

  const auto km = kmeans(points, k, seed);
  m.means = km.centroids;
  {
    std::vector<std::size_t> counts(k, 0);
    for (std::size_t a : km.assignments) ++counts[a];
    for (std::size_t i = 0; i < n; ++i) {
      auto row = points.row(i);
      auto mu = m.means.row(km.assignments[i]);
      for (std::size_t c = 0; c < d; ++c) {
        const double diff = row[c] - mu[c];
        m.variances.at(km.assignments[i], c) += diff * diff;
      }
    }
    for (std::size_t j = 0; j < k; ++j) {
      m.weights[j] = std::max(static_cast<double>(counts[j]), 1.0) / static_cast<double>(n);
      for (std::size_t c = 0; c < d; ++c) {
        double v = counts[j] > 0 ? m.variances.at(j, c) / static_cast<double>(counts[j]) : 0.0;
        m.variances.at(j, c) = std::max(v, floor[c]);
      }
    }
    double wsum = 0.0;
    for (double w : m.weights) wsum += w;
    for (double& w : m.weights) w /= wsum;
  }

  // EM.
  Matrix resp(n, k);
  std::vector<double> lj;
  double prev_ll = -std::numeric_limits<double>::infinity();
  for (std::size_t iter = 0; iter < max_iter; ++iter) {
    // E-step.
    double ll = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      detail::component_log_joint(m, points.row(i), lj);
      const double lse = detail::log_sum_exp(lj);
      ll += lse;
      for (std::size_t j = 0; j < k; ++j) resp.at(i, j) = std::exp(lj[j] - lse);
    }
    ll /= static_cast<double>(n);
    if (std::isnan(ll)) throw NumericError("gmm_fit: NaN log-likelihood");
    m.log_likelihoods.push_back(ll);

    const double rel = std::abs(ll - prev_ll) / std::max(std::abs(prev_ll), 1.0);
    if (iter > 0 && rel < tol) break;
    prev_ll = ll;

    // M-step.
    for (std::size_t j = 0; j < k; ++j) {
      double nk = 0.0;
      for (std::size_t i = 0; i < n; ++i) nk += resp.at(i, j);
      std::vector<double> mu(d, 0.0), var(d, 0.0);
      if (nk > 0.0) {
        for (std::size_t i = 0; i < n; ++i) {
          auto row = points.row(i);
          const double r = resp.at(i, j);
          for (std::size_t c = 0; c < d; ++c) mu[c] += r * row[c];
        }
        for (std::size_t c = 0; c < d; ++c) mu[c] /= nk;
        for (std::size_t i = 0; i < n; ++i) {
          auto row = points.row(i);
          const double r = resp.at(i, j);
          for (std::size_t c = 0; c < d; ++c) {
            const double diff = row[c] - mu[c];
            var[c] += r * diff * diff;
          }
        }
        for (std::size_t c = 0; c < d; ++c) var[c] /= nk;
      } else {
        for (std::size_t c = 0; c < d; ++c) {
          mu[c] = m.means.at(j, c);
          var[c] = m.variances.at(j, c);
        }
      }
      m.weights[j] = std::max(nk / static_cast<double>(n), 1e-12);
      for (std::size_t c = 0; c < d; ++c) {
        m.means.at(j, c) = mu[c];
        m.variances.at(j, c) = std::max(var[c], floor[c]);
      }
    }
    double wsum = 0.0;
    for (double w : m.weights) wsum += w;
    for (double& w : m.weights) w /= wsum;
  }
  return m;
}

inline nlohmann::json to_json(const GmmModel& m) {
  nlohmann::json j;
  j["format_version"] = kGmmFormatVersion;
  j["k"] = m.k;
  j["d"] = m.d;
  j["weights"] = m.weights;
  j["means"] = m.means.data;
  j["variances"] = m.variances.data;
  j["variance_floor_factor"] = m.variance_floor_factor;
  j["seed"] = m.seed;
  return j;
}

inline GmmModel gmm_from_json(const nlohmann::json& j) {
  GmmModel m;
  if (j.at("format_version").get<int>() != kGmmFormatVersion)
    throw ParseError("unsupported GMM format_version");
  m.k = j.at("k").get<std::size_t>();
  m.d = j.at("d").get<std::size_t>();
  m.weights = j.at("weights").get<std::vector<double>>();
  m.means = Matrix(m.k, m.d);
  m.means.data = j.at("means").get<std::vector<double>>();
  m.variances = Matrix(m.k, m.d);
  m.variances.data = j.at("variances").get<std::vector<double>>();
  m.variance_floor_factor = j.at("variance_floor_factor").get<double>();
  m.seed = j.at("seed").get<std::uint64_t>();
  if (m.weights.size() != m.k || m.means.data.size() != m.k * m.d || m.variances.data.size() != m.k * m.d)
    throw ParseError("GMM document has inconsistent dimensions");
  return m;
}

inline void save_gmm(const std::string& path, const GmmModel& m) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  out << to_json(m).dump(2) << "\n";
}

inline GmmModel load_gmm(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  nlohmann::json j;
  in >> j;
  return gmm_from_json(j);
}

}  // namespace dsr
