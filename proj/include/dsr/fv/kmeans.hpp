#pragma once

#include <cmath>
#include <limits>
#include <vector>

#include "dsr/common.hpp"
#include "dsr/matrix.hpp"

namespace dsr {

struct KmeansResult {
  Matrix centroids;                    // K x D
  std::vector<std::size_t> assignments;  // per point
  std::size_t iterations = 0;
};

/// Lloyd's algorithm with k-means++ seeding. Deterministic given seed;
/// empty clusters are re-seeded to the point farthest from its centroid;
/// stops when assignments are stable or after max_iter sweeps.
inline KmeansResult kmeans(const Matrix& points, std::size_t k, std::uint64_t seed,
                           std::size_t max_iter = 300) {
  const std::size_t n = points.rows, d = points.cols;
  if (k == 0) throw ValidationError("kmeans: k must be >= 1");
  if (n < k) throw ValidationError("kmeans: fewer points (" + std::to_string(n) + ") than clusters (" +
                                   std::to_string(k) + ")");
  for (double v : points.data)
    if (!std::isfinite(v)) throw ValidationError("kmeans: non-finite input");

  Rng rng(seed);
  KmeansResult res;
  res.centroids = Matrix(k, d);
  res.assignments.assign(n, 0);

  // k-means++ seeding.
  std::vector<double> dist2(n, std::numeric_limits<double>::infinity());
  std::size_t first = static_cast<std::size_t>(rng.uniform_index(n));
  for (std::size_t c = 0; c < d; ++c) res.centroids.at(0, c) = points.at(first, c);
  for (std::size_t j = 1; j < k; ++j) {
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      dist2[i] = std::min(dist2[i], squared_distance(points.row(i), res.centroids.row(j - 1)));
      total += dist2[i];
    }
    std::size_t pick;
    if (total <= 0.0) {
      pick = static_cast<std::size_t>(rng.uniform_index(n));  // all points coincide
    } else {
      double r = rng.uniform() * total;
      pick = n - 1;
      double acc = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        acc += dist2[i];
        if (acc >= r) {
          pick = i;
          break;
        }
      }
    }
    for (std::size_t c = 0; c < d; ++c) res.centroids.at(j, c) = points.at(pick, c);
  }

  std::vector<std::size_t> counts(k);
  Matrix sums(k, d);
  for (std::size_t iter = 0; iter < max_iter; ++iter) {
    res.iterations = iter + 1;
    bool changed = iter == 0;
    for (std::size_t i = 0; i < n; ++i) {
      std::size_t best = 0;
      double best_d = std::numeric_limits<double>::infinity();
      for (std::size_t j = 0; j < k; ++j) {
        double dd = squared_distance(points.row(i), res.centroids.row(j));
        if (dd < best_d) {
          best_d = dd;
          best = j;
        }
      }
      if (res.assignments[i] != best) changed = true;
      res.assignments[i] = best;
    }
    if (!changed) break;

    counts.assign(k, 0);
    sums.data.assign(sums.data.size(), 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      ++counts[res.assignments[i]];
      auto row = points.row(i);
      for (std::size_t c = 0; c < d; ++c) sums.at(res.assignments[i], c) += row[c];
    }
    for (std::size_t j = 0; j < k; ++j) {
      if (counts[j] > 0) {
        for (std::size_t c = 0; c < d; ++c)
          res.centroids.at(j, c) = sums.at(j, c) / static_cast<double>(counts[j]);
      } else {
        // Re-seed an empty cluster to the point farthest from its centroid.
        std::size_t far = 0;
        double far_d = -1.0;
        for (std::size_t i = 0; i < n; ++i) {
          double dd = squared_distance(points.row(i), res.centroids.row(res.assignments[i]));
          if (dd > far_d) {
            far_d = dd;
            far = i;
          }
        }
        for (std::size_t c = 0; c < d; ++c) res.centroids.at(j, c) = points.at(far, c);
      }
    }
  }
  return res;
}

}  // namespace dsr
