#include <catch2/catch_amalgamated.hpp>

#include <algorithm>

#include "dsr/fv/fisher.hpp"
#include "dsr/fv/gmm.hpp"
#include "test_util.hpp"

using namespace dsr;
using namespace dsr::testutil;

namespace {

GmmModel make_mixture(std::size_t k, std::size_t d) {
  GmmModel m;
  m.k = k;
  m.d = d;
  m.weights.assign(k, 1.0 / static_cast<double>(k));
  m.means = Matrix(k, d);
  m.variances = Matrix(k, d, 1.0);
  for (std::size_t j = 0; j < k; ++j)
    for (std::size_t c = 0; c < d; ++c) m.means.at(j, c) = static_cast<double>(j) * 10.0;
  return m;
}

}  // namespace

TEST_CASE("k=1 EM reduces to the sample mean and population variance") {
  Rng rng(1);
  Matrix pts(500, 3);
  for (double& v : pts.data) v = rng.normal(2.0, 3.0);
  auto m = gmm_fit(pts, 1, 0);
  REQUIRE(m.k == 1);
  CHECK(m.weights[0] == Catch::Approx(1.0));
  for (std::size_t c = 0; c < 3; ++c) {
    double mean = 0.0;
    for (std::size_t r = 0; r < pts.rows; ++r) mean += pts.at(r, c);
    mean /= static_cast<double>(pts.rows);
    double var = 0.0;
    for (std::size_t r = 0; r < pts.rows; ++r) var += (pts.at(r, c) - mean) * (pts.at(r, c) - mean);
    var /= static_cast<double>(pts.rows);
    CHECK(m.means.at(0, c) == Catch::Approx(mean).margin(1e-9));
    CHECK(m.variances.at(0, c) == Catch::Approx(var).epsilon(1e-9));
  }
}

TEST_CASE("log-likelihood is non-decreasing") {
  Rng rng(2);
  Matrix pts(2000, 10);
  for (double& v : pts.data) v = rng.normal(0.0, 1.0) + (rng.uniform() < 0.5 ? 3.0 : -3.0);
  auto m = gmm_fit(pts, 8, 7);
  REQUIRE(m.log_likelihoods.size() >= 2);
  for (std::size_t i = 1; i < m.log_likelihoods.size(); ++i)
    CHECK(m.log_likelihoods[i] >= m.log_likelihoods[i - 1] - 1e-9);
}

TEST_CASE("3-component 2-D mixture recovery") {
  auto truth = make_mixture(3, 2);
  truth.means.at(0, 0) = 0.0;  truth.means.at(0, 1) = 0.0;
  truth.means.at(1, 0) = 8.0;  truth.means.at(1, 1) = 0.0;
  truth.means.at(2, 0) = 4.0;  truth.means.at(2, 1) = 7.0;
  for (double& v : truth.variances.data) v = 0.5;

  int successes = 0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto pts = sample_from_gmm(truth, 10000, 1000 + seed);
    const auto fit = gmm_fit(pts, 3, seed);
    // Best-permutation matching of recovered means to truth.
    std::array<std::size_t, 3> perm = {0, 1, 2};
    double best = 1e300;
    std::sort(perm.begin(), perm.end());
    do {
      double worst = 0.0;
      for (std::size_t j = 0; j < 3; ++j)
        worst = std::max(worst, std::sqrt(squared_distance(fit.means.row(perm[j]), truth.means.row(j))));
      best = std::min(best, worst);
    } while (std::next_permutation(perm.begin(), perm.end()));
    if (best < 0.1) ++successes;
  }
  CHECK(successes >= 9);
}

TEST_CASE("posteriors normalize and concentrate") {
  auto m = make_mixture(4, 3);
  SECTION("k=1") {
    auto m1 = make_mixture(1, 3);
    auto p = posteriors(m1, std::vector<double>{1.0, 2.0, 3.0});
    REQUIRE(p.size() == 1);
    CHECK(p[0] == 1.0);
  }
  SECTION("point at a far-separated mean") {
    std::vector<double> x(3, 10.0);  // exactly mu_1
    auto p = posteriors(m, x);
    CHECK(p[1] > 0.999);
  }
  SECTION("rows sum to one") {
    Rng rng(3);
    for (int i = 0; i < 1000; ++i) {
      std::vector<double> x(3);
      for (double& v : x) v = rng.uniform(-20.0, 50.0);
      auto p = posteriors(m, x);
      double s = 0.0;
      for (double v : p) s += v;
      CHECK(std::abs(s - 1.0) < 1e-12);
    }
  }
}

TEST_CASE("variance floor prevents collapse on duplicated points") {
  Matrix pts(100, 2);
  for (std::size_t i = 0; i < 50; ++i) {
    pts.at(i, 0) = 1.0;
    pts.at(i, 1) = 1.0;
    pts.at(50 + i, 0) = 5.0;
    pts.at(50 + i, 1) = 5.0;
  }
  auto m = gmm_fit(pts, 2, 0);
  for (double v : m.variances.data) CHECK(v > 0.0);
  double wsum = 0.0;
  for (double w : m.weights) {
    CHECK(w > 0.0);
    wsum += w;
  }
  CHECK(std::abs(wsum - 1.0) < 1e-9);
}

TEST_CASE("GMM serialization round trip") {
  Rng rng(5);
  Matrix pts(200, 4);
  for (double& v : pts.data) v = rng.normal(0.0, 1.0);
  auto m = gmm_fit(pts, 4, 9);
  TempDir dir("gmm");
  save_gmm(dir.file("m.json"), m);
  auto loaded = load_gmm(dir.file("m.json"));
  CHECK(loaded.k == m.k);
  CHECK(loaded.weights == m.weights);
  CHECK(loaded.means.data == m.means.data);
  CHECK(loaded.variances.data == m.variances.data);
}
