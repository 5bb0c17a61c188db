#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "epps/paths.hpp"
#include "test_support.hpp"

using namespace epps;

TEST_CASE("bm_increment_cov evaluates (h - m tau)_+") {
  CHECK(bm_increment_cov(5.0, 0, 60.0) == 5.0);
  CHECK(bm_increment_cov(60.0, 1, 60.0) == 0.0);
  CHECK(bm_increment_cov(120.0, 1, 60.0) == 60.0);
}

TEST_CASE("bm_increment_cov rejects bad arguments") {
  CHECK_THROWS_AS((void)bm_increment_cov(5.0, 2, 60.0), std::invalid_argument);
  CHECK_THROWS_AS((void)bm_increment_cov(5.0, -1, 60.0), std::invalid_argument);
  CHECK_THROWS_AS((void)bm_increment_cov(0.0, 0, 60.0), std::invalid_argument);
  CHECK_THROWS_AS((void)bm_increment_cov(5.0, 1, -1.0), std::invalid_argument);
}

TEST_CASE("bm_increment_cov is non-negative and non-decreasing in h") {
  for (const int m : {0, 1}) {
    double prev = 0.0;
    for (double h = 1.0; h <= 200.0; h += 1.0) {
      const double c = bm_increment_cov(h, m, 66.0);
      CHECK(c >= 0.0);
      CHECK(c >= prev);
      prev = c;
    }
  }
}

TEST_CASE("ou_increment_cov closed-form spot values") {
  const double ln2 = std::log(2.0);
  CHECK(ou_increment_cov(ln2, 0, 123.0, {1.0, 1.0}) == doctest::Approx(0.5));
  // at h = tau the formula reduces to -(sigma^2/2 lambda)(1 - e^{-lambda tau})^2
  CHECK(ou_increment_cov(ln2, 1, ln2, {1.0, std::sqrt(2.0)}) ==
        doctest::Approx(-0.25));
}

TEST_CASE("ou_increment_cov with m=0 equals sigma^2/lambda (1 - e^{-lambda h})") {
  const OuParams p{0.2, 1.7};
  for (const double h : {0.5, 3.0, 10.0, 40.0}) {
    const double want = p.sigma * p.sigma / p.lambda * (1.0 - std::exp(-p.lambda * h));
    CHECK(ou_increment_cov(h, 0, 7.0, p) == doctest::Approx(want).epsilon(1e-14));
  }
}

TEST_CASE("ou_increment_cov saturates at sigma^2/lambda for lambda h > 50") {
  const OuParams p{0.5, 1.3};
  const double limit = p.sigma * p.sigma / p.lambda;
  CHECK(std::abs(ou_increment_cov(120.0, 0, 0.0, p) - limit) < 1e-9);
}

TEST_CASE("ou sampling is deterministic per (seed, stream) and streams differ") {
  const OuParams p{0.1, 1.0};
  const PathGrid grid{0.5, 1000, 42, 3};
  const SampledPath a = sample_ou_path(p, grid);
  const SampledPath b = sample_ou_path(p, grid);
  CHECK(a.values == b.values);

  PathGrid other = grid;
  other.stream = 4;
  CHECK(sample_ou_path(p, other).values != a.values);
}

TEST_CASE("ou stationary variance matches sigma^2 / (2 lambda)") {
  // lambda = 0.5, sigma = 1: stationary variance 1.
  const OuParams p{0.5, 1.0};
  const PathGrid grid{1.0, 1'000'000, 7, 0};
  const SampledPath path = sample_ou_path(p, grid);

  double mean = 0.0;
  for (const double v : path.values) mean += v;
  mean /= static_cast<double>(path.values.size());
  double var = 0.0;
  for (const double v : path.values) var += (v - mean) * (v - mean);
  var /= static_cast<double>(path.values.size() - 1);
  CHECK(var == doctest::Approx(1.0).epsilon(0.01));
}

TEST_CASE("ou lag autocorrelation matches e^{-lambda k dt}") {
  const OuParams p{0.03162, 1.0};
  const PathGrid grid{1.0, 1'000'000, 99, 0};
  const SampledPath path = sample_ou_path(p, grid);

  const std::size_t lag = 66;
  std::vector<double> head(path.values.begin(), path.values.end() - lag);
  std::vector<double> tail(path.values.begin() + lag, path.values.end());
  const double got = test_support::pearson_reference(head, tail);
  CHECK(std::abs(got - std::exp(-p.lambda * 66.0)) < 0.01);
  CHECK(std::abs(got - 0.124) < 0.011);
}

TEST_CASE("bm path: zero vol gives the zero path, unit vol unit increment variance") {
  const PathGrid grid{1.0, 1000, 5, 0};
  const SampledPath zero = sample_bm_path(0.0, grid);
  for (const double v : zero.values) CHECK(v == 0.0);

  const PathGrid big{1.0, 1'000'000, 5, 0};
  const SampledPath path = sample_bm_path(1.0, big);
  double s = 0.0, s2 = 0.0;
  for (std::size_t i = 1; i < path.values.size(); ++i) {
    const double d = path.values[i] - path.values[i - 1];
    s += d;
    s2 += d * d;
  }
  const double n = static_cast<double>(path.values.size() - 1);
  const double var = (s2 - s * s / n) / (n - 1.0);
  CHECK(std::abs(var - 1.0) < 0.005);
}

TEST_CASE("bm increment variance scales as vol^2 dt") {
  const PathGrid grid{0.25, 400'000, 8, 1};
  const SampledPath path = sample_bm_path(2.0, grid);
  double s = 0.0, s2 = 0.0;
  for (std::size_t i = 1; i < path.values.size(); ++i) {
    const double d = path.values[i] - path.values[i - 1];
    s += d;
    s2 += d * d;
  }
  const double n = static_cast<double>(path.values.size() - 1);
  const double var = (s2 - s * s / n) / (n - 1.0);
  CHECK(var == doctest::Approx(1.0).epsilon(0.02));  // vol^2 dt = 4 * 0.25
}

TEST_CASE("sampled OU increment covariance matches the closed form within 4 SE") {
  const OuParams p{0.03162, 1.0};
  const double tau = 66.0;
  const std::size_t n_pairs = 1'000'000;
  const std::size_t h = 10, L = 66;

  PathGrid grid{1.0, static_cast<std::int64_t>(n_pairs + h + L), 1234, 0};
  const SampledPath path = sample_ou_path(p, grid);

  std::vector<double> u, v;
  for (const int m : {0, 1}) {
    test_support::increment_pairs(path.values, h, m == 0 ? 0 : L, n_pairs, u, v);
    const auto est = test_support::blocked_cov(u, v);
    const double want = ou_increment_cov(static_cast<double>(h), m, tau, p);
    INFO("m = ", m, " got ", est.cov, " want ", want, " se ", est.se);
    CHECK(std::abs(est.cov - want) < 4.0 * est.se);
  }
}

TEST_CASE("sampled BM increment covariance matches (h - m tau)_+ within 4 SE") {
  const double vol = 1.5;
  const std::size_t n_pairs = 1'000'000;
  const std::size_t h = 100, L = 66;

  PathGrid grid{1.0, static_cast<std::int64_t>(n_pairs + h + L), 4321, 0};
  const SampledPath path = sample_bm_path(vol, grid);

  std::vector<double> u, v;
  for (const int m : {0, 1}) {
    test_support::increment_pairs(path.values, h, m == 0 ? 0 : L, n_pairs, u, v);
    const auto est = test_support::blocked_cov(u, v);
    const double want =
        vol * vol * bm_increment_cov(static_cast<double>(h), m, static_cast<double>(L));
    INFO("m = ", m, " got ", est.cov, " want ", want, " se ", est.se);
    CHECK(std::abs(est.cov - want) < 4.0 * est.se);
  }
}

TEST_CASE("parameter validation names the violated invariant") {
  CHECK_THROWS_WITH_AS((void)sample_ou_path({-1.0, 1.0}, {1.0, 10, 0, 0}),
                       doctest::Contains("lambda > 0"), std::invalid_argument);
  CHECK_THROWS_WITH_AS((void)sample_ou_path({1.0, 0.0}, {1.0, 10, 0, 0}),
                       doctest::Contains("sigma > 0"), std::invalid_argument);
  CHECK_THROWS_WITH_AS((void)sample_bm_path(1.0, {0.0, 10, 0, 0}),
                       doctest::Contains("dt > 0"), std::invalid_argument);
  CHECK_THROWS_WITH_AS((void)sample_bm_path(1.0, {1.0, 0, 0, 0}),
                       doctest::Contains("n_steps >= 1"), std::invalid_argument);
  CHECK_THROWS_AS((void)sample_bm_path(-1.0, {1.0, 10, 0, 0}), std::invalid_argument);
}
