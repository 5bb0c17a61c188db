#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "epps/kernels.hpp"
#include "epps/rng.hpp"
#include "test_support.hpp"

using namespace epps;

namespace {

std::vector<double> random_prices(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> v(n);
  for (double& x : v) x = 100.0 + rng.normal();
  return v;
}

bool sums_close(const kernels::MomentSums& a, const kernels::MomentSums& b,
                double rel = 1e-12) {
  // Tolerance scales with the accumulation length: the two routes differ
  // only in summation order.
  const double scale = 1.0 + static_cast<double>(a.n);
  const auto close = [&](double u, double v) {
    return std::abs(u - v) <= rel * (scale + std::max(std::abs(u), std::abs(v)));
  };
  return a.n == b.n && close(a.mean_x, b.mean_x) && close(a.mean_y, b.mean_y) &&
         close(a.m2_x, b.m2_x) && close(a.m2_y, b.m2_y) && close(a.co, b.co);
}

}  // namespace

TEST_CASE("parallel moment sums match the serial reference across chunk boundaries") {
  for (const std::size_t n : {std::size_t{0}, std::size_t{1}, std::size_t{7},
                              std::size_t{8192}, std::size_t{8193}, std::size_t{50000}}) {
    const auto x = random_prices(n, 1);
    const auto y = random_prices(n, 2);
    CHECK(sums_close(kernels::moment_sums(x, y), kernels::moment_sums_serial(x, y)));
  }
}

TEST_CASE("lagged kernels match their serial references") {
  const auto x = random_prices(30000, 3);
  const auto y = random_prices(30000, 4);
  for (const std::int64_t lag : {1, 13, 8192, 29999}) {
    CHECK(sums_close(kernels::lagged_diff_sums(x, y, lag),
                     kernels::lagged_diff_sums_serial(x, y, lag)));
    CHECK(sums_close(kernels::lagged_log_return_sums(x, y, lag),
                     kernels::lagged_log_return_sums_serial(x, y, lag)));
  }
}

TEST_CASE("kernels are deterministic across repeated calls") {
  const auto x = random_prices(100000, 5);
  const auto y = random_prices(100000, 6);
  const auto a = kernels::moment_sums(x, y);
  const auto b = kernels::moment_sums(x, y);
  CHECK(a.mean_x == b.mean_x);
  CHECK(a.co == b.co);
  const auto c = kernels::lagged_log_return_sums(x, y, 17);
  const auto d = kernels::lagged_log_return_sums(x, y, 17);
  CHECK(c.co == d.co);
  CHECK(c.m2_y == d.m2_y);
}

TEST_CASE("pearson from sums agrees with the brute-force reference") {
  const auto x = random_prices(5000, 7);
  auto y = random_prices(5000, 8);
  for (std::size_t i = 0; i < y.size(); ++i) y[i] += 0.4 * x[i];
  const double got = kernels::pearson(kernels::moment_sums(x, y));
  const double want = test_support::pearson_reference(x, y);
  CHECK(got == doctest::Approx(want).epsilon(1e-12));
}

TEST_CASE("pearson hits the exact bounds on affine copies") {
  const auto x = random_prices(1000, 9);
  std::vector<double> up(x.size()), down(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    up[i] = 3.0 * x[i] + 1.0;
    down[i] = -0.5 * x[i] + 2.0;
  }
  CHECK(kernels::pearson(kernels::moment_sums(x, up)) == doctest::Approx(1.0));
  CHECK(kernels::pearson(kernels::moment_sums(x, down)) == doctest::Approx(-1.0));
}

TEST_CASE("pearson rejects degenerate input") {
  const std::vector<double> flat(100, 2.0);
  const auto x = random_prices(100, 10);
  CHECK_THROWS_AS((void)kernels::pearson(kernels::moment_sums(x, flat)),
                  std::domain_error);
  CHECK_THROWS_AS((void)kernels::pearson(kernels::MomentSums{}), std::domain_error);
}

TEST_CASE("lagged_diff_sums sees the expected pairs") {
  const std::vector<double> x{1.0, 2.0, 4.0, 8.0};
  const std::vector<double> y{0.0, 1.0, 3.0, 6.0};
  const auto s = kernels::lagged_diff_sums(x, y, 2);
  // pairs: (4-1, 3-0) and (8-2, 6-1)
  CHECK(s.n == 2);
  CHECK(s.mean_x == doctest::Approx(4.5));
  CHECK(s.mean_y == doctest::Approx(4.0));
  CHECK(s.m2_x == doctest::Approx(4.5));
  CHECK(s.co == doctest::Approx(3.0));
}

TEST_CASE("log_returns kernel matches serial bit for bit and the definition") {
  const auto x = random_prices(20000, 11);
  std::vector<double> a(x.size() - 5), b(x.size() - 5);
  kernels::log_returns(x, 5, a);
  kernels::log_returns_serial(x, 5, b);
  CHECK(a == b);
  CHECK(a[17] == std::log(x[22] / x[17]));
}

TEST_CASE("lag longer than the series yields empty sums") {
  const auto x = random_prices(10, 12);
  const auto s = kernels::lagged_diff_sums(x, x, 50);
  CHECK(s.n == 0);
  CHECK_THROWS_AS((void)kernels::lagged_diff_sums(x, x, 0), std::invalid_argument);
}
