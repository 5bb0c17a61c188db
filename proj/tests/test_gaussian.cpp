#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "epps/gaussian_model.hpp"
#include "epps/kernels.hpp"
#include "test_support.hpp"

using namespace epps;

namespace {

// Independently evaluated at 30-digit precision (theta=0.6, lambda=0.03162,
// xi=1e-4, tau=66, epsilon=0.0505).
constexpr double kRhoAt66 = 0.144327678876675694;
constexpr double kCrossAt66Normalized = 0.460041297481247602;

GaussianModelParams with(double lambda, double sigma, double theta, double nu,
                         double epsilon, double tau) {
  GaussianModelParams p{lambda, sigma, theta, nu, epsilon, tau};
  p.validate();
  return p;
}

double rho_hat(const PriceSeries& s1, const PriceSeries& s2, std::int64_t lag) {
  return kernels::pearson(kernels::lagged_diff_sums(s1.mids, s2.mids, lag));
}

}  // namespace

TEST_CASE("defaults expose the calibrated parameter set") {
  const GaussianModelParams p = GaussianModelParams::defaults();
  CHECK(p.lambda == 0.03162);
  CHECK(p.theta == 0.6);
  CHECK(p.epsilon == 0.0505);
  CHECK(p.tau == 66.0);
  CHECK(p.xi() == doctest::Approx(1e-4).epsilon(1e-14));
}

TEST_CASE("from_xi round-trips the volatility ratio") {
  const GaussianModelParams p = GaussianModelParams::from_xi(0.2, 1.7, 0.3, 0.05, 0.1, 30.0);
  CHECK(p.xi() == doctest::Approx(0.05).epsilon(1e-14));
}

TEST_CASE("validation rejects out-of-range parameters") {
  CHECK_THROWS_AS(with(0.0, 1, 1, 1, 0.05, 60), std::invalid_argument);
  CHECK_THROWS_AS(with(1, 0.0, 1, 1, 0.05, 60), std::invalid_argument);
  CHECK_THROWS_AS(with(1, 1, 0.0, 0.0, 0.05, 60), std::invalid_argument);
  CHECK_THROWS_AS(with(1, 1, 1, 1, 0.3, 60), std::invalid_argument);
  CHECK_THROWS_AS(with(1, 1, 1, 1, -0.01, 60), std::invalid_argument);
  CHECK_THROWS_AS(with(1, 1, 1, 1, 0.05, -1.0), std::invalid_argument);
}

TEST_CASE("c_diag spot values") {
  const auto p = with(1.0, 1.0, 1.0, 0.0, 0.05, 60.0);
  CHECK(c_diag(std::log(2.0), p) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(c_diag(1e-9, p) < 1e-8);  // vanishes as h -> 0+
  CHECK_THROWS_AS((void)c_diag(0.0, p), std::invalid_argument);
  CHECK_THROWS_AS((void)c_diag(-1.0, p), std::invalid_argument);
}

TEST_CASE("c_diag is positive and strictly increasing") {
  const auto p = GaussianModelParams::defaults();
  double prev = 0.0;
  for (double h = 1.0; h <= 600.0; h += 1.0) {
    const double c = c_diag(h, p);
    CHECK(c > prev);
    prev = c;
  }
}

TEST_CASE("c_cross_over_2eps spot values") {
  // tau = 0: no momentum trader, no cross term.
  const auto no_window = with(1.0, 1.0, 1.0, 1.0, 0.05, 0.0);
  for (const double h : {0.5, 5.0, 50.0}) {
    CHECK(std::abs(c_cross_over_2eps(h, no_window)) < 1e-12);
  }

  // theta = 0: only the nu^2 min(h, tau) term survives.
  const auto no_impact = with(1.0, 1.0, 0.0, 1.0, 0.05, 60.0);
  CHECK(c_cross_over_2eps(30.0, no_impact) == doctest::Approx(30.0).epsilon(1e-14));

  // Calibrated parameters at h = tau, normalized by sigma^2 / lambda.
  const auto p = GaussianModelParams::defaults();
  const double normalized = c_cross_over_2eps(66.0, p) * p.lambda / (p.sigma * p.sigma);
  CHECK(normalized == doctest::Approx(kCrossAt66Normalized).epsilon(1e-12));
}

TEST_CASE("covariance_pair composes the two covariances") {
  const auto p = GaussianModelParams::defaults();
  const CovariancePair c = covariance_pair(66.0, p);
  CHECK(c.c11 == c_diag(66.0, p));
  CHECK(c.c12 == 2.0 * p.epsilon * c_cross_over_2eps(66.0, p));
  CHECK(c.c11 > 0.0);
}

TEST_CASE("rho reduces to 2 eps min(h,tau)/h when theta = 0") {
  const auto p = with(0.1, 1.0, 0.0, 1.0, 0.05, 60.0);
  CHECK(rho_closed_form(120.0, p) == doctest::Approx(0.05).epsilon(1e-12));
  CHECK(rho_closed_form(30.0, p) == doctest::Approx(0.1).epsilon(1e-12));
  CHECK(rho_closed_form(60.0, p) == doctest::Approx(0.1).epsilon(1e-12));
}

TEST_CASE("rho vanishes identically when tau = 0") {
  const auto p = with(0.03162, 1.0, 0.6, 0.056, 0.0505, 0.0);
  for (const double h : {1.0, 10.0, 66.0, 500.0}) {
    CHECK(std::abs(rho_closed_form(h, p)) < 1e-14);
  }
}

TEST_CASE("rho at the calibrated peak matches the independent evaluation") {
  const auto p = GaussianModelParams::defaults();
  CHECK(rho_closed_form(66.0, p) == doctest::Approx(kRhoAt66).epsilon(1e-12));
}

TEST_CASE("rho equals the composition 2 eps c12 / c11 across parameter sets") {
  const std::vector<GaussianModelParams> sets = {
      GaussianModelParams::defaults(),
      with(0.5, 2.0, 0.3, 0.1, 0.02, 20.0),
      with(0.01, 0.5, 1.5, 0.9, 0.1, 200.0),
  };
  for (const auto& p : sets) {
    for (double h = 1.0; h <= 400.0; h += 7.0) {
      const double direct = rho_closed_form(h, p);
      const double composed = 2.0 * p.epsilon * c_cross_over_2eps(h, p) / c_diag(h, p);
      CHECK(std::abs(direct - composed) <= 1e-12 * std::max(1.0, std::abs(direct)));
    }
  }
}

TEST_CASE("rho curve has the kink at h = tau and stays in (-1, 1)") {
  const auto p = GaussianModelParams::defaults();
  const auto slope_change = [&](double h) {
    return (rho_closed_form(h + 1.0, p) - rho_closed_form(h, p)) -
           (rho_closed_form(h, p) - rho_closed_form(h - 1.0, p));
  };
  const double at_tau = slope_change(66.0);
  const double at_half = slope_change(33.0);
  CHECK(at_tau < 0.0);
  CHECK(std::abs(at_tau) > 10.0 * std::abs(at_half));

  for (double h = 1.0; h <= 1500.0; h += 1.0) {
    const double r = rho_closed_form(h, p);
    CHECK(r > -1.0);
    CHECK(r < 1.0);
  }
}

TEST_CASE("rho is continuous at the kink") {
  const auto p = GaussianModelParams::defaults();
  const double delta = 1e-6;
  CHECK(std::abs(rho_closed_form(66.0 + delta, p) - rho_closed_form(66.0 - delta, p)) <
        1e-6);
}

TEST_CASE("rho decays past the kink") {
  const auto p = GaussianModelParams::defaults();
  CHECK(std::abs(rho_closed_form(20.0 * 66.0, p)) < rho_closed_form(66.0, p) / 2.0);
}

TEST_CASE("rho_curve vectorizes the closed form with sentinel CI fields") {
  const auto p = GaussianModelParams::defaults();
  const std::vector<double> single{66.0};
  const CorrelationCurve one = rho_curve(single, p);
  REQUIRE(one.rows.size() == 1);
  CHECK(one.rows[0].rho == doctest::Approx(kRhoAt66).epsilon(1e-12));
  CHECK(std::isnan(one.rows[0].ci_low));
  CHECK(std::isnan(one.rows[0].ci_high));

  const auto flat = with(0.1, 1.0, 0.0, 1.0, 0.05, 60.0);
  const std::vector<double> grid{30.0, 60.0, 90.0};
  const CorrelationCurve c = rho_curve(grid, flat);
  REQUIRE(c.rows.size() == 3);
  CHECK(c.rows[0].rho == doctest::Approx(0.1).epsilon(1e-12));
  CHECK(c.rows[1].rho == doctest::Approx(0.1).epsilon(1e-12));
  CHECK(c.rows[2].rho == doctest::Approx(0.1 * 60.0 / 90.0).epsilon(1e-12));

  CHECK_THROWS_AS((void)rho_curve(std::vector<double>{}, p), std::invalid_argument);
  CHECK_THROWS_AS((void)rho_curve(std::vector<double>{60.0, 30.0}, p),
                  std::invalid_argument);
}

TEST_CASE("simulate_prices is deterministic and validates the lag") {
  const auto p = GaussianModelParams::defaults();
  PathGrid grid{1.0, 2000, 5, 0};
  const auto [a1, a2] = simulate_prices(p, grid);
  const auto [b1, b2] = simulate_prices(p, grid);
  CHECK(a1.mids == b1.mids);
  CHECK(a2.mids == b2.mids);

  PathGrid other = grid;
  other.seed = 6;
  CHECK(simulate_prices(p, other).first.mids != a1.mids);

  PathGrid bad = grid;
  bad.dt = 0.7;  // 66 / 0.7 is not an integer
  CHECK_THROWS_AS((void)simulate_prices(p, bad), std::invalid_argument);
}

TEST_CASE("decoupled assets are statistically independent") {
  auto p = GaussianModelParams::defaults();
  p.epsilon = 0.0;
  const PathGrid grid{1.0, 500'000, 77, 0};
  const auto [s1, s2] = simulate_prices(p, grid);
  for (const std::int64_t lag : {1, 66, 200}) {
    const double r = rho_hat(s1, s2, lag);
    const double n_eff = static_cast<double>((grid.n_steps + 1 - lag) / lag);
    const double se = (1.0 - r * r) / std::sqrt(n_eff);
    INFO("lag ", lag, " rho ", r, " se ", se);
    CHECK(std::abs(r) < 3.0 * se);
  }
}

TEST_CASE("Monte Carlo correlation tracks the closed form at the peak") {
  const auto p = GaussianModelParams::defaults();
  const PathGrid grid{1.0, 2'000'000, 2024, 0};
  const auto [s1, s2] = simulate_prices(p, grid);

  const std::int64_t lag = 66;
  const double r = rho_hat(s1, s2, lag);
  const double n_eff = static_cast<double>((grid.n_steps + 1 - lag) / lag);
  const double se = (1.0 - r * r) / std::sqrt(n_eff);
  const double tol = std::max(3.0 * se, 5.0 * p.epsilon * p.epsilon);
  INFO("rho_hat ", r, " closed form ", kRhoAt66, " tol ", tol);
  CHECK(std::abs(r - kRhoAt66) < tol);
}
