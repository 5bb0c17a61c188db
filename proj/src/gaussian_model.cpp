#include "epps/gaussian_model.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "epps/rng.hpp"

namespace epps {

GaussianModelParams GaussianModelParams::defaults() {
  return from_xi(0.03162, 1.0, 0.6, 1e-4, 0.0505, 66.0);
}

GaussianModelParams GaussianModelParams::from_xi(double lambda, double sigma,
                                                 double theta, double xi,
                                                 double epsilon, double tau) {
  if (xi < 0.0) {
    throw std::invalid_argument("GaussianModelParams: xi >= 0 violated");
  }
  GaussianModelParams p{lambda, sigma, theta,
                        sigma * std::sqrt(xi / lambda), epsilon, tau};
  p.validate();
  return p;
}

void GaussianModelParams::validate() const {
  if (!(lambda > 0.0)) {
    throw std::invalid_argument("GaussianModelParams: lambda > 0 violated");
  }
  if (!(sigma > 0.0)) {
    throw std::invalid_argument("GaussianModelParams: sigma > 0 violated");
  }
  if (!(theta >= 0.0)) {
    throw std::invalid_argument("GaussianModelParams: theta >= 0 violated");
  }
  if (!(nu >= 0.0)) {
    throw std::invalid_argument("GaussianModelParams: nu >= 0 violated");
  }
  if (!(theta > 0.0 || nu > 0.0)) {
    throw std::invalid_argument(
        "GaussianModelParams: theta and nu cannot both be zero");
  }
  if (!(tau >= 0.0)) {
    throw std::invalid_argument("GaussianModelParams: tau >= 0 violated");
  }
  if (!(epsilon >= 0.0 && epsilon <= 0.25)) {
    throw std::invalid_argument(
        "GaussianModelParams: epsilon in [0, 0.25] violated (first-order model)");
  }
}

namespace {

void check_h(double h) {
  if (!(h > 0.0)) {
    throw std::invalid_argument("gaussian model: h > 0 violated (h = " +
                                std::to_string(h) + ")");
  }
}

double cross_bracket(double h, double lambda, double tau) {
  return 1.0 - std::exp(-lambda * h) - std::exp(-lambda * tau) +
         0.5 * std::exp(-lambda * (h + tau)) +
         0.5 * std::exp(-lambda * std::abs(h - tau));
}

}  // namespace

double c_diag(double h, const GaussianModelParams& p) {
  check_h(h);
  p.validate();
  const double s2_over_l = p.sigma * p.sigma / p.lambda;
  return s2_over_l * p.theta * p.theta * (1.0 - std::exp(-p.lambda * h)) +
         p.nu * p.nu * h;
}

double c_cross_over_2eps(double h, const GaussianModelParams& p) {
  check_h(h);
  p.validate();
  const double s2_over_l = p.sigma * p.sigma / p.lambda;
  return s2_over_l * p.theta * p.theta * cross_bracket(h, p.lambda, p.tau) +
         p.nu * p.nu * std::min(h, p.tau);
}

CovariancePair covariance_pair(double h, const GaussianModelParams& p) {
  return {c_diag(h, p), 2.0 * p.epsilon * c_cross_over_2eps(h, p)};
}

double rho_closed_form(double h, const GaussianModelParams& p) {
  check_h(h);
  p.validate();
  const double th2 = p.theta * p.theta;
  const double xi = p.xi();
  const double num = th2 * cross_bracket(h, p.lambda, p.tau) + xi * std::min(h, p.tau);
  const double den = th2 * (1.0 - std::exp(-p.lambda * h)) + xi * h;
  return 2.0 * p.epsilon * num / den;
}

CorrelationCurve rho_curve(std::span<const double> h_grid,
                           const GaussianModelParams& p) {
  if (h_grid.empty()) {
    throw std::invalid_argument("rho_curve: empty h grid");
  }
  CorrelationCurve curve;
  curve.rows.reserve(h_grid.size());
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (std::size_t i = 0; i < h_grid.size(); ++i) {
    if (i > 0 && !(h_grid[i] > h_grid[i - 1])) {
      throw std::invalid_argument("rho_curve: h grid must be strictly ascending");
    }
    curve.rows.push_back({h_grid[i], rho_closed_form(h_grid[i], p), nan, nan, 0});
  }
  return curve;
}

std::pair<PriceSeries, PriceSeries> simulate_prices(const GaussianModelParams& p,
                                                    const PathGrid& grid) {
  p.validate();
  grid.validate();

  const double ratio = p.tau / grid.dt;
  const auto lag = static_cast<std::int64_t>(std::llround(ratio));
  if (std::abs(ratio - static_cast<double>(lag)) > 1e-9) {
    throw std::invalid_argument("simulate_prices: dt must divide tau exactly");
  }

  const std::int64_t n = grid.n_steps;
  PriceSeries s1, s2;
  s1.t0_us = 0;
  s1.dt = grid.dt;
  s1.mids.assign(static_cast<std::size_t>(n) + 1, 0.0);
  s2 = s1;

  // Drivers live on [-tau, T]; price index j maps to driver index j + lag.
  PathGrid driver_grid = grid;
  driver_grid.n_steps = n + lag;

  const OuParams ou{p.lambda, p.sigma};
  const char* names[4] = {"gaussian.x1", "gaussian.x2", "gaussian.z1", "gaussian.z2"};
  for (int d = 0; d < 4; ++d) {
    PathGrid g = driver_grid;
    g.stream = grid.stream ^ stream_id(names[d]);
    const bool is_ou = d < 2;
    const SampledPath path = is_ou ? sample_ou_path(ou, g) : sample_bm_path(1.0, g);
    const double own = is_ou ? p.theta : p.nu;
    const double mom = p.epsilon * own;
    double* out_own = (d == 0 || d == 2) ? s1.mids.data() : s2.mids.data();
    double* out_other = (d == 0 || d == 2) ? s2.mids.data() : s1.mids.data();
    const double* v = path.values.data();
#pragma omp parallel for schedule(static)
    for (std::int64_t j = 0; j <= n; ++j) {
      const double now = v[j + lag];
      const double momentum = mom * (now - v[j]);
      out_own[j] += own * now + momentum;
      out_other[j] += momentum;
    }
  }
  return {std::move(s1), std::move(s2)};
}

}  // namespace epps
