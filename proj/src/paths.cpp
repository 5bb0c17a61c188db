#include "epps/paths.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace epps {

void OuParams::validate() const {
  if (!(lambda > 0.0)) {
    throw std::invalid_argument("OuParams: lambda > 0 violated (lambda = " +
                                std::to_string(lambda) + ")");
  }
  if (!(sigma > 0.0)) {
    throw std::invalid_argument("OuParams: sigma > 0 violated (sigma = " +
                                std::to_string(sigma) + ")");
  }
}

void PathGrid::validate() const {
  if (!(dt > 0.0)) {
    throw std::invalid_argument("PathGrid: dt > 0 violated (dt = " +
                                std::to_string(dt) + ")");
  }
  if (n_steps < 1) {
    throw std::invalid_argument("PathGrid: n_steps >= 1 violated (n_steps = " +
                                std::to_string(n_steps) + ")");
  }
}

namespace {

void check_lag_args(double h, int m, double tau) {
  if (m != 0 && m != 1) {
    throw std::invalid_argument("increment covariance: m must be 0 or 1 (m = " +
                                std::to_string(m) + ")");
  }
  if (!(h > 0.0)) {
    throw std::invalid_argument("increment covariance: h > 0 violated (h = " +
                                std::to_string(h) + ")");
  }
  if (tau < 0.0) {
    throw std::invalid_argument("increment covariance: tau >= 0 violated (tau = " +
                                std::to_string(tau) + ")");
  }
}

}  // namespace

double bm_increment_cov(double h, int m, double tau) {
  check_lag_args(h, m, tau);
  return std::max(h - m * tau, 0.0);
}

double ou_increment_cov(double h, int m, double tau, const OuParams& p) {
  check_lag_args(h, m, tau);
  p.validate();
  const double lam = p.lambda;
  const double mt = m * tau;
  return p.sigma * p.sigma / (2.0 * lam) *
         (2.0 * std::exp(-lam * mt) - std::exp(-lam * (h + mt)) -
          std::exp(-lam * std::abs(h - mt)));
}

SampledPath sample_ou_path(const OuParams& p, const PathGrid& grid) {
  p.validate();
  grid.validate();
  Rng rng(grid.seed, grid.stream);

  const double decay = std::exp(-p.lambda * grid.dt);
  const double step_sd =
      std::sqrt(p.stationary_variance() * (1.0 - decay * decay));

  SampledPath path;
  path.grid = grid;
  path.values.resize(static_cast<std::size_t>(grid.n_steps) + 1);
  double x = std::sqrt(p.stationary_variance()) * rng.normal();
  path.values[0] = x;
  for (std::int64_t i = 1; i <= grid.n_steps; ++i) {
    x = decay * x + step_sd * rng.normal();
    path.values[static_cast<std::size_t>(i)] = x;
  }
  return path;
}

SampledPath sample_bm_path(double vol, const PathGrid& grid) {
  if (vol < 0.0) {
    throw std::invalid_argument("sample_bm_path: vol >= 0 violated (vol = " +
                                std::to_string(vol) + ")");
  }
  grid.validate();
  Rng rng(grid.seed, grid.stream);

  const double step_sd = vol * std::sqrt(grid.dt);
  SampledPath path;
  path.grid = grid;
  path.values.resize(static_cast<std::size_t>(grid.n_steps) + 1);
  double z = 0.0;
  path.values[0] = z;
  for (std::int64_t i = 1; i <= grid.n_steps; ++i) {
    z += step_sd * rng.normal();
    path.values[static_cast<std::size_t>(i)] = z;
  }
  return path;
}

}  // namespace epps
