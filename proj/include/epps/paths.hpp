#pragma once

#include <cstdint>
#include <vector>

#include "epps/rng.hpp"

namespace epps {

// Mean-reversion rate and diffusion volatility of the inventory process
// dX = -lambda X dt + sigma dW.
struct OuParams {
  double lambda = 1.0;  // 1/seconds
  double sigma = 1.0;   // inventory units / sqrt(second)

  double stationary_variance() const { return sigma * sigma / (2.0 * lambda); }
  void validate() const;
};

// Uniform sampling grid plus the RNG coordinates of the path drawn on it.
// Paths with the same seed but distinct streams are independent.
struct PathGrid {
  double dt = 1.0;  // seconds
  std::int64_t n_steps = 1;
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;

  void validate() const;
};

struct SampledPath {
  std::vector<double> values;  // n_steps + 1 entries, values[0] = initial condition
  PathGrid grid;
};

// Covariance of two h-length increments of a standard Brownian motion,
// the second one lagged by m*tau: equals (h - m*tau)_+ for m in {0, 1}.
// Stationary, so no t argument.
double bm_increment_cov(double h, int m, double tau);

// Same quantity for a stationary OU process:
// sigma^2/(2 lambda) * (2 e^{-lambda m tau} - e^{-lambda (h + m tau)}
//                        - e^{-lambda |h - m tau|}).
double ou_increment_cov(double h, int m, double tau, const OuParams& p);

// Stationary OU path via the exact one-step transition
//   X_{t+dt} = e^{-lambda dt} X_t + sqrt(sigma^2 (1 - e^{-2 lambda dt}) / (2 lambda)) * xi,
// X_0 drawn from N(0, sigma^2 / (2 lambda)). No discretization bias.
SampledPath sample_ou_path(const OuParams& p, const PathGrid& grid);

// Brownian path scaled by vol: values[0] = 0, independent Gaussian
// increments of variance vol^2 * dt.
SampledPath sample_bm_path(double vol, const PathGrid& grid);

}  // namespace epps
