#pragma once

#include <span>
#include <utility>

#include "epps/analysis.hpp"
#include "epps/paths.hpp"

namespace epps {

// Parameters of the two-asset momentum model: OU inventory (lambda, sigma),
// linear impact theta, exogenous volatility nu, coupling epsilon and momentum
// window tau. xi = nu^2 / (sigma^2 / lambda) is derived; the momentum
// trader's scale is recoverable as epsilon / theta.
struct GaussianModelParams {
  double lambda;   // 1/seconds
  double sigma;    // inventory vol
  double theta;    // price units per inventory unit
  double nu;       // price units / sqrt(second)
  double epsilon;  // dimensionless coupling, first-order expansion parameter
  double tau;      // seconds

  double xi() const { return nu * nu * lambda / (sigma * sigma); }

  // Shipped defaults: the calibrated set lambda=0.03162, xi=1e-4, theta=0.6,
  // tau=66, epsilon=0.0505 with sigma=1 and nu derived from xi.
  static GaussianModelParams defaults();
  static GaussianModelParams from_xi(double lambda, double sigma, double theta,
                                     double xi, double epsilon, double tau);
  void validate() const;
};

// c11(h) (= c22(h) by symmetry) and c12(h) of the h-horizon price increments.
struct CovariancePair {
  double c11 = 0.0;
  double c12 = 0.0;
};

// Diagonal increment covariance: sigma^2 theta^2 / lambda (1 - e^{-lambda h}) + nu^2 h.
double c_diag(double h, const GaussianModelParams& p);

// Off-diagonal increment covariance divided by 2 epsilon:
// sigma^2 theta^2 / lambda (1 - e^{-lambda h} - e^{-lambda tau}
//   + e^{-lambda (h+tau)} / 2 + e^{-lambda |h-tau|} / 2) + nu^2 min(h, tau).
// Continuous in h with a slope break at h = tau.
double c_cross_over_2eps(double h, const GaussianModelParams& p);

CovariancePair covariance_pair(double h, const GaussianModelParams& p);

// The closed-form cross-correlation, first order in epsilon:
// rho(h) = 2 eps [theta^2 (1 - e^{-lh} - e^{-lt} + e^{-l(h+t)}/2 + e^{-l|h-t|}/2)
//                 + xi min(h,tau)]
//              / [theta^2 (1 - e^{-lh}) + xi h].
double rho_closed_form(double h, const GaussianModelParams& p);

// rho_closed_form over an ascending grid; CI fields carry the
// not-applicable sentinel (NaN, empty in CSV).
CorrelationCurve rho_curve(std::span<const double> h_grid, const GaussianModelParams& p);

// Monte Carlo oracle: builds both price paths from the explicit first-order
// solution s^k_t = theta X^k_t + nu Z^k_t
//                  + eps sum_j [theta (X^j_t - X^j_{t-tau}) + nu (Z^j_t - Z^j_{t-tau})]
// with four independent drivers sampled on [-tau, T] (stationary OU, BM), so
// the return series is stationary from t = 0. Levels are centered and may be
// negative; correlate them with diff_returns, not log returns.
// Requires grid.dt to divide tau exactly.
std::pair<PriceSeries, PriceSeries> simulate_prices(const GaussianModelParams& p,
                                                    const PathGrid& grid);

}  // namespace epps
