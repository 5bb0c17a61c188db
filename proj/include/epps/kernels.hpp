#pragma once

#include <cstdint>
#include <span>

namespace epps::kernels {

// Centered first and second moments of a paired sample: running means plus
// sums of squared/cross deviations. Partials combine exactly (Chan's
// parallel update), so chunked reductions stay deterministic and pooling
// across data segments loses no precision to cancellation.
struct MomentSums {
  double mean_x = 0.0;
  double mean_y = 0.0;
  double m2_x = 0.0;  // sum of (x - mean_x)^2
  double m2_y = 0.0;  // sum of (y - mean_y)^2
  double co = 0.0;    // sum of (x - mean_x)(y - mean_y)
  std::int64_t n = 0;

  MomentSums& operator+=(const MomentSums& o);
};

// Pearson correlation from accumulated moments; throws std::domain_error on
// n < 2 or zero variance in either coordinate.
double pearson(const MomentSums& s);

// Reference kernels: one plain left-to-right pass, kept for testing and for
// the benchmark baseline.
MomentSums moment_sums_serial(std::span<const double> x, std::span<const double> y);
MomentSums lagged_diff_sums_serial(std::span<const double> x, std::span<const double> y,
                                   std::int64_t lag);
MomentSums lagged_log_return_sums_serial(std::span<const double> x,
                                         std::span<const double> y, std::int64_t lag);
void log_returns_serial(std::span<const double> prices, std::int64_t lag,
                        std::span<double> out);

// OpenMP kernels. Work is split into fixed-size chunks, each accumulated
// anchored at its first element and converted to central moments, then
// combined in chunk order. The result is identical for any thread count
// (including a build without OpenMP) and differs from the serial reference
// only in summation order, i.e. by rounding at the 1e-12 relative level.
MomentSums moment_sums(std::span<const double> x, std::span<const double> y);

// Moments of the pair (x[i+lag]-x[i], y[i+lag]-y[i]) over i in [0, n-lag):
// the h-horizon simple-return correlation without materializing returns.
MomentSums lagged_diff_sums(std::span<const double> x, std::span<const double> y,
                            std::int64_t lag);

// Same for log returns (ln(x[i+lag]/x[i]), ln(y[i+lag]/y[i])).
MomentSums lagged_log_return_sums(std::span<const double> x, std::span<const double> y,
                                  std::int64_t lag);

// out[i] = ln(prices[i+lag] / prices[i]); out.size() == prices.size() - lag.
void log_returns(std::span<const double> prices, std::int64_t lag, std::span<double> out);

}  // namespace epps::kernels
