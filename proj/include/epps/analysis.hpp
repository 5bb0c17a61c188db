#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace epps {

// One best-bid/best-offer observation. Timestamps are UTC epoch microseconds.
struct QuoteRecord {
  std::int64_t timestamp_us = 0;
  double bid = 0.0;
  double ask = 0.0;
};

// Uniformly sampled mid prices. Grid points sit at integer multiples of dt
// from the UTC epoch, so two series resampled with the same dt align by
// construction.
struct PriceSeries {
  std::int64_t t0_us = 0;  // timestamp of mids[0]
  double dt = 1.0;         // seconds
  std::vector<double> mids;

  std::int64_t dt_us() const;
};

// Returns of one horizon. values[i] pairs grid point i with grid point
// i + h/dt of the source series.
struct ReturnSeries {
  double h = 0.0;  // seconds
  std::vector<double> values;
};

struct CurveRow {
  double h = 0.0;
  double rho = 0.0;
  double ci_low = 0.0;   // NaN when no CI applies
  double ci_high = 0.0;  // NaN when no CI applies
  std::int64_t n_effective = 0;
};

struct CorrelationCurve {
  std::vector<CurveRow> rows;
};

// Effective-sample convention for the Fisher bands: `blocked` divides the
// overlapping-return count by h/dt (conservative, the default); `overlapping`
// uses the raw count (optimistic, flagged in the CLI output).
enum class CiMode { blocked, overlapping };

struct QuoteLoadStats {
  std::int64_t total_rows = 0;
  std::int64_t accepted = 0;
  std::int64_t malformed = 0;
  std::vector<std::int64_t> malformed_lines;  // 1-based, capped at 50 entries
};

// Reads the documented quote CSV (header `timestamp_us,bid,ask`). Rows that
// fail to parse, violate ask >= bid > 0, or step backwards in time are
// counted as malformed; more than 1% malformed rows is a hard error naming
// the offending lines.
std::vector<QuoteRecord> load_quotes(const std::string& path,
                                     QuoteLoadStats* stats = nullptr);

// Drops records whose UTC weekday is Saturday or Sunday (midnight boundary).
std::vector<QuoteRecord> filter_weekends(std::span<const QuoteRecord> records);

// Splits a quote stream wherever consecutive records are more than
// max_gap_seconds apart. Returns [begin, end) index ranges.
std::vector<std::pair<std::size_t, std::size_t>> segment_on_gaps(
    std::span<const QuoteRecord> records, double max_gap_seconds);

// Last-observation-carried-forward resampling of mids (bid+ask)/2 onto the
// epoch-anchored dt grid. Grid points before the first quote are dropped;
// the grid ends at the last quote unless t_end_us extends it.
PriceSeries to_mid_series(std::span<const QuoteRecord> records, double dt,
                          std::optional<std::int64_t> t_end_us = std::nullopt);

// values[i] = ln(P(t_i + h) / P(t_i)); h must be a multiple of dt and the
// series must span it.
ReturnSeries log_returns(const PriceSeries& series, double h);

// Simple differences P(t_i + h) - P(t_i), the return convention of the
// Gaussian model (its price levels may be negative).
ReturnSeries diff_returns(const PriceSeries& series, double h);

// Pearson correlation of two equal-horizon return series, sample means
// removed. Throws on horizon/length mismatch or zero variance.
double cross_correlation(const ReturnSeries& r1, const ReturnSeries& r2);

// Quantile of the standard normal distribution (Acklam's rational
// approximation polished with one Halley step on erfc).
double normal_quantile(double p);

// Fisher-transform confidence interval: bounds tanh(atanh(rho) -+ z/sqrt(n-3)).
// Requires |rho| < 1, n_effective >= 4, level in (0, 1).
std::pair<double, double> fisher_ci(double rho, std::int64_t n_effective, double level);

// A pair of series cropped to a common grid window: same t0_us, dt, length.
struct AlignedPair {
  PriceSeries a;
  PriceSeries b;
};

// Crops two epoch-anchored series to their common time window. Throws if the
// grids differ in dt or do not overlap.
AlignedPair align_series(const PriceSeries& a, const PriceSeries& b);

// Intersects two segment lists; every overlapping (segment, segment) window
// becomes one aligned pair. Windows too short for any return are kept out by
// the curve computation rather than here.
std::vector<AlignedPair> align_segments(std::span<const PriceSeries> segs1,
                                        std::span<const PriceSeries> segs2);

// rho(h) with 95% Fisher bands over the horizon grid, pooling overlapping
// log-returns across the aligned pairs. Returns never span a pair boundary.
CorrelationCurve correlation_curve(std::span<const AlignedPair> pairs,
                                   std::span<const double> h_grid, CiMode mode);

// Single-pair convenience: aligns and delegates.
CorrelationCurve correlation_curve(const PriceSeries& p1, const PriceSeries& p2,
                                   std::span<const double> h_grid, CiMode mode);

}  // namespace epps
