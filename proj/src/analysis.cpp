#include "epps/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "epps/kernels.hpp"

namespace epps {

namespace {

constexpr std::int64_t kMicrosPerSecond = 1'000'000;
constexpr std::int64_t kMicrosPerDay = 86'400 * kMicrosPerSecond;
constexpr double kCurveCiLevel = 0.95;

std::int64_t seconds_to_us(double seconds, const char* what) {
  const double scaled = seconds * static_cast<double>(kMicrosPerSecond);
  const auto us = static_cast<std::int64_t>(std::llround(scaled));
  if (us < 1 || std::abs(scaled - static_cast<double>(us)) > 1e-3) {
    throw std::invalid_argument(std::string(what) +
                                " must be a positive whole number of microseconds");
  }
  return us;
}

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  std::int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

std::int64_t ceil_div(std::int64_t a, std::int64_t b) { return -floor_div(-a, b); }

double quiet_nan() { return std::numeric_limits<double>::quiet_NaN(); }

std::int64_t lag_steps(const PriceSeries& series, double h, const char* what) {
  const std::int64_t dt_us = series.dt_us();
  const std::int64_t h_us = seconds_to_us(h, what);
  if (h_us % dt_us != 0) {
    throw std::invalid_argument(std::string(what) +
                                " must be a multiple of the series dt");
  }
  return h_us / dt_us;
}

}  // namespace

std::int64_t PriceSeries::dt_us() const { return seconds_to_us(dt, "PriceSeries.dt"); }

std::vector<QuoteRecord> load_quotes(const std::string& path, QuoteLoadStats* stats) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("load_quotes: cannot open '" + path + "'");
  }

  std::string line;
  if (!std::getline(in, line)) {
    throw std::runtime_error("load_quotes: '" + path + "' is empty (header required)");
  }
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "timestamp_us,bid,ask") {
    throw std::runtime_error("load_quotes: '" + path +
                             "' header must be 'timestamp_us,bid,ask' (got '" + line +
                             "')");
  }

  QuoteLoadStats local;
  QuoteLoadStats& st = stats ? *stats : local;
  st = {};

  std::vector<QuoteRecord> records;
  std::int64_t line_no = 1;
  std::int64_t last_ts = std::numeric_limits<std::int64_t>::min();
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    ++st.total_rows;

    QuoteRecord rec;
    char comma1 = 0, comma2 = 0;
    std::istringstream fields(line);
    fields >> rec.timestamp_us >> comma1 >> rec.bid >> comma2 >> rec.ask;
    const bool parsed = bool(fields) && comma1 == ',' && comma2 == ',' &&
                        (fields >> std::ws).eof();
    const bool valid = parsed && std::isfinite(rec.bid) && std::isfinite(rec.ask) &&
                       rec.bid > 0.0 && rec.ask >= rec.bid && rec.timestamp_us >= last_ts;
    if (!valid) {
      ++st.malformed;
      if (st.malformed_lines.size() < 50) st.malformed_lines.push_back(line_no);
      continue;
    }
    last_ts = rec.timestamp_us;
    records.push_back(rec);
    ++st.accepted;
  }

  if (st.total_rows > 0 &&
      static_cast<double>(st.malformed) > 0.01 * static_cast<double>(st.total_rows)) {
    std::ostringstream msg;
    msg << "load_quotes: '" << path << "' has " << st.malformed << " malformed of "
        << st.total_rows << " rows (>1%); lines:";
    for (std::int64_t ln : st.malformed_lines) msg << ' ' << ln;
    if (st.malformed > static_cast<std::int64_t>(st.malformed_lines.size())) {
      msg << " ...";
    }
    throw std::runtime_error(msg.str());
  }
  return records;
}

std::vector<QuoteRecord> filter_weekends(std::span<const QuoteRecord> records) {
  std::vector<QuoteRecord> kept;
  kept.reserve(records.size());
  for (const QuoteRecord& r : records) {
    const std::int64_t day = floor_div(r.timestamp_us, kMicrosPerDay);
    const int weekday = static_cast<int>(((day % 7) + 7 + 4) % 7);  // 0=Sun .. 6=Sat
    if (weekday != 0 && weekday != 6) kept.push_back(r);
  }
  return kept;
}

std::vector<std::pair<std::size_t, std::size_t>> segment_on_gaps(
    std::span<const QuoteRecord> records, double max_gap_seconds) {
  if (!(max_gap_seconds > 0.0)) {
    throw std::invalid_argument("segment_on_gaps: max_gap_seconds > 0 violated");
  }
  std::vector<std::pair<std::size_t, std::size_t>> segments;
  if (records.empty()) return segments;

  const auto max_gap_us =
      static_cast<std::int64_t>(std::llround(max_gap_seconds * kMicrosPerSecond));
  std::size_t begin = 0;
  for (std::size_t i = 1; i < records.size(); ++i) {
    if (records[i].timestamp_us - records[i - 1].timestamp_us > max_gap_us) {
      segments.emplace_back(begin, i);
      begin = i;
    }
  }
  segments.emplace_back(begin, records.size());
  return segments;
}

PriceSeries to_mid_series(std::span<const QuoteRecord> records, double dt,
                          std::optional<std::int64_t> t_end_us) {
  if (records.empty()) {
    throw std::invalid_argument("to_mid_series: empty quote stream");
  }
  const std::int64_t dt_us = seconds_to_us(dt, "to_mid_series dt");

  PriceSeries series;
  series.dt = dt;
  series.t0_us = ceil_div(records.front().timestamp_us, dt_us) * dt_us;
  const std::int64_t end = t_end_us.value_or(records.back().timestamp_us);

  std::size_t idx = 0;
  for (std::int64_t t = series.t0_us; t <= end; t += dt_us) {
    while (idx + 1 < records.size() && records[idx + 1].timestamp_us <= t) ++idx;
    series.mids.push_back(0.5 * (records[idx].bid + records[idx].ask));
  }
  return series;
}

ReturnSeries log_returns(const PriceSeries& series, double h) {
  const std::int64_t lag = lag_steps(series, h, "log_returns h");
  if (static_cast<std::int64_t>(series.mids.size()) <= lag) {
    throw std::invalid_argument("log_returns: series too short for horizon");
  }
  ReturnSeries out;
  out.h = h;
  out.values.resize(series.mids.size() - static_cast<std::size_t>(lag));
  kernels::log_returns(series.mids, lag, out.values);
  return out;
}

ReturnSeries diff_returns(const PriceSeries& series, double h) {
  const std::int64_t lag = lag_steps(series, h, "diff_returns h");
  if (static_cast<std::int64_t>(series.mids.size()) <= lag) {
    throw std::invalid_argument("diff_returns: series too short for horizon");
  }
  ReturnSeries out;
  out.h = h;
  out.values.resize(series.mids.size() - static_cast<std::size_t>(lag));
  for (std::size_t i = 0; i < out.values.size(); ++i) {
    out.values[i] = series.mids[i + static_cast<std::size_t>(lag)] - series.mids[i];
  }
  return out;
}

double cross_correlation(const ReturnSeries& r1, const ReturnSeries& r2) {
  if (r1.h != r2.h) {
    throw std::invalid_argument("cross_correlation: horizons differ");
  }
  if (r1.values.size() != r2.values.size()) {
    throw std::invalid_argument("cross_correlation: lengths differ");
  }
  return kernels::pearson(kernels::moment_sums(r1.values, r2.values));
}

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    throw std::domain_error("normal_quantile: p in (0,1) violated");
  }
  // Acklam's rational approximation.
  static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                 -2.759285104469687e+02, 1.383577518672690e+02,
                                 -3.066479806614716e+01, 2.506628277459239e+00};
  static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                 -1.556989798598866e+02, 6.680131188771972e+01,
                                 -1.328068155288572e+01};
  static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                 -2.400758277161838e+00, -2.549732539343734e+00,
                                 4.374664141464968e+00,  2.938163982698783e+00};
  static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                                 2.445134137142996e+00, 3.754408661907416e+00};
  constexpr double p_low = 0.02425;

  double x;
  if (p < p_low) {
    const double q = std::sqrt(-2.0 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else if (p <= 1.0 - p_low) {
    const double q = p - 0.5;
    const double r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  } else {
    const double q = std::sqrt(-2.0 * std::log(1.0 - p));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }

  // One Halley step against the exact CDF; skipped in the far tails where
  // exp(x^2/2) overflows and the rational approximation is already adequate.
  if (std::abs(x) < 8.0) {
    static const double sqrt2 = std::sqrt(2.0);
    static const double sqrt_2pi = std::sqrt(8.0 * std::atan(1.0));
    const double err = 0.5 * std::erfc(-x / sqrt2) - p;
    const double u = err * sqrt_2pi * std::exp(0.5 * x * x);
    x -= u / (1.0 + 0.5 * x * u);
  }
  return x;
}

std::pair<double, double> fisher_ci(double rho, std::int64_t n_effective, double level) {
  if (!(std::abs(rho) < 1.0)) {
    throw std::domain_error("fisher_ci: |rho| < 1 violated");
  }
  if (n_effective < 4) {
    throw std::domain_error("fisher_ci: n_effective >= 4 violated");
  }
  if (!(level > 0.0 && level < 1.0)) {
    throw std::domain_error("fisher_ci: level in (0,1) violated");
  }
  const double z = std::atanh(rho);
  const double half = normal_quantile(1.0 - 0.5 * (1.0 - level)) /
                      std::sqrt(static_cast<double>(n_effective) - 3.0);
  return {std::tanh(z - half), std::tanh(z + half)};
}

AlignedPair align_series(const PriceSeries& a, const PriceSeries& b) {
  const std::int64_t dt_us = a.dt_us();
  if (dt_us != b.dt_us()) {
    throw std::invalid_argument("align_series: dt differs");
  }
  if ((a.t0_us - b.t0_us) % dt_us != 0) {
    throw std::invalid_argument("align_series: grids have different phase");
  }
  const std::int64_t start = std::max(a.t0_us, b.t0_us);
  const std::int64_t end =
      std::min(a.t0_us + (static_cast<std::int64_t>(a.mids.size()) - 1) * dt_us,
               b.t0_us + (static_cast<std::int64_t>(b.mids.size()) - 1) * dt_us);
  if (a.mids.empty() || b.mids.empty() || end < start) {
    throw std::invalid_argument("align_series: series do not overlap");
  }

  const auto crop = [&](const PriceSeries& s) {
    PriceSeries out;
    out.dt = s.dt;
    out.t0_us = start;
    const auto lo = static_cast<std::size_t>((start - s.t0_us) / dt_us);
    const auto n = static_cast<std::size_t>((end - start) / dt_us) + 1;
    out.mids.assign(s.mids.begin() + static_cast<std::ptrdiff_t>(lo),
                    s.mids.begin() + static_cast<std::ptrdiff_t>(lo + n));
    return out;
  };
  return {crop(a), crop(b)};
}

std::vector<AlignedPair> align_segments(std::span<const PriceSeries> segs1,
                                        std::span<const PriceSeries> segs2) {
  std::vector<AlignedPair> pairs;
  for (const PriceSeries& s1 : segs1) {
    for (const PriceSeries& s2 : segs2) {
      if (s1.mids.empty() || s2.mids.empty()) continue;
      const std::int64_t dt_us = s1.dt_us();
      const std::int64_t start = std::max(s1.t0_us, s2.t0_us);
      const std::int64_t end = std::min(
          s1.t0_us + (static_cast<std::int64_t>(s1.mids.size()) - 1) * dt_us,
          s2.t0_us + (static_cast<std::int64_t>(s2.mids.size()) - 1) * dt_us);
      if (end >= start) pairs.push_back(align_series(s1, s2));
    }
  }
  return pairs;
}

namespace {

void check_h_grid(std::span<const double> h_grid) {
  if (h_grid.empty()) {
    throw std::invalid_argument("correlation curve: empty h grid");
  }
  for (std::size_t i = 0; i < h_grid.size(); ++i) {
    if (!(h_grid[i] > 0.0)) {
      throw std::invalid_argument("correlation curve: h grid must be positive");
    }
    if (i > 0 && !(h_grid[i] > h_grid[i - 1])) {
      throw std::invalid_argument("correlation curve: h grid must be strictly ascending");
    }
  }
}

}  // namespace

CorrelationCurve correlation_curve(std::span<const AlignedPair> pairs,
                                   std::span<const double> h_grid, CiMode mode) {
  check_h_grid(h_grid);
  if (pairs.empty()) {
    throw std::invalid_argument("correlation curve: no aligned data");
  }
  const std::int64_t dt_us = pairs.front().a.dt_us();
  for (const AlignedPair& p : pairs) {
    if (p.a.dt_us() != dt_us || p.b.dt_us() != dt_us) {
      throw std::invalid_argument("correlation curve: segments disagree on dt");
    }
    if (p.a.mids.size() != p.b.mids.size() || p.a.t0_us != p.b.t0_us) {
      throw std::invalid_argument("correlation curve: pair is not aligned");
    }
  }

  CorrelationCurve curve;
  curve.rows.reserve(h_grid.size());
  for (const double h : h_grid) {
    const std::int64_t h_us = seconds_to_us(h, "correlation curve h");
    if (h_us % dt_us != 0) {
      throw std::invalid_argument("correlation curve: h must be a multiple of dt");
    }
    const std::int64_t lag = h_us / dt_us;

    kernels::MomentSums sums;
    for (const AlignedPair& p : pairs) {
      if (static_cast<std::int64_t>(p.a.mids.size()) > lag) {
        sums += kernels::lagged_log_return_sums(p.a.mids, p.b.mids, lag);
      }
    }
    if (sums.n < 2) {
      throw std::invalid_argument("correlation curve: series too short for h = " +
                                  std::to_string(h));
    }

    CurveRow row;
    row.h = h;
    row.rho = kernels::pearson(sums);
    row.n_effective = mode == CiMode::blocked ? sums.n / lag : sums.n;
    if (row.n_effective >= 4 && std::abs(row.rho) < 1.0) {
      std::tie(row.ci_low, row.ci_high) =
          fisher_ci(row.rho, row.n_effective, kCurveCiLevel);
    } else {
      row.ci_low = quiet_nan();
      row.ci_high = quiet_nan();
    }
    curve.rows.push_back(row);
  }
  return curve;
}

CorrelationCurve correlation_curve(const PriceSeries& p1, const PriceSeries& p2,
                                   std::span<const double> h_grid, CiMode mode) {
  const AlignedPair pair = align_series(p1, p2);
  return correlation_curve(std::span<const AlignedPair>(&pair, 1), h_grid, mode);
}

}  // namespace epps
