#include "epps/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace epps::kernels {

namespace {

constexpr std::int64_t kChunk = 1 << 13;

// Raw accumulator anchored at the first value of its range; converted to
// central moments once per range. Keeps the hot loop to multiply-adds while
// avoiding the large-mean cancellation of unanchored sums.
struct Anchored {
  double ax = 0.0, ay = 0.0;
  double sx = 0.0, sy = 0.0;
  double sxx = 0.0, syy = 0.0, sxy = 0.0;
  std::int64_t n = 0;

  void add(double x, double y) {
    if (n == 0) {
      ax = x;
      ay = y;
    }
    const double dx = x - ax;
    const double dy = y - ay;
    sx += dx;
    sy += dy;
    sxx += dx * dx;
    syy += dy * dy;
    sxy += dx * dy;
    ++n;
  }

  MomentSums finish() const {
    MomentSums m;
    m.n = n;
    if (n == 0) return m;
    const double inv = 1.0 / static_cast<double>(n);
    m.mean_x = ax + sx * inv;
    m.mean_y = ay + sy * inv;
    m.m2_x = std::max(sxx - sx * sx * inv, 0.0);
    m.m2_y = std::max(syy - sy * sy * inv, 0.0);
    m.co = sxy - sx * sy * inv;
    return m;
  }
};

// Chunked reduction: per-chunk moments combined in chunk order. The
// decomposition depends only on n, never on the thread count.
template <typename ChunkFn>
MomentSums chunked_reduce(std::int64_t n, ChunkFn&& chunk_sums) {
  if (n <= 0) return {};
  const std::int64_t n_chunks = (n + kChunk - 1) / kChunk;
  std::vector<MomentSums> partial(static_cast<std::size_t>(n_chunks));
#pragma omp parallel for schedule(static)
  for (std::int64_t c = 0; c < n_chunks; ++c) {
    partial[static_cast<std::size_t>(c)] =
        chunk_sums(c * kChunk, std::min(n, (c + 1) * kChunk));
  }
  MomentSums total;
  for (const MomentSums& p : partial) total += p;
  return total;
}

void check_pair_sizes(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) {
    throw std::invalid_argument("paired kernel: size mismatch");
  }
}

std::int64_t pair_count_for_lag(std::size_t n, std::int64_t lag) {
  if (lag < 1) throw std::invalid_argument("lagged kernel: lag >= 1 violated");
  const std::int64_t count = static_cast<std::int64_t>(n) - lag;
  return count > 0 ? count : 0;
}

MomentSums accumulate_values(std::span<const double> x, std::span<const double> y,
                             std::int64_t lo, std::int64_t hi) {
  Anchored acc;
  for (std::int64_t i = lo; i < hi; ++i) {
    acc.add(x[static_cast<std::size_t>(i)], y[static_cast<std::size_t>(i)]);
  }
  return acc.finish();
}

MomentSums accumulate_diffs(std::span<const double> x, std::span<const double> y,
                            std::int64_t lag, std::int64_t lo, std::int64_t hi) {
  Anchored acc;
  for (std::int64_t i = lo; i < hi; ++i) {
    const auto j = static_cast<std::size_t>(i);
    const auto k = static_cast<std::size_t>(i + lag);
    acc.add(x[k] - x[j], y[k] - y[j]);
  }
  return acc.finish();
}

MomentSums accumulate_log_returns(std::span<const double> x, std::span<const double> y,
                                  std::int64_t lag, std::int64_t lo, std::int64_t hi) {
  Anchored acc;
  for (std::int64_t i = lo; i < hi; ++i) {
    const auto j = static_cast<std::size_t>(i);
    const auto k = static_cast<std::size_t>(i + lag);
    acc.add(std::log(x[k] / x[j]), std::log(y[k] / y[j]));
  }
  return acc.finish();
}

}  // namespace

MomentSums& MomentSums::operator+=(const MomentSums& o) {
  if (o.n == 0) return *this;
  if (n == 0) {
    *this = o;
    return *this;
  }
  const double nt = static_cast<double>(n) + static_cast<double>(o.n);
  const double dx = o.mean_x - mean_x;
  const double dy = o.mean_y - mean_y;
  const double w = static_cast<double>(n) * static_cast<double>(o.n) / nt;
  m2_x += o.m2_x + dx * dx * w;
  m2_y += o.m2_y + dy * dy * w;
  co += o.co + dx * dy * w;
  mean_x += dx * static_cast<double>(o.n) / nt;
  mean_y += dy * static_cast<double>(o.n) / nt;
  n += o.n;
  return *this;
}

double pearson(const MomentSums& s) {
  if (s.n < 2) throw std::domain_error("pearson: need at least 2 samples");
  if (!(s.m2_x > 0.0) || !(s.m2_y > 0.0)) {
    throw std::domain_error("pearson: zero variance in a series (degenerate input)");
  }
  const double r = s.co / std::sqrt(s.m2_x * s.m2_y);
  return std::clamp(r, -1.0, 1.0);
}

MomentSums moment_sums_serial(std::span<const double> x, std::span<const double> y) {
  check_pair_sizes(x, y);
  return accumulate_values(x, y, 0, static_cast<std::int64_t>(x.size()));
}

MomentSums lagged_diff_sums_serial(std::span<const double> x, std::span<const double> y,
                                   std::int64_t lag) {
  check_pair_sizes(x, y);
  return accumulate_diffs(x, y, lag, 0, pair_count_for_lag(x.size(), lag));
}

MomentSums lagged_log_return_sums_serial(std::span<const double> x,
                                         std::span<const double> y, std::int64_t lag) {
  check_pair_sizes(x, y);
  return accumulate_log_returns(x, y, lag, 0, pair_count_for_lag(x.size(), lag));
}

void log_returns_serial(std::span<const double> prices, std::int64_t lag,
                        std::span<double> out) {
  const std::int64_t count = pair_count_for_lag(prices.size(), lag);
  if (static_cast<std::int64_t>(out.size()) != count) {
    throw std::invalid_argument("log_returns: output size mismatch");
  }
  for (std::int64_t i = 0; i < count; ++i) {
    out[static_cast<std::size_t>(i)] =
        std::log(prices[static_cast<std::size_t>(i + lag)] /
                 prices[static_cast<std::size_t>(i)]);
  }
}

MomentSums moment_sums(std::span<const double> x, std::span<const double> y) {
  check_pair_sizes(x, y);
  return chunked_reduce(static_cast<std::int64_t>(x.size()),
                        [&](std::int64_t lo, std::int64_t hi) {
                          return accumulate_values(x, y, lo, hi);
                        });
}

MomentSums lagged_diff_sums(std::span<const double> x, std::span<const double> y,
                            std::int64_t lag) {
  check_pair_sizes(x, y);
  return chunked_reduce(pair_count_for_lag(x.size(), lag),
                        [&](std::int64_t lo, std::int64_t hi) {
                          return accumulate_diffs(x, y, lag, lo, hi);
                        });
}

MomentSums lagged_log_return_sums(std::span<const double> x, std::span<const double> y,
                                  std::int64_t lag) {
  check_pair_sizes(x, y);
  return chunked_reduce(pair_count_for_lag(x.size(), lag),
                        [&](std::int64_t lo, std::int64_t hi) {
                          return accumulate_log_returns(x, y, lag, lo, hi);
                        });
}

void log_returns(std::span<const double> prices, std::int64_t lag, std::span<double> out) {
  const std::int64_t count = pair_count_for_lag(prices.size(), lag);
  if (static_cast<std::int64_t>(out.size()) != count) {
    throw std::invalid_argument("log_returns: output size mismatch");
  }
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < count; ++i) {
    out[static_cast<std::size_t>(i)] =
        std::log(prices[static_cast<std::size_t>(i + lag)] /
                 prices[static_cast<std::size_t>(i)]);
  }
}

}  // namespace epps::kernels
