// Timing comparison of the serial reference kernels against the OpenMP
// versions, plus the two simulators at working sizes. Run with
// OMP_NUM_THREADS set to taste.

#include <chrono>
#include <cstdio>
#include <string>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "epps/abm.hpp"
#include "epps/gaussian_model.hpp"
#include "epps/kernels.hpp"
#include "epps/paths.hpp"
#include "epps/rng.hpp"

namespace {

using Clock = std::chrono::steady_clock;

volatile double g_sink = 0.0;

template <typename Fn>
double time_ms(int reps, Fn&& fn) {
  double best = 1e300;
  for (int r = 0; r < reps; ++r) {
    const auto t0 = Clock::now();
    g_sink = fn();
    const auto t1 = Clock::now();
    best = std::min(best, std::chrono::duration<double, std::milli>(t1 - t0).count());
  }
  return best;
}

void report(const std::string& name, double serial_ms, double parallel_ms) {
  std::printf("%-34s %10.2f ms %10.2f ms %8.2fx\n", name.c_str(), serial_ms,
              parallel_ms, serial_ms / parallel_ms);
}

}  // namespace

int main(int argc, char** argv) {
  std::int64_t n = 1 << 24;
  if (argc > 1) n = std::stoll(argv[1]);

#ifdef _OPENMP
  std::printf("OpenMP threads: %d, n = %lld\n", omp_get_max_threads(),
              static_cast<long long>(n));
#else
  std::printf("OpenMP disabled, n = %lld\n", static_cast<long long>(n));
#endif
  std::printf("%-34s %13s %13s %9s\n", "kernel", "serial", "parallel", "speedup");

  epps::Rng rng(7);
  std::vector<double> x(static_cast<std::size_t>(n)), y(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    x[i] = 100.0 + rng.normal();
    y[i] = 100.0 + rng.normal();
  }

  report("moment_sums",
         time_ms(3, [&] { return epps::kernels::moment_sums_serial(x, y).co; }),
         time_ms(3, [&] { return epps::kernels::moment_sums(x, y).co; }));

  const std::int64_t lag = 64;
  report("lagged_diff_sums",
         time_ms(3, [&] { return epps::kernels::lagged_diff_sums_serial(x, y, lag).co; }),
         time_ms(3, [&] { return epps::kernels::lagged_diff_sums(x, y, lag).co; }));

  report("lagged_log_return_sums",
         time_ms(3, [&] {
           return epps::kernels::lagged_log_return_sums_serial(x, y, lag).co;
         }),
         time_ms(3, [&] { return epps::kernels::lagged_log_return_sums(x, y, lag).co; }));

  std::vector<double> out(x.size() - static_cast<std::size_t>(lag));
  report("log_returns",
         time_ms(3, [&] {
           epps::kernels::log_returns_serial(x, lag, out);
           return out[0];
         }),
         time_ms(3, [&] {
           epps::kernels::log_returns(x, lag, out);
           return out[0];
         }));

  // End-to-end timings (no serial twin): simulator throughput at small sizes.
  {
    const auto params = epps::GaussianModelParams::defaults();
    epps::PathGrid grid{1.0, 1'000'000, 11, 0};
    const double ms = time_ms(2, [&] {
      auto [s1, s2] = epps::simulate_prices(params, grid);
      return s1.mids.back() + s2.mids.back();
    });
    std::printf("%-34s %10.2f ms (1e6 steps)\n", "simulate_prices", ms);
  }
  {
    epps::AbmConfig cfg = epps::AbmConfig::defaults();
    cfg.n_steps = 200'000;
    cfg.record_inventories = false;
    const double ms = time_ms(2, [&] {
      const epps::AbmResult res = epps::run_simulation(cfg);
      return res.mids[0].mids.back();
    });
    std::printf("%-34s %10.2f ms (2e5 steps)\n", "run_simulation", ms);
  }
  return 0;
}
