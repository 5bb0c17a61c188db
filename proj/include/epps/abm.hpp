#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "epps/analysis.hpp"
#include "epps/rng.hpp"

namespace epps {

// Per-asset microstructure parameters.
struct AssetParams {
  double eta;    // tick size, price units
  double A;      // base arrival intensity, executions/second
  double k;      // spread sensitivity, 1/price-units
  double theta;  // linear impact, price units per inventory unit
  double nu;     // exogenous mid volatility, price units / sqrt(second)
  double gamma;  // market-maker risk aversion
  double psi_n;  // noise trade size, inventory units
  double s0;     // initial mid, price units

  void validate() const;
};

// Momentum trader on the equally-weighted two-asset index.
struct MomentumParams {
  bool enabled = true;
  double tau;                     // window, seconds
  std::array<double, 2> psi_m;    // per-asset trade size
  std::array<double, 2> q_max;    // per-asset inventory cap

  void validate() const;
};

struct AbmConfig {
  std::array<AssetParams, 2> assets;
  MomentumParams momentum;
  double dt = 0.5;  // seconds
  std::int64_t n_steps = 2'000'000;
  std::uint64_t seed = 0;
  double quote_horizon = 1.0;  // H in the stationary quoting rule
  bool record_inventories = true;

  // The shipped fitted parameter vector (EUR-like asset 0, BTC-like asset 1).
  static AbmConfig defaults();
  void validate() const;
};

// Half-spreads actually quoted: tick-floored, rounded outward to the grid.
struct Quotes {
  double ask = 0.0;  // delta^a, distance from mid to ask
  double bid = 0.0;  // delta^b, distance from mid to bid
};

struct MarketState {
  std::array<double, 2> mid{};      // published, tick-rounded
  std::array<double, 2> raw_mid{};  // pre-rounding
  std::array<std::int64_t, 2> ask_execs{};  // cumulative noise executions at the ask
  std::array<std::int64_t, 2> bid_execs{};  // cumulative at the bid
  std::array<double, 2> q_m{};      // momentum inventory
  std::array<Quotes, 2> quotes{};
  std::int64_t step = 0;

  double q_n(int asset, const AssetParams& a) const {
    return a.psi_n * static_cast<double>(ask_execs[asset] - bid_execs[asset]);
  }
  double q_mm(int asset, const AssetParams& a) const {
    return -(q_n(asset, a) + q_m[asset]);
  }
};

// Spread-dependent Poisson executions: dN^{a,b} ~ Poisson(A e^{-k delta} dt).
// Executions at the ask are noise-trader buys, so the inventory delta is
// psi_n (dN^a - dN^b). Updates the cumulative counts in the state.
double noise_trader_step(MarketState& state, int asset, const AssetParams& a,
                         double dt, Rng& rng);

// The two-branch momentum rule with cap and forced position flip:
//   index > ma:  min(max(q, 0) + psi_m, q_max)
//   otherwise:   max(min(q, 0) - psi_m, -q_max)
double momentum_trader_step(double prev_q, double index_prev, double ma_prev,
                            const MomentumParams& m, int asset);

// Stationary quoting rule: reservation offset -q_mm gamma sigma^2 H around the
// mid, total spread gamma sigma^2 H + (2/gamma) ln(1 + gamma/k); offsets are
// floored at the tick and rounded outward to the tick grid. Long market-maker
// inventory (q_mm > 0) skews quotes to sell: delta^b > delta^a.
Quotes market_maker_quotes(const MarketState& state, int asset, const AssetParams& a,
                           double vol_estimate, double horizon = 1.0);

struct MidUpdate {
  double raw = 0.0;
  double published = 0.0;
};

// Linear impact of this step's liquidity-taking flow plus Gaussian noise on
// the unrounded mid; the published mid is the raw mid rounded to the nearest
// tick. Throws if the published mid would be non-positive.
MidUpdate price_update(MarketState& state, int asset, const AssetParams& a,
                       double flow_delta, double dt, Rng& rng);

struct AbmResult {
  std::array<PriceSeries, 2> mids;  // published mids, n_steps + 1 entries
  // Per-step inventory traces (n_steps + 1 entries), empty when not recorded.
  std::array<std::vector<double>, 2> q_n;
  std::array<std::vector<double>, 2> q_m;
  std::array<std::vector<double>, 2> q_mm;
  double max_conservation_error = 0.0;  // max |q_n + q_m + q_mm| seen
  double max_tick_error = 0.0;          // max |mid - nearest tick| / eta seen
};

// One full market run. Step order: market-maker quotes, noise executions,
// momentum index update + trader step, price impact + noise + tick rounding.
// Deterministic per config seed.
AbmResult run_simulation(const AbmConfig& cfg);

}  // namespace epps
