#include "epps/abm.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace epps {

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw std::invalid_argument(what);
}

double round_to_tick(double x, double eta) { return std::round(x / eta) * eta; }

// Outward rounding of a half-spread: never below one tick, never inside the
// unrounded quote.
double snap_offset(double raw, double eta) {
  const double floored = std::max(raw, eta);
  return std::ceil(floored / eta - 1e-9) * eta;
}

struct NonPositivePrice : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace

void AssetParams::validate() const {
  require(eta > 0.0, "AssetParams: eta > 0 violated");
  require(A > 0.0, "AssetParams: A > 0 violated");
  require(k > 0.0, "AssetParams: k > 0 violated");
  require(theta >= 0.0, "AssetParams: theta >= 0 violated");
  require(nu >= 0.0, "AssetParams: nu >= 0 violated");
  require(gamma > 0.0, "AssetParams: gamma > 0 violated");
  require(psi_n > 0.0, "AssetParams: psi_n > 0 violated");
  require(s0 > 0.0, "AssetParams: s0 > 0 violated");
}

void MomentumParams::validate() const {
  require(tau > 0.0, "MomentumParams: tau > 0 violated");
  for (int i = 0; i < 2; ++i) {
    require(psi_m[i] > 0.0, "MomentumParams: psi_m > 0 violated");
    require(q_max[i] >= psi_m[i], "MomentumParams: q_max >= psi_m violated");
  }
}

AbmConfig AbmConfig::defaults() {
  AbmConfig cfg;
  cfg.assets[0] = {1e-4, 1.0, 3466.0, 2.7e-11, 3e-5, 6.46e-6, 100000.0, 1.10};
  cfg.assets[1] = {1e-2, 1.0, 34.66, 2.7e-6, 2.04, 3.47e-9, 4.0, 30000.0};
  cfg.momentum = {true, 500.0, {3'000'000.0, 120.0}, {6'500'000.0, 250.0}};
  cfg.dt = 0.5;
  cfg.n_steps = 2'000'000;
  return cfg;
}

void AbmConfig::validate() const {
  for (const AssetParams& a : assets) a.validate();
  momentum.validate();
  require(dt > 0.0, "AbmConfig: dt > 0 violated");
  require(n_steps >= 1, "AbmConfig: n_steps >= 1 violated");
  const auto warmup = static_cast<std::int64_t>(std::ceil(momentum.tau / dt));
  require(n_steps >= warmup,
          "AbmConfig: n_steps >= ceil(tau/dt) violated (n_steps = " +
              std::to_string(n_steps) + ", need >= " + std::to_string(warmup) + ")");
}

double noise_trader_step(MarketState& state, int asset, const AssetParams& a,
                         double dt, Rng& rng) {
  const Quotes& q = state.quotes[asset];
  const std::int64_t d_ask = rng.poisson(a.A * std::exp(-a.k * q.ask) * dt);
  const std::int64_t d_bid = rng.poisson(a.A * std::exp(-a.k * q.bid) * dt);
  state.ask_execs[asset] += d_ask;
  state.bid_execs[asset] += d_bid;
  return a.psi_n * static_cast<double>(d_ask - d_bid);
}

double momentum_trader_step(double prev_q, double index_prev, double ma_prev,
                            const MomentumParams& m, int asset) {
  if (index_prev > ma_prev) {
    return std::min(std::max(prev_q, 0.0) + m.psi_m[asset], m.q_max[asset]);
  }
  return std::max(std::min(prev_q, 0.0) - m.psi_m[asset], -m.q_max[asset]);
}

Quotes market_maker_quotes(const MarketState& state, int asset, const AssetParams& a,
                           double vol_estimate, double horizon) {
  if (!(vol_estimate > 0.0)) {
    throw std::invalid_argument("market_maker_quotes: vol_estimate > 0 violated");
  }
  const double risk = a.gamma * vol_estimate * vol_estimate * horizon;
  const double half = 0.5 * (risk + (2.0 / a.gamma) * std::log1p(a.gamma / a.k));
  const double skew = state.q_mm(asset, a) * risk;
  return {snap_offset(half - skew, a.eta), snap_offset(half + skew, a.eta)};
}

MidUpdate price_update(MarketState& state, int asset, const AssetParams& a,
                       double flow_delta, double dt, Rng& rng) {
  const double noise = a.nu * std::sqrt(dt) * rng.normal();
  const double raw = state.raw_mid[asset] + a.theta * flow_delta + noise;
  const double published = round_to_tick(raw, a.eta);
  if (!(published > 0.0)) {
    throw NonPositivePrice("price_update: published mid <= 0 for asset " +
                           std::to_string(asset) + " (raw = " + std::to_string(raw) +
                           ")");
  }
  state.raw_mid[asset] = raw;
  state.mid[asset] = published;
  return {raw, published};
}

namespace {

// Rolling window of index values with a running sum; the sum is rebuilt
// exactly every 2^16 pushes to stop float drift.
class RollingMean {
 public:
  explicit RollingMean(std::size_t window) : win_(window, 0.0) {}

  void push(double v) {
    if (count_ < win_.size()) {
      sum_ += v;
      win_[pos_] = v;
      ++count_;
    } else {
      sum_ += v - win_[pos_];
      win_[pos_] = v;
    }
    pos_ = (pos_ + 1) % win_.size();
    if (++pushes_ % (1 << 16) == 0) rebuild();
  }

  bool full() const { return count_ == win_.size(); }
  double mean() const { return sum_ / static_cast<double>(count_); }

 private:
  void rebuild() {
    sum_ = 0.0;
    for (std::size_t i = 0; i < count_; ++i) sum_ += win_[i];
  }

  std::vector<double> win_;
  std::size_t pos_ = 0;
  std::size_t count_ = 0;
  std::uint64_t pushes_ = 0;
  double sum_ = 0.0;
};

}  // namespace

AbmResult run_simulation(const AbmConfig& cfg) {
  cfg.validate();

  Rng noise_rng[2] = {Rng(cfg.seed, stream_id("abm.noise.0")),
                      Rng(cfg.seed, stream_id("abm.noise.1"))};
  Rng mid_rng[2] = {Rng(cfg.seed, stream_id("abm.mid.0")),
                    Rng(cfg.seed, stream_id("abm.mid.1"))};

  MarketState state;
  for (int i = 0; i < 2; ++i) {
    state.raw_mid[i] = cfg.assets[i].s0;
    state.mid[i] = round_to_tick(cfg.assets[i].s0, cfg.assets[i].eta);
    require(state.mid[i] > 0.0, "AbmConfig: initial mid rounds to <= 0");
  }

  const auto window = static_cast<std::size_t>(std::llround(cfg.momentum.tau / cfg.dt));
  require(window >= 1, "AbmConfig: tau/dt must be >= 1");
  RollingMean index_ma(window);
  const auto index_of = [&](const MarketState& st) {
    return st.mid[0] / cfg.assets[0].s0 + st.mid[1] / cfg.assets[1].s0;
  };
  double last_index = index_of(state);
  index_ma.push(last_index);

  AbmResult result;
  const auto reserve = static_cast<std::size_t>(cfg.n_steps) + 1;
  for (int i = 0; i < 2; ++i) {
    result.mids[i].t0_us = 0;
    result.mids[i].dt = cfg.dt;
    result.mids[i].mids.reserve(reserve);
    result.mids[i].mids.push_back(state.mid[i]);
    if (cfg.record_inventories) {
      result.q_n[i].reserve(reserve);
      result.q_m[i].reserve(reserve);
      result.q_mm[i].reserve(reserve);
      result.q_n[i].push_back(0.0);
      result.q_m[i].push_back(0.0);
      result.q_mm[i].push_back(0.0);
    }
  }

  for (std::int64_t step = 1; step <= cfg.n_steps; ++step) {
    state.step = step;
    try {
      for (int i = 0; i < 2; ++i) {
        state.quotes[i] = market_maker_quotes(state, i, cfg.assets[i],
                                              cfg.assets[i].nu, cfg.quote_horizon);
      }

      double flow[2];
      for (int i = 0; i < 2; ++i) {
        flow[i] = noise_trader_step(state, i, cfg.assets[i], cfg.dt, noise_rng[i]);
      }

      if (cfg.momentum.enabled && index_ma.full()) {
        for (int i = 0; i < 2; ++i) {
          const double q_new = momentum_trader_step(state.q_m[i], last_index,
                                                    index_ma.mean(), cfg.momentum, i);
          flow[i] += q_new - state.q_m[i];
          state.q_m[i] = q_new;
        }
      }

      for (int i = 0; i < 2; ++i) {
        price_update(state, i, cfg.assets[i], flow[i], cfg.dt, mid_rng[i]);
      }
    } catch (const NonPositivePrice& e) {
      throw std::runtime_error("run_simulation: aborted at step " +
                               std::to_string(step) + ": " + e.what());
    }

    last_index = index_of(state);
    index_ma.push(last_index);

    for (int i = 0; i < 2; ++i) {
      const AssetParams& a = cfg.assets[i];
      result.mids[i].mids.push_back(state.mid[i]);

      const double qn = state.q_n(i, a);
      const double qmm = state.q_mm(i, a);
      result.max_conservation_error =
          std::max(result.max_conservation_error, std::abs(qn + state.q_m[i] + qmm));
      const double ticks = state.mid[i] / a.eta;
      result.max_tick_error =
          std::max(result.max_tick_error, std::abs(ticks - std::round(ticks)));

      if (cfg.record_inventories) {
        result.q_n[i].push_back(qn);
        result.q_m[i].push_back(state.q_m[i]);
        result.q_mm[i].push_back(qmm);
      }
    }
  }
  return result;
}

}  // namespace epps
