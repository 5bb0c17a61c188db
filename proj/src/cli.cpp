#include "epps/cli.hpp"

#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <iostream>
#include <limits>
#include <span>
#include <stdexcept>
#include <utility>

#include <CLI11.hpp>

#include "epps/abm.hpp"
#include "epps/analysis.hpp"
#include "epps/csv.hpp"
#include "epps/gaussian_model.hpp"
#include "epps/kernels.hpp"
#include "epps/paths.hpp"

namespace epps::cli {

namespace {

using MetaEntries = std::vector<std::pair<std::string, std::string>>;

std::string full_precision(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void meta_add(MetaEntries& meta, const std::string& key, double v) {
  meta.emplace_back(key, full_precision(v));
}

void meta_add(MetaEntries& meta, const std::string& key, const std::string& v) {
  meta.emplace_back(key, v);
}

// Options shared by the Gaussian subcommands. nu and xi are alternative ways
// to fix the exogenous volatility; the calibrated defaults use xi = 1e-4.
struct GaussianOptions {
  double lambda = 0.03162;
  double sigma = 1.0;
  double theta = 0.6;
  double epsilon = 0.0505;
  double tau = 66.0;
  double nu = -1.0;  // set when --nu given
  double xi = 1e-4;

  GaussianModelParams resolve() const {
    // tau = 0 is a legal degenerate model (rho vanishes identically) but a
    // pointless curve to request, so the commands reject it.
    if (!(tau > 0.0)) {
      throw std::invalid_argument("gaussian: invariant tau > 0 violated");
    }
    if (nu >= 0.0) {
      GaussianModelParams p{lambda, sigma, theta, nu, epsilon, tau};
      p.validate();
      return p;
    }
    return GaussianModelParams::from_xi(lambda, sigma, theta, xi, epsilon, tau);
  }

  void describe(MetaEntries& meta) const {
    const GaussianModelParams p = resolve();
    meta_add(meta, "lambda", p.lambda);
    meta_add(meta, "sigma", p.sigma);
    meta_add(meta, "theta", p.theta);
    meta_add(meta, "nu", p.nu);
    meta_add(meta, "xi", p.xi());
    meta_add(meta, "epsilon", p.epsilon);
    meta_add(meta, "tau", p.tau);
  }
};

void add_gaussian_options(CLI::App& cmd, GaussianOptions& opt) {
  cmd.add_option("--lambda", opt.lambda, "Inventory mean-reversion rate, 1/s");
  cmd.add_option("--sigma", opt.sigma, "Inventory volatility");
  cmd.add_option("--theta", opt.theta, "Price impact elasticity");
  cmd.add_option("--epsilon", opt.epsilon, "Coupling parameter");
  cmd.add_option("--tau", opt.tau, "Momentum window, seconds");
  auto* nu = cmd.add_option("--nu", opt.nu, "Exogenous price volatility");
  auto* xi = cmd.add_option("--xi", opt.xi,
                            "Volatility ratio nu^2/(sigma^2/lambda); sets nu");
  nu->excludes(xi);
  xi->excludes(nu);
}

std::string stem_label(const std::string& path) {
  std::string stem = std::filesystem::path(path).stem().string();
  for (char& c : stem) {
    if (!std::isalnum(static_cast<unsigned char>(c))) c = '_';
  }
  return stem.empty() ? "curve" : stem;
}

double curve_se(double rho, std::int64_t n_effective) {
  if (n_effective < 2) return std::numeric_limits<double>::quiet_NaN();
  return (1.0 - rho * rho) / std::sqrt(static_cast<double>(n_effective));
}

// ---------------------------------------------------------------- gaussian-curve

struct GaussianCurveArgs {
  GaussianOptions model;
  std::string h_grid = "1:300:1";
  std::string out = "gaussian_curve.csv";
};

void run_gaussian_curve(const GaussianCurveArgs& args) {
  const GaussianModelParams p = args.model.resolve();
  const std::vector<double> grid = parse_h_grid(args.h_grid);
  const CorrelationCurve curve = rho_curve(grid, p);
  csv::write_curve(args.out, curve);

  MetaEntries meta;
  meta_add(meta, "command", std::string("gaussian-curve"));
  args.model.describe(meta);
  meta_add(meta, "h_grid", args.h_grid);
  meta_add(meta, "out", args.out);
  csv::write_metadata(args.out + ".meta", meta);
  std::cout << "wrote " << curve.rows.size() << " rows to " << args.out << "\n";
}

// ------------------------------------------------------------------- gaussian-mc

struct GaussianMcArgs {
  GaussianOptions model;
  std::string h_grid = "1:300:3";
  std::string out = "gaussian_mc.csv";
  double dt = 1.0;
  std::int64_t steps = 1'000'000;
  std::uint64_t seed = 0;
};

void run_gaussian_mc(const GaussianMcArgs& args) {
  const GaussianModelParams p = args.model.resolve();
  const std::vector<double> grid = parse_h_grid(args.h_grid);

  PathGrid path_grid;
  path_grid.dt = args.dt;
  path_grid.n_steps = args.steps;
  path_grid.seed = args.seed;
  const auto [s1, s2] = simulate_prices(p, path_grid);

  CorrelationCurve curve;
  std::vector<double> mc_se, rho_ref;
  for (const double h : grid) {
    const double ratio = h / args.dt;
    const auto lag = static_cast<std::int64_t>(std::llround(ratio));
    if (lag < 1 || std::abs(ratio - static_cast<double>(lag)) > 1e-9) {
      throw std::invalid_argument("gaussian-mc: h grid must be multiples of dt");
    }
    const kernels::MomentSums sums = kernels::lagged_diff_sums(s1.mids, s2.mids, lag);
    CurveRow row;
    row.h = h;
    row.rho = kernels::pearson(sums);
    row.n_effective = sums.n / lag;
    if (row.n_effective >= 4 && std::abs(row.rho) < 1.0) {
      std::tie(row.ci_low, row.ci_high) = fisher_ci(row.rho, row.n_effective, 0.95);
    } else {
      row.ci_low = row.ci_high = std::numeric_limits<double>::quiet_NaN();
    }
    curve.rows.push_back(row);
    mc_se.push_back(curve_se(row.rho, row.n_effective));
    rho_ref.push_back(rho_closed_form(h, p));
  }
  csv::write_curve_with_reference(args.out, curve, mc_se, rho_ref);

  double max_abs_gap = 0.0;
  for (std::size_t i = 0; i < curve.rows.size(); ++i) {
    max_abs_gap = std::max(max_abs_gap, std::abs(curve.rows[i].rho - rho_ref[i]));
  }

  MetaEntries meta;
  meta_add(meta, "command", std::string("gaussian-mc"));
  args.model.describe(meta);
  meta_add(meta, "dt", args.dt);
  meta_add(meta, "steps", std::to_string(args.steps));
  meta_add(meta, "seed", std::to_string(args.seed));
  meta_add(meta, "h_grid", args.h_grid);
  meta_add(meta, "out", args.out);
  csv::write_metadata(args.out + ".meta", meta);
  std::cout << "wrote " << curve.rows.size() << " rows to " << args.out
            << "; max |rho_mc - rho_closed_form| = " << csv::format_value(max_abs_gap)
            << "\n";
}

// ----------------------------------------------------------------------- abm-run

struct AbmArgs {
  AbmConfig cfg = AbmConfig::defaults();
  bool no_momentum = false;
  std::int64_t runs = 1;
  std::string h_grid = "5:300:5";
  std::string out = "abm_curve.csv";
  std::string prices_out;  // skipped when empty
};

void add_abm_options(CLI::App& cmd, AbmArgs& args) {
  static const char* side[2] = {"1", "2"};
  for (int i = 0; i < 2; ++i) {
    AssetParams& a = args.cfg.assets[i];
    const std::string n(side[i]);
    cmd.add_option("--eta" + n, a.eta, "Tick size, asset " + n);
    cmd.add_option("--arrival" + n, a.A, "Base arrival intensity A, asset " + n);
    cmd.add_option("--k" + n, a.k, "Spread sensitivity, asset " + n);
    cmd.add_option("--theta" + n, a.theta, "Impact elasticity, asset " + n);
    cmd.add_option("--nu" + n, a.nu, "Mid volatility, asset " + n);
    cmd.add_option("--gamma" + n, a.gamma, "Risk aversion, asset " + n);
    cmd.add_option("--psi-n" + n, a.psi_n, "Noise trade size, asset " + n);
    cmd.add_option("--s0-" + n, a.s0, "Initial mid, asset " + n);
    cmd.add_option("--psi-m" + n, args.cfg.momentum.psi_m[i],
                   "Momentum trade size, asset " + n);
    cmd.add_option("--q-max" + n, args.cfg.momentum.q_max[i],
                   "Momentum inventory cap, asset " + n);
  }
  cmd.add_option("--tau", args.cfg.momentum.tau, "Momentum window, seconds");
  cmd.add_flag("--no-momentum", args.no_momentum, "Disable the momentum trader");
  cmd.add_option("--dt", args.cfg.dt, "Step size, seconds");
  cmd.add_option("--steps", args.cfg.n_steps, "Number of steps");
  cmd.add_option("--seed", args.cfg.seed, "Top-level RNG seed");
  cmd.add_option("--quote-horizon", args.cfg.quote_horizon,
                 "Quoting horizon H in the spread rule");
  cmd.add_option("--runs", args.runs,
                 "Independent runs pooled into the curve (seeds seed..seed+runs-1)");
  cmd.add_option("--h-grid", args.h_grid, "Horizon grid start:stop:step, seconds");
  cmd.add_option("--out", args.out, "Correlation curve CSV path");
  cmd.add_option("--prices-out", args.prices_out, "Mid-price CSV path (optional)");
}

void run_abm(const AbmArgs& args) {
  AbmConfig cfg = args.cfg;
  cfg.momentum.enabled = !args.no_momentum;
  cfg.record_inventories = false;
  cfg.validate();
  if (args.runs < 1) throw std::invalid_argument("abm-run: --runs >= 1 violated");

  const std::vector<double> grid = parse_h_grid(args.h_grid);

  std::vector<AbmResult> results(static_cast<std::size_t>(args.runs));
  std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic)
  for (std::int64_t r = 0; r < args.runs; ++r) {
    try {
      AbmConfig run_cfg = cfg;
      run_cfg.seed = cfg.seed + static_cast<std::uint64_t>(r);
      results[static_cast<std::size_t>(r)] = run_simulation(run_cfg);
    } catch (...) {
#pragma omp critical
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);

  double max_conservation = 0.0, max_tick = 0.0;
  std::vector<AlignedPair> pairs;
  pairs.reserve(results.size());
  for (AbmResult& res : results) {
    max_conservation = std::max(max_conservation, res.max_conservation_error);
    max_tick = std::max(max_tick, res.max_tick_error);
    pairs.push_back({std::move(res.mids[0]), std::move(res.mids[1])});
  }

  const CorrelationCurve curve = correlation_curve(pairs, grid, CiMode::blocked);
  csv::write_curve(args.out, curve);
  if (!args.prices_out.empty()) {
    csv::write_prices(args.prices_out, pairs.front().a, pairs.front().b);
  }

  MetaEntries meta;
  meta_add(meta, "command", std::string("abm-run"));
  for (int i = 0; i < 2; ++i) {
    const AssetParams& a = cfg.assets[i];
    const std::string n = std::to_string(i + 1);
    meta_add(meta, "eta" + n, a.eta);
    meta_add(meta, "arrival" + n, a.A);
    meta_add(meta, "k" + n, a.k);
    meta_add(meta, "theta" + n, a.theta);
    meta_add(meta, "nu" + n, a.nu);
    meta_add(meta, "gamma" + n, a.gamma);
    meta_add(meta, "psi_n" + n, a.psi_n);
    meta_add(meta, "s0_" + n, a.s0);
    meta_add(meta, "psi_m" + n, cfg.momentum.psi_m[i]);
    meta_add(meta, "q_max" + n, cfg.momentum.q_max[i]);
  }
  meta_add(meta, "tau", cfg.momentum.tau);
  meta_add(meta, "momentum_enabled", std::string(cfg.momentum.enabled ? "true" : "false"));
  meta_add(meta, "dt", cfg.dt);
  meta_add(meta, "steps", std::to_string(cfg.n_steps));
  meta_add(meta, "seed", std::to_string(cfg.seed));
  meta_add(meta, "runs", std::to_string(args.runs));
  meta_add(meta, "quote_horizon", cfg.quote_horizon);
  meta_add(meta, "h_grid", args.h_grid);
  meta_add(meta, "out", args.out);
  if (!args.prices_out.empty()) meta_add(meta, "prices_out", args.prices_out);
  csv::write_metadata(args.out + ".meta", meta);

  std::cout << "conservation check: max |q_n + q_m + q_mm| = "
            << csv::format_value(max_conservation)
            << (max_conservation == 0.0 ? " (OK)" : " (VIOLATED)") << "\n"
            << "tick grid check: max offset = " << csv::format_value(max_tick)
            << " ticks" << (max_tick < 1e-6 ? " (OK)" : " (VIOLATED)") << "\n"
            << "wrote " << curve.rows.size() << " rows to " << args.out << "\n";
}

// ----------------------------------------------------------------------- analyze

struct AnalyzeArgs {
  std::string file1, file2;
  double dt = 1.0;
  double max_gap = 600.0;  // seconds
  std::string ci_mode = "blocked";
  std::string h_grid = "1:300:1";
  std::string out = "analysis_curve.csv";
};

std::vector<PriceSeries> load_segments(const std::string& path, double dt,
                                       double max_gap) {
  QuoteLoadStats stats;
  const std::vector<QuoteRecord> raw = load_quotes(path, &stats);
  if (stats.malformed > 0) {
    std::cerr << "warning: " << path << ": " << stats.malformed
              << " malformed rows skipped (lines";
    for (std::int64_t ln : stats.malformed_lines) std::cerr << ' ' << ln;
    std::cerr << ")\n";
  }
  const std::vector<QuoteRecord> weekdays = filter_weekends(raw);
  if (weekdays.empty()) {
    throw std::runtime_error("analyze: '" + path + "' has no weekday quotes");
  }
  std::vector<PriceSeries> segments;
  for (const auto& [begin, end] : segment_on_gaps(weekdays, max_gap)) {
    const PriceSeries series = to_mid_series(
        std::span<const QuoteRecord>(weekdays.data() + begin, end - begin), dt);
    if (!series.mids.empty()) segments.push_back(series);
  }
  if (segments.empty()) {
    throw std::runtime_error("analyze: '" + path + "' yields no resampled data");
  }
  return segments;
}

void run_analyze(const AnalyzeArgs& args) {
  const CiMode mode = args.ci_mode == "overlapping" ? CiMode::overlapping
                                                    : CiMode::blocked;
  const std::vector<double> grid = parse_h_grid(args.h_grid);
  const std::vector<PriceSeries> segs1 = load_segments(args.file1, args.dt, args.max_gap);
  const std::vector<PriceSeries> segs2 = load_segments(args.file2, args.dt, args.max_gap);
  const std::vector<AlignedPair> pairs = align_segments(segs1, segs2);
  if (pairs.empty()) {
    throw std::runtime_error("analyze: the two files share no aligned data");
  }
  const CorrelationCurve curve = correlation_curve(pairs, grid, mode);
  csv::write_curve(args.out, curve);

  MetaEntries meta;
  meta_add(meta, "command", std::string("analyze"));
  meta_add(meta, "file1", args.file1);
  meta_add(meta, "file2", args.file2);
  meta_add(meta, "dt", args.dt);
  meta_add(meta, "max_gap_seconds", args.max_gap);
  meta_add(meta, "ci_mode", args.ci_mode);
  meta_add(meta, "h_grid", args.h_grid);
  meta_add(meta, "out", args.out);
  csv::write_metadata(args.out + ".meta", meta);
  std::cout << "wrote " << curve.rows.size() << " rows to " << args.out << " from "
            << pairs.size() << " aligned segment pair(s)\n";
}

// ----------------------------------------------------------------------- compare

struct CompareArgs {
  std::vector<std::string> files;
  std::string out = "compare.csv";
};

void run_compare(const CompareArgs& args) {
  std::vector<csv::CurveFile> curves;
  std::vector<std::string> labels;
  for (const std::string& path : args.files) {
    curves.push_back(csv::read_curve(path));
    std::string label = stem_label(path);
    // de-duplicate identical stems
    int suffix = 2;
    std::string candidate = label;
    while (std::find(labels.begin(), labels.end(), candidate) != labels.end()) {
      candidate = label + "_" + std::to_string(suffix++);
    }
    labels.push_back(candidate);
  }
  csv::write_joined_curves(args.out, curves, labels);

  MetaEntries meta;
  meta_add(meta, "command", std::string("compare"));
  for (std::size_t i = 0; i < args.files.size(); ++i) {
    meta_add(meta, "input" + std::to_string(i + 1), args.files[i]);
  }
  meta_add(meta, "out", args.out);
  csv::write_metadata(args.out + ".meta", meta);
  std::cout << "wrote joined curve to " << args.out << "\n";
}

}  // namespace

std::vector<double> parse_h_grid(const std::string& text) {
  std::vector<double> parts;
  std::string token;
  std::istringstream ss(text);
  while (std::getline(ss, token, ':')) parts.push_back(std::stod(token));

  std::vector<double> grid;
  if (parts.size() == 1) {
    grid.push_back(parts[0]);
  } else if (parts.size() == 3) {
    const double start = parts[0], stop = parts[1], step = parts[2];
    if (!(step > 0.0) || stop < start) {
      throw std::invalid_argument("h grid: need start <= stop and step > 0");
    }
    for (std::int64_t i = 0;; ++i) {
      const double v = start + static_cast<double>(i) * step;
      if (v > stop * (1.0 + 1e-12) + 1e-12) break;
      grid.push_back(v);
    }
  } else {
    throw std::invalid_argument("h grid: expected '<h>' or 'start:stop:step'");
  }
  for (const double h : grid) {
    if (!(h > 0.0)) throw std::invalid_argument("h grid: horizons must be positive");
  }
  return grid;
}

int run(const std::vector<std::string>& args) {
  CLI::App app{"Cross-correlation laboratory: closed-form momentum model, "
               "Monte Carlo oracle, agent-based market, tick-data pipeline"};
  app.require_subcommand(1);
  app.set_config("--config", "", "Key-value config file (sections per subcommand)");

  GaussianCurveArgs curve_args;
  CLI::App* curve_cmd = app.add_subcommand(
      "gaussian-curve", "Evaluate the closed-form correlation curve");
  add_gaussian_options(*curve_cmd, curve_args.model);
  curve_cmd->add_option("--h-grid", curve_args.h_grid, "Horizon grid start:stop:step");
  curve_cmd->add_option("--out", curve_args.out, "Output CSV path");

  GaussianMcArgs mc_args;
  CLI::App* mc_cmd = app.add_subcommand(
      "gaussian-mc", "Monte Carlo check of the closed-form curve");
  add_gaussian_options(*mc_cmd, mc_args.model);
  mc_cmd->add_option("--h-grid", mc_args.h_grid, "Horizon grid start:stop:step");
  mc_cmd->add_option("--out", mc_args.out, "Output CSV path");
  mc_cmd->add_option("--dt", mc_args.dt, "Step size, seconds (must divide tau)");
  mc_cmd->add_option("--steps", mc_args.steps, "Number of steps");
  mc_cmd->add_option("--seed", mc_args.seed, "Top-level RNG seed");

  AbmArgs abm_args;
  CLI::App* abm_cmd =
      app.add_subcommand("abm-run", "Run the three-agent discrete market");
  add_abm_options(*abm_cmd, abm_args);

  AnalyzeArgs an_args;
  CLI::App* an_cmd =
      app.add_subcommand("analyze", "Correlation curve from two quote CSV files");
  an_cmd->add_option("file1", an_args.file1, "Quote CSV (timestamp_us,bid,ask)")
      ->required();
  an_cmd->add_option("file2", an_args.file2, "Quote CSV (timestamp_us,bid,ask)")
      ->required();
  an_cmd->add_option("--dt", an_args.dt, "Resampling grid, seconds");
  an_cmd->add_option("--max-gap", an_args.max_gap,
                     "Gap threshold splitting the series, seconds");
  an_cmd->add_option("--ci-mode", an_args.ci_mode, "blocked|overlapping")
      ->check(CLI::IsMember({"blocked", "overlapping"}));
  an_cmd->add_option("--h-grid", an_args.h_grid, "Horizon grid start:stop:step");
  an_cmd->add_option("--out", an_args.out, "Output CSV path");

  CompareArgs cmp_args;
  CLI::App* cmp_cmd =
      app.add_subcommand("compare", "Inner-join curve CSVs on the h column");
  cmp_cmd->add_option("files", cmp_args.files, "Curve CSV paths")
      ->required()
      ->expected(2, -1);
  cmp_cmd->add_option("--out", cmp_args.out, "Output CSV path");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (curve_cmd->parsed()) run_gaussian_curve(curve_args);
    if (mc_cmd->parsed()) run_gaussian_mc(mc_args);
    if (abm_cmd->parsed()) run_abm(abm_args);
    if (an_cmd->parsed()) run_analyze(an_args);
    if (cmp_cmd->parsed()) run_compare(cmp_args);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

int run(int argc, char** argv) {
  std::vector<std::string> args;
  args.reserve(static_cast<std::size_t>(argc > 0 ? argc - 1 : 0));
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run(args);
}

}  // namespace epps::cli
