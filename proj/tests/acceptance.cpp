// Acceptance suite: one PASS/FAIL line per criterion.
// Usage: nrc_acceptance [--jobs N] [criterion ...]   (no criterion runs all)

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "commands.hpp"
#include "nrc/describing_fn.hpp"
#include "nrc/robust_opt.hpp"
#include "nrc/simulator.hpp"
#include "nrc/slow_model.hpp"
#include "oracles.hpp"

using namespace nrc;
namespace fs = std::filesystem;

namespace {

constexpr double kPi = std::numbers::pi;

// Pinned tolerances.
constexpr double kDesignBetaTarget = 0.0915;
constexpr double kDesignRelTol = 0.05;
constexpr double kDesignSeconds = 1.0;
constexpr double kHbRelTol = 0.10;
constexpr double kHbBetaFloor = 0.03;
constexpr double kHbSeconds = 300.0;
constexpr double kFixedPointTol = 1e-8;
constexpr double kBoundSlack = 1e-12;
constexpr double kSlowSeconds = 30.0;
constexpr double kBifurcationSeconds = 120.0;
constexpr double kMinmaxCostRelTol = 0.01;
constexpr double kDotsRelTol = 0.20;
constexpr double kRobustSeconds = 300.0;
constexpr double kHeatmapFactor = 2.0;
constexpr double kHeatmapSeconds = 1200.0;
constexpr double kFourierRelTol = 1e-6;
constexpr double kConvolutionTol = 1e-12;
constexpr double kHalfPeriodRelTol = 0.05;

struct Outcome {
  bool pass = false;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

int g_jobs = 1;

// 1
Outcome design_point() {
  const auto t0 = Clock::now();
  const auto d = solve_design_point(0.5, PlantParams{});
  const double secs = seconds_since(t0);
  const double rel = std::abs(d.beta_star - kDesignBetaTarget) / kDesignBetaTarget;
  return {rel <= kDesignRelTol && secs < kDesignSeconds,
          fmt("beta*=%.6f vs %.4f (rel %.2e, tol %.2f), %.3f s (limit %.0f s)", d.beta_star,
              kDesignBetaTarget, rel, kDesignRelTol, secs, kDesignSeconds)};
}

// 2
Outcome hb_vs_simulation() {
  const auto t0 = Clock::now();
  cli::RunConfig cfg;
  cfg.jobs = g_jobs;
  const auto r = cli::hb_sweep(cfg, 0.01, 0.2, 40);
  double gap_a = 0.0;
  double gap_w = 0.0;
  bool complete = true;
  bool mono_hb = true;
  bool mono_sim = true;
  for (std::size_t i = 0; i < r.rows.size(); ++i) {
    const auto& row = r.rows[i];
    if (!row.amp_sim || !row.omega_sim) {
      complete = false;
      continue;
    }
    if (row.beta >= kHbBetaFloor) {
      gap_a = std::max(gap_a, std::abs(*row.amp_sim - row.amp_hb) / row.amp_hb);
      gap_w = std::max(gap_w, std::abs(*row.omega_sim - row.omega_hb) / row.omega_hb);
    }
    if (i > 0) {
      mono_hb = mono_hb && row.amp_hb > r.rows[i - 1].amp_hb;
      mono_sim = mono_sim && r.rows[i - 1].amp_sim && *row.amp_sim > *r.rows[i - 1].amp_sim;
    }
  }
  const double secs = seconds_since(t0);
  return {complete && gap_a <= kHbRelTol && gap_w <= kHbRelTol && mono_hb && mono_sim &&
              secs < kHbSeconds,
          fmt("max gap amplitude %.3f, frequency %.3f (tol %.2f, beta >= %.2f); monotone hb=%d "
              "sim=%d; %.1f s",
              gap_a, gap_w, kHbRelTol, kHbBetaFloor, mono_hb, mono_sim, secs)};
}

struct Triple {
  double g0, g1, g2;
};

std::vector<Triple> random_triples(std::uint64_t seed, bool stable) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<Triple> out;
  while (out.size() < 1000) {
    double a = unit(rng);
    double b = unit(rng);
    const double g1 = 0.01 + 0.98 * unit(rng);
    if (a == b || b == 0.0 || a == 0.0) continue;
    if (stable != (a >= b)) std::swap(a, b);
    out.push_back({a, g1, b});
  }
  return out;
}

// 3a
Outcome slow_stable() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(101);
  std::uniform_real_distribution<double> seed(-10.0, 10.0);
  int failures = 0;
  double worst = 0.0;
  for (const auto& t : random_triples(1, true)) {
    const double fix = std::min(0.0, (t.g2 - t.g0) / (1.0 - t.g1));
    const SlowGains g{t.g0, t.g1, t.g2, 1.0, 1.0};
    const double ref = fixed_point(g);
    const double reach = 10.0 + std::abs(fix);
    const int n = static_cast<int>(std::ceil(std::log(1e-3 * kFixedPointTol / reach) / std::log(t.g1))) + 10;
    for (int s = 0; s < 50; ++s) {
      double e = seed(rng);
      for (int k = 0; k < n; ++k) e = step_error(e, g);
      const double err = std::max(std::abs(e - fix), std::abs(e - ref));
      worst = std::max(worst, err);
      failures += err > kFixedPointTol;
    }
  }
  const double secs = seconds_since(t0);
  return {failures == 0 && secs < kSlowSeconds,
          fmt("1000 triples x 50 seeds, worst distance to fixed point %.2e (tol %.0e), %d "
              "failures, %.1f s",
              worst, kFixedPointTol, failures, secs)};
}

// 3b
Outcome slow_bounded() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(103);
  std::uniform_real_distribution<double> seed(-10.0, 10.0);
  int over = 0;
  int converged = 0;
  int orbits = 0;
  double worst_ratio = 0.0;
  for (const auto& t : random_triples(2, false)) {
    const SlowGains g{t.g0, t.g1, t.g2, 1.0, 1.0};
    const double bound = (t.g0 + t.g2) / (1.0 + t.g1);
    const int n = static_cast<int>(std::ceil(std::log(1e-14) / std::log(t.g1))) + 400;
    for (int s = 0; s < 50; ++s) {
      double e = seed(rng);
      for (int k = 0; k < n; ++k) e = step_error(e, g);
      double sup = 0.0;
      double lo = 1e300;
      double hi = -1e300;
      for (int k = 0; k < 200; ++k) {
        e = step_error(e, g);
        sup = std::max(sup, std::abs(e));
        lo = std::min(lo, e);
        hi = std::max(hi, e);
      }
      ++orbits;
      worst_ratio = std::max(worst_ratio, sup / bound);
      over += sup > bound + kBoundSlack;
      converged += hi - lo < 1e-12;
    }
  }
  const double secs = seconds_since(t0);
  return {over == 0 && converged == 0 && secs < kSlowSeconds,
          fmt("%d of %d orbits exceed (g0+g2)/(1+g1) + %.0e (worst tail sup / bound %.4f), %d "
              "converge, %.1f s",
              over, orbits, kBoundSlack, worst_ratio, converged, secs)};
}

// 4
Outcome bifurcation_flip() {
  const auto t0 = Clock::now();
  cli::RunConfig cfg;
  cfg.jobs = g_jobs;
  const auto design = solve_design_point(cfg.a_star, cfg.plant);
  bool flip = true;
  for (double c : {0.01, 0.05, 0.2, 0.5, 1.0}) {
    const double gs = bifurcation_gamma(c, design);
    const auto below = classify(make_gains(gs * (1 - 1e-12), c, design.beta_star, design.omega_star));
    const auto above = classify(make_gains(gs * (1 + 1e-12), c, design.beta_star, design.omega_star));
    // at gamma* itself g0 and g2 agree to rounding, so either label is admissible there
    const auto at = make_gains(gs, c, design.beta_star, design.omega_star);
    flip = flip && below.regime == SlowRegime::StableFixedPoint &&
           above.regime == SlowRegime::UltimatelyBounded &&
           std::abs(at.g0 - at.g2) <= 4e-16 * at.g0;
  }
  const double gs = bifurcation_gamma(cfg.adaptive.c, design);
  const std::vector<double> gammas{0.5 * gs, 2.0 * gs};
  const auto runs = cli::bifurcation(cfg, gammas);
  const bool ok = flip && runs[0].full_label == "converged" &&
                  runs[1].full_label == "oscillating" && runs[0].slow_label == "converged" &&
                  runs[1].slow_label == "oscillating";
  const double secs = seconds_since(t0);
  return {ok && secs < kBifurcationSeconds,
          fmt("classify flips at gamma*=%.6g: %d; full loop 0.5 gamma* %s (std %.2e), 2 gamma* %s "
              "(std %.2e), threshold %.2g gamma; %.1f s",
              gs, flip, runs[0].full_label.c_str(), runs[0].full_tail_std,
              runs[1].full_label.c_str(), runs[1].full_tail_std, cli::kConvergedStdFraction,
              secs)};
}

// 5a
Outcome robust_oracle() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(107);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  struct Case {
    UncertaintyInterval iv;
    double c, w;
  };
  std::vector<Case> cases;
  for (int i = 0; i < 100; ++i) {
    const double lo = 0.01 + 0.3 * unit(rng);
    cases.push_back({{lo, lo * (1.0 + 3.0 * unit(rng))}, 0.01 * std::pow(100.0, unit(rng)),
                     2.0 + 18.0 * unit(rng)});
  }
  std::vector<double> cell_err(cases.size());
  std::vector<double> cost_err(cases.size());
  std::vector<int> not_worse(cases.size());
  std::vector<double> rel_width(cases.size());
  std::vector<std::thread> pool;
  std::atomic<std::size_t> next{0};
  for (int j = 0; j < std::max(1, g_jobs); ++j) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < cases.size(); i = next++) {
        const auto& k = cases[i];
        const double gb = k.iv.beta_high * (1 - std::exp(-k.c * kPi / k.w)) /
                          std::exp(-k.c * kPi / (2 * k.w));
        const auto grid = oracle::log_spaced(gb * 1e-3, gb * 10.0, 1000);
        const auto [arg, best] =
            oracle::minmax_by_grid(grid, k.iv.beta_low, k.iv.beta_high, k.c, k.w, 10000);
        const double g = gamma_opt(k.iv, k.c, k.w);
        cell_err[i] = std::abs(std::log(g / arg)) / std::log(grid[1] / grid[0]);
        const double attained = worst_case(g, k.iv, k.c, k.w).value;
        cost_err[i] = std::abs(attained - best) / best;
        not_worse[i] = attained <= best;
        rel_width[i] = (k.iv.beta_high - k.iv.beta_low) / k.iv.beta_low;
      }
    });
  }
  for (auto& t : pool) t.join();
  const double cells = *std::max_element(cell_err.begin(), cell_err.end());
  const double costs = *std::max_element(cost_err.begin(), cost_err.end());
  int over = 0;
  int over_better = 0;
  double widest = 0.0;
  for (std::size_t i = 0; i < cases.size(); ++i) {
    if (cost_err[i] <= kMinmaxCostRelTol) continue;
    ++over;
    over_better += not_worse[i];
    widest = std::max(widest, rel_width[i]);
  }
  const double secs = seconds_since(t0);
  return {cells <= 1.0 + 1e-9 && costs <= kMinmaxCostRelTol && secs < kRobustSeconds,
          fmt("100 instances: worst distance %.3f grid cells (tol 1), worst cost gap %.2e (tol "
              "%.2f); %d instances over the cost tolerance, of which %d have the closed form "
              "below the grid minimum, widest (beta_high - beta_low)/beta_low among them %.3f; %.1f s",
              cells, costs, kMinmaxCostRelTol, over, over_better, widest, secs)};
}

// 5b
Outcome robust_simulation() {
  const auto t0 = Clock::now();
  cli::RunConfig cfg;
  cfg.jobs = g_jobs;
  const UncertaintyInterval iv{0.0732, 0.2288};
  const auto r = cli::optimize(cfg, iv, 16, 8);
  const double wc = r.report.predicted_cost;
  double worst = 0.0;
  int failed_runs = 0;
  for (const auto& d : r.dots) {
    if (std::isnan(d.burst_width_error)) {
      ++failed_runs;
      continue;
    }
    worst = std::max(worst, d.burst_width_error / wc);
  }
  const double secs = seconds_since(t0);
  return {failed_runs == 0 && worst <= 1.0 + kDotsRelTol && secs < kRobustSeconds,
          fmt("c=%.3g gamma_opt=%.6g worst case %.4g; max simulated burst-width error / worst "
              "case %.3f (tol %.2f), %d failed runs; %.1f s",
              r.report.c, r.report.gamma_opt, wc, worst, 1.0 + kDotsRelTol, failed_runs, secs)};
}

// 6
Outcome heatmap_consistency() {
  const auto t0 = Clock::now();
  cli::RunConfig cfg;
  cfg.jobs = g_jobs;
  const int n = 16;
  const auto full = cli::heatmap(cfg, {0.01, 1.0}, {0.01, 1.0}, n, cli::HeatmapMode::Full);
  const auto slow = cli::heatmap(cfg, {0.01, 1.0}, {0.01, 1.0}, n, cli::HeatmapMode::Slow);
  int checked = 0;
  int outside = 0;
  double worst = 1.0;
  // gamma-major: the first n/2 gamma rows are the small-gamma half
  for (int i = 0; i < n / 2 * n; ++i) {
    ++checked;
    const double a = full[i].error;
    const double b = slow[i].error;
    const double ratio = std::max(a, b) / std::min(a, b);
    if (!(ratio <= kHeatmapFactor)) ++outside;
    if (std::isfinite(ratio)) worst = std::max(worst, ratio);
  }
  const double secs = seconds_since(t0);
  return {outside == 0 && secs < kHeatmapSeconds,
          fmt("%d of %d small-gamma cells outside factor %.0f (worst ratio %.2f); %.1f s", outside,
              checked, kHeatmapFactor, worst, secs)};
}

bool alternates(const SimTrace& tr) {
  int adaptations = -1;
  for (const auto& e : tr.events) {
    if (e.kind == EventKind::Actuation) {
      if (adaptations >= 0 && adaptations != 1) return false;
      adaptations = 0;
    } else if (adaptations >= 0) {
      ++adaptations;
    }
  }
  return true;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// 7
Outcome invariants() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(109);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  double fourier = 0.0;
  for (int i = 0; i < 200; ++i) {
    const double w = 0.5 + 20.0 * unit(rng);
    const double beta = (0.01 + 0.98 * unit(rng)) * kPi / w;
    const double a = 0.1 + 3.0 * unit(rng);
    const auto ref = oracle::fourier_describing_fn(a, w, beta, 2.0 * kPi * unit(rng));
    fourier = std::max(fourier, std::abs(describing_fn(a, w, beta) - ref) / std::abs(ref));
  }

  double conv = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const double gamma = 0.001 + 0.1 * unit(rng);
    const double c = 0.01 + 2.0 * unit(rng);
    const double beta0 = 0.2 * unit(rng);
    std::vector<std::pair<double, int>> impulses;
    AdaptiveState s{beta0, 0.0};
    double t = 0.0;
    for (int k = 0; k < 500; ++k) {
      t += 0.8 * unit(rng);
      const int sign = unit(rng) < 0.5 ? -1 : 1;
      s = step_adaptive(s, t, c);
      conv = std::max(conv, std::abs(s.beta_value -
                                     oracle::convolution_beta(beta0, gamma, c, impulses, t)));
      s = apply_adaptation_impulse(s, sign, gamma);
      impulses.push_back({t, sign});
    }
  }

  const PlantParams p;
  SimOptions opts;
  opts.horizon = 200 * p.natural_period();
  opts.sample_stride = 0;
  std::vector<double> frozen_betas;
  for (int i = 0; i < 8; ++i) frozen_betas.push_back(0.03 + 0.17 * i / 7);
  std::vector<std::pair<double, double>> adaptive{{0.002, 0.2}, {0.0075, 0.2}, {0.02, 0.2},
                                                  {0.05, 0.05}, {0.1, 1.0}, {0.3, 0.5}};
  const std::size_t total = frozen_betas.size() + adaptive.size();
  std::vector<int> alt(total, 0);
  std::vector<double> spacing(frozen_betas.size(), 0.0);
  std::vector<std::thread> pool;
  std::atomic<std::size_t> next{0};
  for (int j = 0; j < std::max(1, g_jobs); ++j) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < total; i = next++) {
        if (i < frozen_betas.size()) {
          InitialCondition init;
          init.beta = frozen_betas[i];
          const auto tr = run_closed_loop(p, {}, 0.5, init, opts);
          alt[i] = alternates(tr);
          const double half = kPi / solve_hb(frozen_betas[i], p).omega;
          double prev = -1.0;
          for (const auto& e : tr.events) {
            if (e.kind != EventKind::Actuation || e.time < 0.75 * tr.final_time) continue;
            if (prev >= 0.0) spacing[i] = std::max(spacing[i], std::abs(e.time - prev - half) / half);
            prev = e.time;
          }
        } else {
          const auto [g, c] = adaptive[i - frozen_betas.size()];
          alt[i] = alternates(run_closed_loop(p, {g, c}, 0.5, {}, opts));
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  const int alternating = static_cast<int>(std::count(alt.begin(), alt.end(), 1));
  const double worst_spacing = *std::max_element(spacing.begin(), spacing.end());

  cli::RunConfig cfg;
  cfg.horizon_periods = 30;
  cfg.jobs = g_jobs;
  std::vector<std::string> first;
  bool identical = true;
  for (int pass = 0; pass < 2; ++pass) {
    cfg.out_dir = fs::temp_directory_path() / ("nrc_acceptance_" + std::to_string(pass));
    fs::remove_all(cfg.out_dir);
    fs::create_directories(cfg.out_dir);
    cli::write_hb_sweep(cfg, cli::hb_sweep(cfg, 0.02, 0.2, 6));
    cli::write_heatmap(cfg, cli::heatmap(cfg, {0.01, 1.0}, {0.01, 1.0}, 3, cli::HeatmapMode::Full),
                       3, cli::HeatmapMode::Full);
    const std::vector<double> gammas{0.004, 0.015};
    cli::write_bifurcation(cfg, cli::bifurcation(cfg, gammas));
    cli::write_optimize(cfg, cli::optimize(cfg, {0.0732, 0.2288}, 6, 2), 6);
    const auto trace = run_closed_loop(cfg.plant, cfg.adaptive, cfg.a_star, cfg.init,
                                       cfg.sim_options(10));
    cli::write_simulation(cfg, trace, nullptr);
    std::vector<std::string> files;
    for (const auto& entry : fs::directory_iterator(cfg.out_dir)) {
      if (entry.path().extension() == ".csv") files.push_back(entry.path().filename().string());
    }
    std::sort(files.begin(), files.end());
    std::vector<std::string> contents;
    for (const auto& f : files) contents.push_back(f + "\n" + slurp(cfg.out_dir / f));
    if (pass == 0) {
      first = contents;
    } else {
      identical = contents == first && !contents.empty();
    }
  }

  const double secs = seconds_since(t0);
  const bool ok = fourier <= kFourierRelTol && conv <= kConvolutionTol &&
                  alternating == static_cast<int>(total) && worst_spacing <= kHalfPeriodRelTol &&
                  identical;
  return {ok, fmt("Fourier rel err %.1e (tol %.0e); convolution err %.1e (tol %.0e); alternation "
                  "%d/%zu traces; half-period spacing %.3f (tol %.2f); byte-identical CSV %d; "
                  "%.1f s",
                  fourier, kFourierRelTol, conv, kConvolutionTol, alternating, total,
                  worst_spacing, kHalfPeriodRelTol, identical, secs)};
}

struct Criterion {
  const char* id;
  const char* title;
  std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance suite"};
  std::vector<std::string> selected;
  app.add_option("--jobs", g_jobs, "worker threads")->check(CLI::PositiveNumber);
  app.add_option("criteria", selected, "criterion ids (default: all)");
  CLI11_PARSE(app, argc, argv);

  const std::vector<Criterion> all{
      {"1", "design point reproduction", design_point},
      {"2", "harmonic balance vs simulation", hb_vs_simulation},
      {"3a", "slow model, stable regime converges", slow_stable},
      {"3b", "slow model, bounded regime within (g0+g2)/(1+g1)", slow_bounded},
      {"4", "bifurcation flip", bifurcation_flip},
      {"5a", "robust optimum vs grid oracle", robust_oracle},
      {"5b", "simulated burst-width errors vs worst case", robust_simulation},
      {"6", "heatmap consistency, small-gamma half", heatmap_consistency},
      {"7", "invariant suites", invariants},
  };

  int failures = 0;
  int ran = 0;
  for (const auto& c : all) {
    if (!selected.empty() && std::find(selected.begin(), selected.end(), c.id) == selected.end()) {
      continue;
    }
    ++ran;
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::printf("%s criterion %s (%s): %s\n", o.pass ? "PASS" : "FAIL", c.id, c.title,
                o.detail.c_str());
    std::fflush(stdout);
    failures += !o.pass;
  }
  if (ran == 0) {
    std::fprintf(stderr, "no matching criterion\n");
    return 2;
  }
  return failures == 0 ? 0 : 1;
}
