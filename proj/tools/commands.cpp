#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>
#include <numbers>
#include <sstream>

#include "nrc/error.hpp"
#include "nrc/slow_model.hpp"
#include "parallel.hpp"
#include "svg.hpp"

namespace nrc::cli {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string fmt(double v) {
  if (!std::isfinite(v)) return std::isnan(v) ? "nan" : (v > 0 ? "inf" : "-inf");
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

std::string opt(const std::optional<double>& v) { return v ? fmt(*v) : std::string{}; }

std::ofstream open_out(const RunConfig& cfg, const std::string& name) {
  std::filesystem::create_directories(cfg.out_dir);
  std::ofstream os(cfg.out_dir / name, std::ios::binary);
  if (!os) throw std::runtime_error("cannot write " + (cfg.out_dir / name).string());
  return os;
}

void write_text(const RunConfig& cfg, const std::string& name, const std::string& text) {
  auto os = open_out(cfg, name);
  os << text;
}

double tail_std(std::span<const double> values, double tail_fraction) {
  const auto start = static_cast<std::size_t>(values.size() * (1.0 - tail_fraction));
  const auto tail = values.subspan(std::min(start, values.size()));
  if (tail.size() < 2) return kNaN;
  double mean = 0.0;
  for (double v : tail) mean += v;
  mean /= tail.size();
  double var = 0.0;
  for (double v : tail) var += (v - mean) * (v - mean);
  return std::sqrt(var / tail.size());
}

}  // namespace

void RunConfig::validate() const {
  plant.validate();
  adaptive.validate();
  if (!(a_star > 0.0)) throw Error(ErrorKind::InvalidInput, "--a-star must be > 0");
  if (!(horizon_periods > 0.0)) throw Error(ErrorKind::InvalidInput, "--horizon-periods must be > 0");
  if (!(dt_frac > 0.0 && dt_frac < 0.1)) throw Error(ErrorKind::InvalidInput, "--dt-frac must lie in (0, 0.1)");
  if (!(tail_fraction > 0.0 && tail_fraction <= 1.0)) {
    throw Error(ErrorKind::InvalidInput, "tail fraction must lie in (0, 1]");
  }
  if (jobs < 1) throw Error(ErrorKind::InvalidInput, "--jobs must be >= 1");
}

SimOptions RunConfig::sim_options(int sample_stride) const {
  SimOptions o;
  o.horizon = horizon();
  o.dt = dt();
  o.sample_stride = sample_stride;
  return o;
}

std::vector<double> log_grid(LogRange range, int points) {
  if (!(range.low > 0.0 && range.high >= range.low) || points < 1) {
    throw Error(ErrorKind::InvalidInput, "log range needs 0 < low <= high and points >= 1");
  }
  std::vector<double> out(static_cast<std::size_t>(points));
  for (int i = 0; i < points; ++i) {
    const double f = points == 1 ? 0.0 : static_cast<double>(i) / (points - 1);
    out[i] = range.low * std::pow(range.high / range.low, f);
  }
  return out;
}

std::vector<double> linear_grid(double low, double high, int points) {
  if (points < 0 || !(high >= low)) throw Error(ErrorKind::InvalidInput, "bad linear grid");
  std::vector<double> out(static_cast<std::size_t>(points));
  for (int i = 0; i < points; ++i) {
    out[i] = points == 1 ? low : low + (high - low) * i / (points - 1);
  }
  return out;
}

HbSweepResult hb_sweep(const RunConfig& cfg, double beta_min, double beta_max, int points) {
  cfg.validate();
  if (!(beta_min > 0.0 && beta_max >= beta_min && beta_max < std::numbers::pi / cfg.plant.omega_n)) {
    throw Error(ErrorKind::InvalidInput, "beta range must satisfy 0 < min <= max < pi/omega_n");
  }
  const auto betas = linear_grid(beta_min, beta_max, points);
  HbSweepResult result;
  result.rows.resize(betas.size());

  parallel_for(betas.size(), cfg.jobs, [&](std::size_t i) {
    auto& row = result.rows[i];
    row.beta = betas[i];
    const HBSolution hb = solve_hb(row.beta, cfg.plant);
    row.omega_hb = hb.omega;
    row.amp_hb = hb.amplitude;
    try {
      InitialCondition init = cfg.init;
      init.beta = row.beta;
      const SimTrace trace =
          run_closed_loop(cfg.plant, AdaptiveParams{0.0, 0.0}, cfg.a_star, init, cfg.sim_options());
      const LimitCycleEstimate lc = measure_limit_cycle(trace, cfg.tail_fraction);
      row.omega_sim = lc.omega;
      row.amp_sim = lc.amplitude;
    } catch (const Error& e) {
      row.warning = e.what();
    }
  });

  for (const auto& row : result.rows) {
    if (!row.amp_sim) continue;
    result.max_rel_gap_amp =
        std::max(result.max_rel_gap_amp, std::abs(*row.amp_sim - row.amp_hb) / row.amp_hb);
    result.max_rel_gap_omega =
        std::max(result.max_rel_gap_omega, std::abs(*row.omega_sim - row.omega_hb) / row.omega_hb);
  }
  return result;
}

void write_hb_sweep(const RunConfig& cfg, const HbSweepResult& result) {
  {
    auto os = open_out(cfg, "hb_sweep.csv");
    os << "beta,omega_hb,amp_hb,omega_sim,amp_sim\n";
    for (const auto& r : result.rows) {
      os << fmt(r.beta) << ',' << fmt(r.omega_hb) << ',' << fmt(r.amp_hb) << ','
         << opt(r.omega_sim) << ',' << opt(r.amp_sim) << '\n';
    }
  }
  {
    auto os = open_out(cfg, "hb_sweep_summary.csv");
    os << "metric,value\n"
       << "max_rel_gap_amp," << fmt(result.max_rel_gap_amp) << '\n'
       << "max_rel_gap_omega," << fmt(result.max_rel_gap_omega) << '\n';
  }
  for (const auto& r : result.rows) {
    if (!r.warning.empty()) std::cerr << "warning: beta = " << r.beta << ": " << r.warning << '\n';
  }

  svg::Series hb_amp{"HB", "#e07020", {}, {}};
  svg::Series sim_amp{"simulation", "#2060c0", {}, {}};
  svg::Series hb_om = hb_amp;
  svg::Series sim_om = sim_amp;
  for (const auto& r : result.rows) {
    hb_amp.x.push_back(r.beta);
    hb_amp.y.push_back(r.amp_hb);
    hb_om.x.push_back(r.beta);
    hb_om.y.push_back(r.omega_hb);
    sim_amp.x.push_back(r.beta);
    sim_amp.y.push_back(r.amp_sim.value_or(kNaN));
    sim_om.x.push_back(r.beta);
    sim_om.y.push_back(r.omega_sim.value_or(kNaN));
  }
  write_text(cfg, "hb_sweep_amplitude.svg",
             svg::line_plot({"Limit-cycle amplitude", "burst width beta [s]", "amplitude [rad]"},
                            {hb_amp, sim_amp}));
  write_text(cfg, "hb_sweep_frequency.svg",
             svg::line_plot({"Limit-cycle frequency", "burst width beta [s]", "omega [rad/s]"},
                            {hb_om, sim_om}));
}

std::vector<HeatmapCell> heatmap(const RunConfig& cfg, LogRange gamma, LogRange c, int points,
                                 HeatmapMode mode) {
  cfg.validate();
  const auto gammas = log_grid(gamma, points);
  const auto poles = log_grid(c, points);
  const DesignPoint design = solve_design_point(cfg.a_star, cfg.plant);

  std::vector<HeatmapCell> cells(gammas.size() * poles.size());
  parallel_for(cells.size(), cfg.jobs, [&](std::size_t k) {
    auto& cell = cells[k];
    cell.gamma = gammas[k / poles.size()];
    cell.c = poles[k % poles.size()];
    try {
      if (mode == HeatmapMode::Slow) {
        cell.error = predicted_amplitude_error(
            make_gains(cell.gamma, cell.c, design.beta_star, design.omega_star), cfg.a_star,
            cfg.plant);
      } else {
        const SimTrace trace = run_closed_loop(cfg.plant, AdaptiveParams{cell.gamma, cell.c},
                                               cfg.a_star, cfg.init, cfg.sim_options());
        const double t0 = trace.final_time * (1.0 - cfg.tail_fraction);
        double err = kNaN;
        for (const auto& pk : trace.peaks) {
          if (pk.t < t0) continue;
          const double e = std::abs(pk.magnitude - cfg.a_star);
          err = std::isnan(err) ? e : std::max(err, e);
        }
        cell.error = err;
      }
    } catch (const Error&) {
      cell.error = kNaN;
    }
  });
  return cells;
}

void write_heatmap(const RunConfig& cfg, const std::vector<HeatmapCell>& cells, int points,
                   HeatmapMode mode) {
  const std::string tag = mode == HeatmapMode::Full ? "full" : "slow";
  {
    auto os = open_out(cfg, "heatmap_" + tag + ".csv");
    os << "gamma,c,error\n";
    for (const auto& cell : cells) {
      os << fmt(cell.gamma) << ',' << fmt(cell.c) << ',' << fmt(cell.error) << '\n';
    }
  }
  // colour map with c on x and gamma on y; cells are gamma-major already
  std::vector<double> cs;
  std::vector<double> gs;
  std::vector<double> values;
  for (int i = 0; i < points; ++i) {
    cs.push_back(cells[static_cast<std::size_t>(i)].c);
    gs.push_back(cells[static_cast<std::size_t>(i) * points].gamma);
  }
  for (const auto& cell : cells) values.push_back(cell.error);
  write_text(cfg, "heatmap_" + tag + ".svg",
             svg::color_map({"Ultimate amplitude error (" + tag + " model)", "c [1/s]",
                             "gamma [s]", true, true},
                            cs, gs, values));
}

std::vector<BifurcationRun> bifurcation(const RunConfig& cfg, std::span<const double> gammas) {
  cfg.validate();
  if (gammas.empty()) throw Error(ErrorKind::InvalidInput, "--gammas needs at least one value");
  const DesignPoint design = solve_design_point(cfg.a_star, cfg.plant);
  const auto steps =
      static_cast<std::size_t>(cfg.horizon() / (std::numbers::pi / design.omega_star));

  std::vector<BifurcationRun> runs(gammas.size());
  parallel_for(gammas.size(), cfg.jobs, [&](std::size_t i) {
    auto& run = runs[i];
    run.gamma = gammas[i];
    if (!(run.gamma > 0.0)) throw Error(ErrorKind::InvalidInput, "gammas must be > 0");
    const double threshold = kConvergedStdFraction * run.gamma;

    const SlowGains g = make_gains(run.gamma, cfg.adaptive.c, design.beta_star, design.omega_star);
    run.slow = iterate(cfg.init.beta, g, steps);
    run.slow_tail_std = tail_std(run.slow, cfg.tail_fraction);
    run.slow_label = run.slow_tail_std < threshold ? "converged" : "oscillating";

    try {
      const SimTrace trace = run_closed_loop(cfg.plant, AdaptiveParams{run.gamma, cfg.adaptive.c},
                                             cfg.a_star, cfg.init, cfg.sim_options());
      run.full = trace.burst_widths();
      std::vector<double> betas;
      for (const auto& pk : run.full) betas.push_back(pk.magnitude);
      run.full_tail_std = tail_std(betas, cfg.tail_fraction);
      run.full_label = run.full_tail_std < threshold ? "converged" : "oscillating";
    } catch (const DivergenceError&) {
      run.full_tail_std = kNaN;
      run.full_label = "diverged";
    }
  });
  return runs;
}

void write_bifurcation(const RunConfig& cfg, const std::vector<BifurcationRun>& runs) {
  const DesignPoint design = solve_design_point(cfg.a_star, cfg.plant);
  const double gamma_star = bifurcation_gamma(cfg.adaptive.c, design);
  const double half_period = std::numbers::pi / design.omega_star;
  {
    auto os = open_out(cfg, "bifurcation.csv");
    os << "gamma,model,k,t,beta\n";
    for (const auto& run : runs) {
      for (std::size_t k = 0; k < run.full.size(); ++k) {
        os << fmt(run.gamma) << ",full," << k << ',' << fmt(run.full[k].t) << ','
           << fmt(run.full[k].magnitude) << '\n';
      }
      for (std::size_t k = 0; k < run.slow.size(); ++k) {
        os << fmt(run.gamma) << ",slow," << k << ',' << fmt(k * half_period) << ','
           << fmt(run.slow[k]) << '\n';
      }
    }
  }
  {
    auto os = open_out(cfg, "bifurcation_summary.csv");
    os << "gamma,gamma_ratio,full_label,full_tail_std,slow_label,slow_tail_std\n";
    for (const auto& run : runs) {
      os << fmt(run.gamma) << ',' << fmt(run.gamma / gamma_star) << ',' << run.full_label << ','
         << fmt(run.full_tail_std) << ',' << run.slow_label << ',' << fmt(run.slow_tail_std)
         << '\n';
    }
  }
  static const char* palette[] = {"#2060c0", "#e07020", "#20a040", "#c02040", "#8040c0", "#606060"};
  std::vector<svg::Series> series;
  for (std::size_t i = 0; i < runs.size(); ++i) {
    svg::Series s{"gamma = " + fmt(runs[i].gamma), palette[i % 6], {}, {}};
    for (const auto& pk : runs[i].full) {
      s.x.push_back(pk.t);
      s.y.push_back(pk.magnitude);
    }
    series.push_back(std::move(s));
  }
  write_text(cfg, "bifurcation.svg",
             svg::line_plot({"Burst width at actuation events (full model)", "t [s]", "beta [s]"},
                            series));
}

OptimizeResult optimize(const RunConfig& cfg, const UncertaintyInterval& interval,
                        int surface_points, int sim_points) {
  cfg.validate();
  OptimizeResult result;
  result.report = tune(cfg.a_star, cfg.plant, interval, cfg.adaptive.c);
  const double omega_star = result.report.omega_star;

  const auto gammas = log_grid(kSurfaceGammaRange, surface_points);
  const auto poles = log_grid({0.01, 1.0}, surface_points);
  result.grid_cell_ratio = surface_points > 1 ? gammas[1] / gammas[0] : 1.0;
  for (double g : gammas) {
    for (double c : poles) result.surface.push_back({g, c, worst_case(g, interval, c, omega_star).value});
  }
  double best = std::numeric_limits<double>::infinity();
  for (double g : gammas) {
    const double v = worst_case(g, interval, result.report.c, omega_star).value;
    if (v < best) {
      best = v;
      result.grid_argmin_gamma = g;
    }
  }

  const auto betas = linear_grid(interval.beta_low, interval.beta_high, sim_points);
  result.dots.resize(betas.size());
  parallel_for(betas.size(), cfg.jobs, [&](std::size_t i) {
    auto& dot = result.dots[i];
    dot.beta_star = betas[i];
    dot.burst_width_error = kNaN;
    try {
      dot.a_star = solve_hb(dot.beta_star, cfg.plant).amplitude;
      const SimTrace trace =
          run_closed_loop(cfg.plant, AdaptiveParams{result.report.gamma_opt, result.report.c},
                          dot.a_star, cfg.init, cfg.sim_options());
      dot.burst_width_error = burst_width_error(trace, dot.beta_star, cfg.tail_fraction);
    } catch (const Error&) {
    }
  });
  return result;
}

void write_optimize(const RunConfig& cfg, const OptimizeResult& result, int surface_points) {
  {
    auto os = open_out(cfg, "optimize_report.csv");
    write_report_csv(os, result.report);
  }
  {
    std::ostringstream text;
    write_report_text(text, result.report);
    text << "  surface argmin gamma     " << fmt(result.grid_argmin_gamma) << " s (grid ratio "
         << fmt(result.grid_cell_ratio) << ")\n";
    write_text(cfg, "optimize_report.txt", text.str());
  }
  {
    auto os = open_out(cfg, "optimize_surface.csv");
    os << "gamma,c,worst_case\n";
    for (const auto& cell : result.surface) {
      os << fmt(cell.gamma) << ',' << fmt(cell.c) << ',' << fmt(cell.worst_case) << '\n';
    }
  }
  {
    auto os = open_out(cfg, "optimize_simulation.csv");
    os << "beta_star,a_star,gamma_opt,c,burst_width_error,worst_case\n";
    for (const auto& dot : result.dots) {
      os << fmt(dot.beta_star) << ',' << fmt(dot.a_star) << ',' << fmt(result.report.gamma_opt)
         << ',' << fmt(result.report.c) << ',' << fmt(dot.burst_width_error) << ','
         << fmt(result.report.predicted_cost) << '\n';
    }
  }
  std::vector<double> cs;
  std::vector<double> gs;
  std::vector<double> values;
  for (int i = 0; i < surface_points; ++i) {
    cs.push_back(result.surface[static_cast<std::size_t>(i)].c);
    gs.push_back(result.surface[static_cast<std::size_t>(i) * surface_points].gamma);
  }
  for (const auto& cell : result.surface) values.push_back(cell.worst_case);
  write_text(cfg, "optimize_surface.svg",
             svg::color_map({"Worst-case burst-width error", "c [1/s]", "gamma [s]", true, true}, cs,
                            gs, values));

  svg::Series sim{"simulation", "#2060c0", {}, {}, true};
  svg::Series bound{"worst case", "#e07020", {}, {}};
  for (const auto& dot : result.dots) {
    sim.x.push_back(dot.beta_star);
    sim.y.push_back(dot.burst_width_error);
    bound.x.push_back(dot.beta_star);
    bound.y.push_back(result.report.predicted_cost);
  }
  write_text(cfg, "optimize_simulation.svg",
             svg::line_plot({"Burst-width error at gamma_opt", "beta* [s]", "error [s]"},
                            {bound, sim}));
}

void write_simulation(const RunConfig& cfg, const SimTrace& trace, const Objectives* objectives) {
  {
    auto os = open_out(cfg, "trace.csv");
    write_trace_csv(os, trace);
  }
  {
    auto os = open_out(cfg, "events.csv");
    write_events_csv(os, trace);
  }
  if (objectives) {
    auto os = open_out(cfg, "objectives.csv");
    os << "periodicity_residual,amplitude_error,ultimate_amplitude_error\n"
       << fmt(objectives->periodicity_residual) << ',' << fmt(objectives->amplitude_error) << ','
       << fmt(objectives->ultimate_amplitude_error) << '\n';
  }
  svg::Series y{"y", "#2060c0", {}, {}};
  svg::Series beta{"beta", "#e07020", {}, {}};
  const std::size_t stride = std::max<std::size_t>(1, trace.samples.size() / 4000);
  for (std::size_t i = 0; i < trace.samples.size(); i += stride) {
    y.x.push_back(trace.samples[i].t);
    y.y.push_back(trace.samples[i].y);
    beta.x.push_back(trace.samples[i].t);
    beta.y.push_back(trace.samples[i].beta);
  }
  write_text(cfg, "trace_y.svg", svg::line_plot({"Pendulum angle", "t [s]", "y [rad]"}, {y}));
  write_text(cfg, "trace_beta.svg",
             svg::line_plot({"Burst width", "t [s]", "beta [s]"}, {beta}));
}

}  // namespace nrc::cli
