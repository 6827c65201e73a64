#include <CLI11.hpp>

#include <iostream>
#include <string>
#include <vector>

#include "commands.hpp"
#include "nrc/error.hpp"
#include "nrc/slow_model.hpp"

namespace {

constexpr int kUsageError = 1;
constexpr int kNumericalFailure = 2;

}  // namespace

int main(int argc, char** argv) {
  using namespace nrc;
  using namespace nrc::cli;

  CLI::App app{"Event-based rhythmic pendulum control: harmonic balance, slow dynamics, tuning"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_config("--config", "", "key = value file; command-line flags take precedence");

  RunConfig cfg;
  std::string out_dir = ".";
  app.add_option("--lambda", cfg.plant.lambda_gain, "Input gain")->capture_default_str();
  app.add_option("--xi", cfg.plant.xi, "Damping ratio")->capture_default_str();
  app.add_option("--omega-n", cfg.plant.omega_n, "Natural frequency [rad/s]")->capture_default_str();
  app.add_option("--a-star", cfg.a_star, "Desired amplitude [rad]")->capture_default_str();
  app.add_option("--gamma", cfg.adaptive.gamma, "Adaptation gain")->capture_default_str();
  app.add_option("--c", cfg.adaptive.c, "Adaptation pole [1/s]")->capture_default_str();
  app.add_option("--horizon-periods", cfg.horizon_periods, "Horizon in natural periods")
      ->capture_default_str();
  app.add_option("--dt-frac", cfg.dt_frac, "Step as a fraction of the natural period")
      ->capture_default_str();
  app.add_option("--tail-fraction", cfg.tail_fraction, "Fraction of the horizon used for metrics")
      ->capture_default_str();
  app.add_option("--y0", cfg.init.plant.y, "Initial angle [rad]")->capture_default_str();
  app.add_option("--beta0", cfg.init.beta, "Initial burst width [s]")->capture_default_str();
  app.add_option("--out", out_dir, "Output directory")->capture_default_str();
  app.add_option("--jobs", cfg.jobs, "Worker threads")->capture_default_str();

  auto* sweep = app.add_subcommand("hb-sweep", "Harmonic balance vs simulation over burst widths");
  double beta_min = 0.01;
  double beta_max = 0.2;
  int sweep_points = 40;
  sweep->add_option("--beta-min", beta_min)->capture_default_str();
  sweep->add_option("--beta-max", beta_max)->capture_default_str();
  sweep->add_option("--points", sweep_points)->capture_default_str();

  auto* simulate = app.add_subcommand("simulate", "Single closed-loop run with trace export");
  int stride = 1;
  bool literal = false;
  double omega_ref = 0.0;
  simulate->add_option("--stride", stride, "Record every n-th grid point")->capture_default_str();
  simulate->add_flag("--literal-sign", literal, "Adaptation sign sgn(A* - y) instead of sgn(A* - |y|)");
  simulate->add_option("--omega-ref", omega_ref, "Reference frequency for objectives (default omega*)");

  auto* heat = app.add_subcommand("heatmap", "Ultimate amplitude error over (gamma, c)");
  std::vector<double> gamma_range{0.01, 1.0};
  std::vector<double> c_range{0.01, 1.0};
  int heat_points = 16;
  std::string mode = "full";
  heat->add_option("--gamma-range", gamma_range)->expected(2)->capture_default_str();
  heat->add_option("--c-range", c_range)->expected(2)->capture_default_str();
  heat->add_option("--points-per-axis", heat_points)->capture_default_str();
  heat->add_option("--mode", mode)->check(CLI::IsMember({"full", "slow"}))->capture_default_str();

  auto* bif = app.add_subcommand("bifurcation", "Burst-width dynamics around the bifurcation gain");
  std::vector<double> gammas;
  bool relative = false;
  bif->add_option("--gammas", gammas, "Adaptation gains")->required()->expected(1, -1);
  bif->add_flag("--relative", relative, "Interpret --gammas as multiples of gamma*");

  auto* optim = app.add_subcommand("optimize", "Robust gain, worst-case surface and simulated errors");
  double beta_low = 0.0;
  double beta_high = 0.0;
  int surface_points = 32;
  int sim_points = 8;
  optim->add_option("--beta-low", beta_low)->required();
  optim->add_option("--beta-high", beta_high)->required();
  optim->add_option("--surface-points", surface_points)->capture_default_str()->check(CLI::PositiveNumber);
  optim->add_option("--sim-points", sim_points)->capture_default_str()->check(CLI::NonNegativeNumber);

  auto* tune_cmd = app.add_subcommand("tune", "Four-step tuning of the adaptation gain");
  PlantUncertainty rel;
  double tune_low = 0.0;
  double tune_high = 0.0;
  tune_cmd->add_option("--rel-lambda", rel.rel_lambda)->capture_default_str();
  tune_cmd->add_option("--rel-xi", rel.rel_xi)->capture_default_str();
  tune_cmd->add_option("--rel-omega-n", rel.rel_omega_n)->capture_default_str();
  auto* lo_opt = tune_cmd->add_option("--beta-low", tune_low, "Direct interval instead of plant uncertainty");
  auto* hi_opt = tune_cmd->add_option("--beta-high", tune_high);
  lo_opt->needs(hi_opt);
  hi_opt->needs(lo_opt);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kUsageError;
  }
  cfg.out_dir = out_dir;

  try {
    cfg.validate();
    if (*sweep) {
      const auto result = hb_sweep(cfg, beta_min, beta_max, sweep_points);
      write_hb_sweep(cfg, result);
      std::cout << "max relative amplitude gap " << result.max_rel_gap_amp
                << ", frequency gap " << result.max_rel_gap_omega << '\n';
    } else if (*simulate) {
      const SimTrace trace = run_closed_loop(cfg.plant, cfg.adaptive, cfg.a_star, cfg.init, [&] {
        SimOptions o = cfg.sim_options(stride);
        o.rule = literal ? AdaptationRule::Literal : AdaptationRule::PeakMagnitude;
        return o;
      }());
      std::optional<Objectives> objectives;
      try {
        const double w = omega_ref > 0.0 ? omega_ref
                                         : solve_design_point(cfg.a_star, cfg.plant).omega_star;
        objectives = measure_objectives(trace, cfg.a_star, w, cfg.tail_fraction);
      } catch (const Error& e) {
        std::cerr << "warning: objectives not computed: " << e.what() << '\n';
      }
      write_simulation(cfg, trace, objectives ? &*objectives : nullptr);
      std::cout << trace.events.size() << " events, " << trace.peaks.size() << " extrema\n";
      if (objectives) {
        std::cout << "periodicity residual " << objectives->periodicity_residual
                  << ", ultimate amplitude error " << objectives->ultimate_amplitude_error << '\n';
      }
    } else if (*heat) {
      const auto m = mode == "full" ? HeatmapMode::Full : HeatmapMode::Slow;
      const auto cells = heatmap(cfg, {gamma_range[0], gamma_range[1]}, {c_range[0], c_range[1]},
                                 heat_points, m);
      write_heatmap(cfg, cells, heat_points, m);
      std::cout << cells.size() << " cells written\n";
    } else if (*bif) {
      if (relative) {
        const double gamma_star =
            bifurcation_gamma(cfg.adaptive.c, solve_design_point(cfg.a_star, cfg.plant));
        for (double& g : gammas) g *= gamma_star;
      }
      const auto runs = bifurcation(cfg, gammas);
      write_bifurcation(cfg, runs);
      for (const auto& r : runs) {
        std::cout << "gamma " << r.gamma << ": full " << r.full_label << ", slow " << r.slow_label
                  << '\n';
      }
    } else if (*optim) {
      const auto result =
          optimize(cfg, UncertaintyInterval{beta_low, beta_high}, surface_points, sim_points);
      write_optimize(cfg, result, surface_points);
      write_report_text(std::cout, result.report);
    } else if (*tune_cmd) {
      TuningReport report;
      if (*lo_opt) {
        report = tune(cfg.a_star, cfg.plant, UncertaintyInterval{tune_low, tune_high}, cfg.adaptive.c);
      } else {
        report = tune(cfg.a_star, cfg.plant, rel, cfg.adaptive.c);
      }
      write_report_text(std::cout, report);
      std::filesystem::create_directories(cfg.out_dir);
      std::ofstream os(cfg.out_dir / "tune_report.csv", std::ios::binary);
      write_report_csv(os, report);
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return e.kind() == ErrorKind::InvalidInput ? kUsageError : kNumericalFailure;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kNumericalFailure;
  }
  return 0;
}
