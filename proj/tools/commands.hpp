#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "nrc/describing_fn.hpp"
#include "nrc/plant.hpp"
#include "nrc/robust_opt.hpp"
#include "nrc/simulator.hpp"

namespace nrc::cli {

/// Parameters shared by every subcommand.
struct RunConfig {
  PlantParams plant;
  AdaptiveParams adaptive{0.0075, 0.2};
  double a_star = 0.5;
  double horizon_periods = 200.0;  // in natural periods 2 pi/omega_n
  double dt_frac = 1e-3;           // step as a fraction of the natural period
  double tail_fraction = 0.25;
  InitialCondition init;
  std::filesystem::path out_dir = ".";
  int jobs = 1;

  void validate() const;
  double horizon() const { return horizon_periods * plant.natural_period(); }
  double dt() const { return dt_frac * plant.natural_period(); }
  SimOptions sim_options(int sample_stride = 0) const;
};

struct LogRange {
  double low = 0.01;
  double high = 1.0;
};

std::vector<double> log_grid(LogRange range, int points);
std::vector<double> linear_grid(double low, double high, int points);

// hb-sweep

struct HbSweepRow {
  double beta = 0.0;
  double omega_hb = 0.0;
  double amp_hb = 0.0;
  std::optional<double> omega_sim;
  std::optional<double> amp_sim;
  std::string warning;
};

struct HbSweepResult {
  std::vector<HbSweepRow> rows;
  double max_rel_gap_amp = 0.0;    // over rows with both columns present
  double max_rel_gap_omega = 0.0;
};

/// Harmonic balance and frozen-width simulation (gamma = c = 0) at each beta.
HbSweepResult hb_sweep(const RunConfig& cfg, double beta_min, double beta_max, int points);
void write_hb_sweep(const RunConfig& cfg, const HbSweepResult& result);

// heatmap

enum class HeatmapMode { Full, Slow };

struct HeatmapCell {
  double gamma = 0.0;
  double c = 0.0;
  double error = 0.0;  // NaN for cells that diverged or failed
};

/// Ultimate amplitude error over a (gamma, c) grid; cells ordered gamma-major.
/// Full: sup over tail peaks of |peak - A*| from simulation. Slow: the slow
/// model's limit set mapped through A_hat.
std::vector<HeatmapCell> heatmap(const RunConfig& cfg, LogRange gamma, LogRange c, int points,
                                 HeatmapMode mode);
void write_heatmap(const RunConfig& cfg, const std::vector<HeatmapCell>& cells, int points,
                   HeatmapMode mode);

// bifurcation

struct BifurcationRun {
  double gamma = 0.0;
  std::vector<Peak> full;      // (t_k, beta(t_k)) from simulation
  std::vector<double> slow;    // slow-model orbit beta_k
  double full_tail_std = 0.0;
  double slow_tail_std = 0.0;
  std::string full_label;      // converged | oscillating | diverged
  std::string slow_label;
};

/// A tail standard deviation of beta_k below this fraction of gamma counts as converged.
inline constexpr double kConvergedStdFraction = 0.01;

std::vector<BifurcationRun> bifurcation(const RunConfig& cfg, std::span<const double> gammas);
void write_bifurcation(const RunConfig& cfg, const std::vector<BifurcationRun>& runs);

// optimize

struct SurfaceCell {
  double gamma = 0.0;
  double c = 0.0;
  double worst_case = 0.0;
};

struct SimulatedError {
  double beta_star = 0.0;
  double a_star = 0.0;
  double burst_width_error = 0.0;  // NaN if the run failed
};

struct OptimizeResult {
  TuningReport report;
  std::vector<SurfaceCell> surface;  // gamma-major
  std::vector<SimulatedError> dots;  // at gamma_opt and the report's c
  double grid_argmin_gamma = 0.0;    // argmin of the worst case on the surface gamma grid at the report's c
  double grid_cell_ratio = 0.0;      // ratio between neighbouring gamma grid points
};

/// Log-spaced gamma axis of the optimize surface.
inline constexpr LogRange kSurfaceGammaRange{1e-3, 1.0};

OptimizeResult optimize(const RunConfig& cfg, const UncertaintyInterval& interval,
                        int surface_points, int sim_points);
void write_optimize(const RunConfig& cfg, const OptimizeResult& result, int surface_points);

// simulate

void write_simulation(const RunConfig& cfg, const SimTrace& trace, const Objectives* objectives);

}  // namespace nrc::cli
