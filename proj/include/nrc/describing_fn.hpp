#pragma once

#include <complex>
#include <optional>
#include <span>
#include <vector>

#include "nrc/plant.hpp"

namespace nrc {

// First-harmonic model of the burst controller: a sinusoid A sin(wt) fires a
// +1 pulse of width beta at each rising zero crossing and a -1 pulse at each
// falling one. Valid while the pulse is shorter than half a period.

/// |N_beta(A, w)| = 4/(A pi) sin(w beta / 2).
double describing_fn_mag(double amplitude, double omega, double beta);

/// arg N_beta(A, w) = (pi - w beta)/2, independent of the amplitude.
double describing_fn_phase(double omega, double beta);

std::complex<double> describing_fn(double amplitude, double omega, double beta);

/// Limit cycle predicted by harmonic balance for a fixed burst width.
struct HBSolution {
  double beta = 0.0;       // burst width [s]
  double omega = 0.0;      // frequency [rad/s], in (0, pi/beta)
  double amplitude = 0.0;  // amplitude [rad]
};

struct DesignPoint {
  double a_star = 0.0;      // desired amplitude [rad]
  double beta_star = 0.0;   // burst width achieving it [s]
  double omega_star = 0.0;  // predicted frequency at beta_star [rad/s]
};

struct BetaBracket {
  double low = 0.0;
  double high = 0.0;
};

inline constexpr double kDefaultPhaseTol = 1e-10;
inline constexpr double kDefaultAmplitudeTol = 1e-8;

/// |N_beta(A, w) P(jw) - 1|.
double hb_residual(double amplitude, double omega, double beta, const PlantParams& p);

/// Solves the harmonic-balance equation N_beta(A, w) P(jw) = 1 for (w, A).
///
/// The phase condition (pi - w beta)/2 = -arg P(jw) has exactly one root on
/// (0, pi/beta) when xi > 0 (left side decreasing, right side increasing), found
/// by bisection to `phase_tol`. The amplitude follows from the magnitude
/// condition, A = (4/pi)|P(jw)| sin(w beta/2).
HBSolution solve_hb(double beta, const PlantParams& p, double phase_tol = kDefaultPhaseTol);

/// solve_hb over a grid. Throws if the resulting amplitudes are not strictly
/// increasing in beta (the grid need not be sorted; monotonicity is checked in
/// beta order).
std::vector<HBSolution> amplitude_curve(std::span<const double> beta_grid, const PlantParams& p);

/// [1e-4, 0.9 pi/omega_n].
BetaBracket default_beta_bracket(const PlantParams& p);

/// Inverts beta -> A_hat(beta) by bisection on `bracket`. A_hat is probed on
/// the bracket first: an explicit bracket must be increasing, the default one
/// is cut back to its increasing prefix.
DesignPoint solve_design_point(double a_star, const PlantParams& p,
                               std::optional<BetaBracket> bracket = std::nullopt,
                               double amplitude_tol = kDefaultAmplitudeTol);

/// A_hat(beta), with A_hat(beta <= 0) = 0 (no actuation).
double hb_amplitude(double beta, const PlantParams& p);

}  // namespace nrc
