#pragma once

#include <optional>
#include <vector>

#include "nrc/describing_fn.hpp"
#include "nrc/plant.hpp"
#include "nrc/simulator.hpp"

namespace nrc {

/// Constants of the burst-width error recursion
///   e_{k+1} = -g0 + g1 e_k - g2 sgn(e_k),   e_k = beta_k - beta*,
/// sampled at actuation events with the half period approximated by pi/omega*.
struct SlowGains {
  double g0 = 0.0;          // (1 - exp(-c pi/w*)) beta*
  double g1 = 0.0;          // exp(-c pi/w*)
  double g2 = 0.0;          // gamma exp(-c pi/(2 w*))
  double omega_star = 0.0;  // [rad/s]
  double beta_star = 0.0;   // [s]

  /// g2 == 0 (no adaptation); classify() rejects it.
  bool degenerate() const { return g2 <= 0.0; }
};

enum class SlowRegime { StableFixedPoint, UltimatelyBounded };

const char* to_string(SlowRegime regime) noexcept;

struct SlowVerdict {
  SlowRegime regime = SlowRegime::StableFixedPoint;
  double fixed_point = 0.0;
  std::optional<double> ultimate_bound;  // only in the bounded regime
};

SlowGains make_gains(double gamma, double c, double beta_star, double omega_star);
SlowGains make_gains(const AdaptiveParams& a, const DesignPoint& design);

/// One step of the error recursion with the selection sgn(0) = +1.
double step_error(double beta_err, const SlowGains& g);

/// min{0, (g2 - g0)/(1 - g1)}.
double fixed_point(const SlowGains& g);

/// g0 >= g2: globally attractive fixed point. g2 > g0: oscillation with the
/// bound (g0 + g2)/(1 + g1).
SlowVerdict classify(const SlowGains& g);

/// gamma* = 2 sinh(c pi/(2 w*)) beta*, the gain at which g0 == g2.
double bifurcation_gamma(double c, double beta_star, double omega_star);
double bifurcation_gamma(double c, const DesignPoint& design);

/// Pole c for which bifurcation_gamma(c, design) == gamma_star.
double pole_for_bifurcation(double gamma_star, const DesignPoint& design);

/// Orbit beta_0, ..., beta_n of beta_{k+1} = g1 beta_k - g2 sgn(beta_k - beta*)
/// (sgn(0) = +1). Returns n + 1 values.
std::vector<double> iterate(double beta0, const SlowGains& g, std::size_t n);

/// Period-2 orbit (e_pos, e_neg) of the error recursion in the bounded regime, if any.
std::optional<std::pair<double, double>> period_two_orbit(const SlowGains& g);

/// Ultimate amplitude error predicted by the slow model, the burst-width limit
/// set mapped through the harmonic-balance amplitude A_hat.
double predicted_amplitude_error(const SlowGains& g, double a_star, const PlantParams& p);

}  // namespace nrc
