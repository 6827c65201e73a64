#include "nrc/slow_model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "nrc/error.hpp"

namespace nrc {

namespace {

constexpr double kPi = std::numbers::pi;

}  // namespace

const char* to_string(SlowRegime regime) noexcept {
  return regime == SlowRegime::StableFixedPoint ? "stable-fixed-point" : "ultimately-bounded";
}

SlowGains make_gains(double gamma, double c, double beta_star, double omega_star) {
  if (!(omega_star > 0.0) || !(c > 0.0) || !(gamma >= 0.0) || !(beta_star > 0.0) ||
      !std::isfinite(omega_star) || !std::isfinite(c) || !std::isfinite(gamma) ||
      !std::isfinite(beta_star)) {
    throw Error(ErrorKind::InvalidInput, "slow gains need c, beta*, omega* > 0 and gamma >= 0");
  }
  const double half = std::exp(-c * kPi / omega_star);
  const double quarter = std::exp(-c * kPi / (2.0 * omega_star));
  return {-std::expm1(-c * kPi / omega_star) * beta_star, half, gamma * quarter, omega_star,
          beta_star};
}

SlowGains make_gains(const AdaptiveParams& a, const DesignPoint& design) {
  return make_gains(a.gamma, a.c, design.beta_star, design.omega_star);
}

double step_error(double beta_err, const SlowGains& g) {
  const double sgn = beta_err < 0.0 ? -1.0 : 1.0;
  return -g.g0 + g.g1 * beta_err - g.g2 * sgn;
}

double fixed_point(const SlowGains& g) { return std::min(0.0, (g.g2 - g.g0) / (1.0 - g.g1)); }

SlowVerdict classify(const SlowGains& g) {
  if (g.degenerate()) throw Error(ErrorKind::InvalidInput, "classify needs g2 > 0");
  if (!(g.g1 > 0.0 && g.g1 < 1.0)) throw Error(ErrorKind::InvalidInput, "g1 must lie in (0, 1)");
  if (g.g0 >= g.g2) return {SlowRegime::StableFixedPoint, fixed_point(g), std::nullopt};
  return {SlowRegime::UltimatelyBounded, fixed_point(g), (g.g0 + g.g2) / (1.0 + g.g1)};
}

double bifurcation_gamma(double c, double beta_star, double omega_star) {
  return 2.0 * std::sinh(c * kPi / (2.0 * omega_star)) * beta_star;
}

double bifurcation_gamma(double c, const DesignPoint& design) {
  return bifurcation_gamma(c, design.beta_star, design.omega_star);
}

double pole_for_bifurcation(double gamma_star, const DesignPoint& design) {
  if (!(gamma_star > 0.0) || !(design.beta_star > 0.0) || !(design.omega_star > 0.0)) {
    throw Error(ErrorKind::InvalidInput, "pole recovery needs positive gamma*, beta*, omega*");
  }
  return std::asinh(gamma_star / (2.0 * design.beta_star)) * 2.0 * design.omega_star / kPi;
}

std::vector<double> iterate(double beta0, const SlowGains& g, std::size_t n) {
  std::vector<double> orbit;
  orbit.reserve(n + 1);
  orbit.push_back(beta0);
  double beta = beta0;
  for (std::size_t k = 0; k < n; ++k) {
    const double sgn = beta - g.beta_star < 0.0 ? -1.0 : 1.0;
    beta = g.g1 * beta - g.g2 * sgn;
    orbit.push_back(beta);
  }
  return orbit;
}

std::optional<std::pair<double, double>> period_two_orbit(const SlowGains& g) {
  // e_pos -> g1 e_pos - g0 - g2 = e_neg -> g1 e_neg - g0 + g2 = e_pos
  const double pos = g.g2 / (1.0 + g.g1) - g.g0 / (1.0 - g.g1);
  const double neg = g.g1 * pos - g.g0 - g.g2;
  if (pos >= 0.0 && neg < 0.0) return std::make_pair(pos, neg);
  return std::nullopt;
}

double predicted_amplitude_error(const SlowGains& g, double a_star, const PlantParams& p) {
  const SlowVerdict v = classify(g);
  if (v.regime == SlowRegime::StableFixedPoint) {
    return std::abs(hb_amplitude(g.beta_star + v.fixed_point, p) - a_star);
  }
  const double bound = *v.ultimate_bound;
  // A_hat is increasing, so the extremes of the bound interval dominate.
  return std::max(std::abs(hb_amplitude(g.beta_star - bound, p) - a_star),
                  std::abs(hb_amplitude(g.beta_star + bound, p) - a_star));
}

}  // namespace nrc
