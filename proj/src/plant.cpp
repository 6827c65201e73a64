#include "nrc/plant.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "nrc/error.hpp"

namespace nrc {

namespace {

void require_finite(double v, const char* name) {
  if (!std::isfinite(v)) {
    throw Error(ErrorKind::InvalidInput, std::string(name) + " is not finite");
  }
}

void check_frequency(double omega, const PlantParams& p) {
  require_finite(omega, "omega");
  if (omega < 0.0) throw Error(ErrorKind::InvalidInput, "omega must be >= 0");
  if (p.xi == 0.0 && omega == p.omega_n) {
    throw Error(ErrorKind::PoleOnAxis, "undamped plant evaluated at its natural frequency");
  }
}

}  // namespace

void PlantParams::validate() const {
  require_finite(lambda_gain, "lambda");
  require_finite(xi, "xi");
  require_finite(omega_n, "omega_n");
  if (lambda_gain <= 0.0) throw Error(ErrorKind::InvalidInput, "lambda must be > 0");
  if (omega_n <= 0.0) throw Error(ErrorKind::InvalidInput, "omega_n must be > 0");
  if (xi < 0.0 || xi > 1.0) throw Error(ErrorKind::InvalidInput, "xi must lie in [0, 1]");
}

double PlantParams::natural_period() const { return 2.0 * std::numbers::pi / omega_n; }

PlantState vector_field(const PlantState& state, double u, const PlantParams& p) {
  require_finite(state.y, "y");
  require_finite(state.ydot, "ydot");
  require_finite(u, "u");
  return {state.ydot,
          -2.0 * p.xi * p.omega_n * state.ydot - p.omega_n * p.omega_n * std::sin(state.y) +
              p.lambda_gain * u};
}

std::complex<double> freq_response(double omega, const PlantParams& p) {
  check_frequency(omega, p);
  const std::complex<double> denom(p.omega_n * p.omega_n - omega * omega,
                                   2.0 * p.xi * p.omega_n * omega);
  return p.lambda_gain / denom;
}

double freq_response_magnitude(double omega, const PlantParams& p) {
  check_frequency(omega, p);
  const double re = p.omega_n * p.omega_n - omega * omega;
  const double im = 2.0 * p.xi * p.omega_n * omega;
  return p.lambda_gain / std::hypot(re, im);
}

double freq_response_phase(double omega, const PlantParams& p) {
  check_frequency(omega, p);
  // atan2 of the denominator lies in [0, pi) for omega >= 0
  return -std::atan2(2.0 * p.xi * p.omega_n * omega, p.omega_n * p.omega_n - omega * omega);
}

}  // namespace nrc
