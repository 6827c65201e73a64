#pragma once

#include <complex>

namespace nrc {

/// Damped pendulum  y'' + 2 xi omega_n y' + omega_n^2 sin(y) = lambda u.
struct PlantParams {
  double lambda_gain = 15.0;  // input gain
  double xi = 0.1;            // damping ratio, in [0, 1]
  double omega_n = 8.0;       // undamped natural frequency [rad/s]

  /// Throws nrc::Error(InvalidInput) when a field is out of range.
  void validate() const;

  double natural_period() const;
};

struct PlantState {
  double y = 0.0;     // angle [rad]
  double ydot = 0.0;  // angular rate [rad/s]
};

/// Time derivative of the state; `.y` holds y', `.ydot` holds y''.
PlantState vector_field(const PlantState& state, double u, const PlantParams& p);

/// P(jw) = lambda / ((jw)^2 + 2 xi omega_n jw + omega_n^2) of the linearized pendulum.
std::complex<double> freq_response(double omega, const PlantParams& p);

double freq_response_magnitude(double omega, const PlantParams& p);

/// Phase of P(jw) in (-pi, 0], continuous in omega for xi > 0.
double freq_response_phase(double omega, const PlantParams& p);

}  // namespace nrc
