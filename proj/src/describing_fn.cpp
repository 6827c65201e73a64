#include "nrc/describing_fn.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <limits>
#include <numeric>
#include <string>

#include "nrc/error.hpp"

namespace nrc {

namespace {

constexpr double kPi = std::numbers::pi;

void check_burst(double omega, double beta) {
  if (!std::isfinite(omega) || !std::isfinite(beta) || omega <= 0.0 || beta <= 0.0) {
    throw Error(ErrorKind::InvalidInput, "omega and beta must be finite and > 0");
  }
  if (omega * beta >= kPi) {
    throw Error(ErrorKind::OutOfModel, "burst width must be shorter than half a period");
  }
}

// Sample count for the runtime monotonicity check of A_hat on a bracket.
constexpr int kMonotonicityProbes = 65;

}  // namespace

double describing_fn_mag(double amplitude, double omega, double beta) {
  check_burst(omega, beta);
  if (!std::isfinite(amplitude) || amplitude <= 0.0) {
    throw Error(ErrorKind::InvalidInput, "amplitude must be > 0");
  }
  return 4.0 / (amplitude * kPi) * std::sin(omega * beta / 2.0);
}

double describing_fn_phase(double omega, double beta) {
  check_burst(omega, beta);
  return (kPi - omega * beta) / 2.0;
}

std::complex<double> describing_fn(double amplitude, double omega, double beta) {
  return std::polar(describing_fn_mag(amplitude, omega, beta), describing_fn_phase(omega, beta));
}

double hb_residual(double amplitude, double omega, double beta, const PlantParams& p) {
  return std::abs(describing_fn(amplitude, omega, beta) * freq_response(omega, p) - 1.0);
}

HBSolution solve_hb(double beta, const PlantParams& p, double phase_tol) {
  p.validate();
  if (!std::isfinite(beta) || beta <= 0.0) {
    throw Error(ErrorKind::InvalidInput, "beta must be > 0");
  }
  if (p.xi <= 0.0) {
    throw Error(ErrorKind::InvalidInput, "harmonic balance needs a damped plant (xi > 0)");
  }

  // Phase-balance residual; strictly decreasing on (0, pi/beta).
  auto residual = [&](double omega) {
    return (kPi - omega * beta) / 2.0 + freq_response_phase(omega, p);
  };

  double lo = 0.0;
  double hi = kPi / beta;
  if (!(residual(lo) > 0.0 && residual(hi) < 0.0)) {
    throw Error(ErrorKind::InternalConsistency,
                "phase balance not bracketed for beta = " + std::to_string(beta));
  }

  double omega = 0.5 * (lo + hi);
  for (int it = 0; it < 200; ++it) {
    omega = 0.5 * (lo + hi);
    const double r = residual(omega);
    if (std::abs(r) < phase_tol) break;
    (r > 0.0 ? lo : hi) = omega;
    if (hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * hi) break;
  }

  HBSolution sol{beta, omega,
                 4.0 / kPi * freq_response_magnitude(omega, p) * std::sin(omega * beta / 2.0)};

  if (!(sol.omega > 0.0 && sol.omega < kPi / beta && sol.amplitude > 0.0)) {
    throw Error(ErrorKind::InternalConsistency, "harmonic balance solution left its domain");
  }
  // Residual of the complex equation is dominated by the phase error.
  if (hb_residual(sol.amplitude, sol.omega, beta, p) > 1e3 * phase_tol + 1e-12) {
    throw Error(ErrorKind::InternalConsistency, "harmonic balance residual too large");
  }
  return sol;
}

std::vector<HBSolution> amplitude_curve(std::span<const double> beta_grid, const PlantParams& p) {
  std::vector<HBSolution> out;
  out.reserve(beta_grid.size());
  for (double beta : beta_grid) {
    try {
      out.push_back(solve_hb(beta, p));
    } catch (const Error& e) {
      throw Error(e.kind(), std::string(e.what()) + " (beta = " + std::to_string(beta) + ")");
    }
  }

  std::vector<std::size_t> order(out.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return out[a].beta < out[b].beta; });
  for (std::size_t i = 1; i < order.size(); ++i) {
    const auto& prev = out[order[i - 1]];
    const auto& cur = out[order[i]];
    if (cur.beta > prev.beta && !(cur.amplitude > prev.amplitude)) {
      throw Error(ErrorKind::InternalConsistency,
                  "amplitude not increasing at beta = " + std::to_string(cur.beta));
    }
  }
  return out;
}

BetaBracket default_beta_bracket(const PlantParams& p) {
  return {1e-4, 0.9 * kPi / p.omega_n};
}

double hb_amplitude(double beta, const PlantParams& p) {
  if (beta <= 0.0) return 0.0;
  return solve_hb(beta, p).amplitude;
}

DesignPoint solve_design_point(double a_star, const PlantParams& p,
                               std::optional<BetaBracket> bracket, double amplitude_tol) {
  p.validate();
  if (!std::isfinite(a_star) || a_star <= 0.0) {
    throw Error(ErrorKind::InvalidInput, "desired amplitude must be > 0");
  }
  const BetaBracket br = bracket.value_or(default_beta_bracket(p));
  if (!(br.low > 0.0 && br.high > br.low)) {
    throw Error(ErrorKind::InvalidInput, "beta bracket must satisfy 0 < low < high");
  }

  // Probe A_hat on the bracket. An explicit bracket must be monotone; the
  // default one is cut back to its increasing prefix, since A_hat turns over
  // before 0.9 pi/omega_n on lightly damped plants.
  double top = br.high;
  double prev = 0.0;
  for (int i = 0; i < kMonotonicityProbes; ++i) {
    const double beta = br.low + (br.high - br.low) * i / (kMonotonicityProbes - 1);
    const double a = solve_hb(beta, p).amplitude;
    if (i > 0 && !(a > prev)) {
      if (bracket) {
        throw Error(ErrorKind::InternalConsistency,
                    "A_hat is not monotone on the bracket near beta = " + std::to_string(beta));
      }
      top = br.low + (br.high - br.low) * (i - 1) / (kMonotonicityProbes - 1);
      break;
    }
    prev = a;
  }

  double lo = br.low;
  double hi = top;
  const double a_lo = solve_hb(lo, p).amplitude;
  const double a_hi = solve_hb(hi, p).amplitude;
  if (!(a_lo < a_star && a_star < a_hi)) {
    throw Error(ErrorKind::UnachievableAmplitude,
                "A* = " + std::to_string(a_star) + " outside [" + std::to_string(a_lo) + ", " +
                    std::to_string(a_hi) + "]");
  }

  HBSolution sol{};
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    sol = solve_hb(mid, p);
    const double err = sol.amplitude - a_star;
    if (std::abs(err) < amplitude_tol) break;
    (err < 0.0 ? lo : hi) = mid;
  }
  if (std::abs(sol.amplitude - a_star) >= amplitude_tol) {
    throw Error(ErrorKind::InternalConsistency, "design-point bisection did not converge");
  }
  return {a_star, sol.beta, sol.omega};
}

}  // namespace nrc
