#include "nrc/robust_opt.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <ostream>
#include <random>
#include <string>

#include "nrc/error.hpp"

namespace nrc {

namespace {

constexpr double kPi = std::numbers::pi;
// Relative slack so both branch functions accept the boundary itself.
constexpr double kBranchSlack = 1e-12;

struct Decay {
  double quarter;  // exp(-c pi/(2w*))
  double half;     // exp(-c pi/w*)
};

Decay decay(double c, double omega_star) {
  if (!(c > 0.0) || !(omega_star > 0.0) || !std::isfinite(c) || !std::isfinite(omega_star)) {
    throw Error(ErrorKind::InvalidInput, "c and omega* must be finite and > 0");
  }
  return {std::exp(-c * kPi / (2.0 * omega_star)), std::exp(-c * kPi / omega_star)};
}

void check_gain(double gamma, double beta_star) {
  if (!(gamma >= 0.0) || !(beta_star > 0.0) || !std::isfinite(gamma) || !std::isfinite(beta_star)) {
    throw Error(ErrorKind::InvalidInput, "gamma must be >= 0 and beta* > 0");
  }
}

double j_stable(double gamma, double beta_star, const Decay& d) {
  return beta_star - gamma * d.quarter / (1.0 - d.half);
}

double j_unstable(double gamma, double beta_star, const Decay& d) {
  return ((1.0 - d.half) * beta_star + gamma * d.quarter) / (1.0 + d.half);
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

}  // namespace

void UncertaintyInterval::validate() const {
  if (!(beta_low > 0.0 && beta_low <= beta_high) || !std::isfinite(beta_high)) {
    throw Error(ErrorKind::InvalidInput, "interval must satisfy 0 < beta_low <= beta_high");
  }
}

const char* to_string(CostBranch branch) noexcept {
  return branch == CostBranch::Stable ? "stable" : "unstable";
}

double branch_threshold(double gamma, double c, double omega_star) {
  const Decay d = decay(c, omega_star);
  return gamma * d.quarter / (1.0 - d.half);
}

double cost_stable(double gamma, double beta_star, double c, double omega_star) {
  check_gain(gamma, beta_star);
  const Decay d = decay(c, omega_star);
  const double t = gamma * d.quarter / (1.0 - d.half);
  if (beta_star < t * (1.0 - kBranchSlack)) {
    throw Error(ErrorKind::WrongBranch, "beta* below the stability threshold");
  }
  return j_stable(gamma, beta_star, d);
}

double cost_unstable(double gamma, double beta_star, double c, double omega_star) {
  check_gain(gamma, beta_star);
  const Decay d = decay(c, omega_star);
  const double t = gamma * d.quarter / (1.0 - d.half);
  if (beta_star > t * (1.0 + kBranchSlack)) {
    throw Error(ErrorKind::WrongBranch, "beta* above the stability threshold");
  }
  return j_unstable(gamma, beta_star, d);
}

CostEvaluation cost(double gamma, double beta_star, double c, double omega_star) {
  check_gain(gamma, beta_star);
  const Decay d = decay(c, omega_star);
  const double t = gamma * d.quarter / (1.0 - d.half);
  if (beta_star >= t) {
    return {gamma, beta_star, c, j_stable(gamma, beta_star, d), CostBranch::Stable};
  }
  return {gamma, beta_star, c, j_unstable(gamma, beta_star, d), CostBranch::Unstable};
}

WorstCase worst_case(double gamma, const UncertaintyInterval& interval, double c,
                     double omega_star) {
  interval.validate();
  check_gain(gamma, interval.beta_high);
  const Decay d = decay(c, omega_star);
  const double t = gamma * d.quarter / (1.0 - d.half);
  const double lo = interval.beta_low;
  const double hi = interval.beta_high;

  if (hi < t) return {j_unstable(gamma, hi, d), hi};
  // t within rounding of beta_low leaves no beta* below the threshold (gamma_opt lands here)
  if (t > lo * (1.0 + kBranchSlack)) {
    const double at_threshold = j_unstable(gamma, t, d);
    const double at_top = j_stable(gamma, hi, d);
    return at_threshold > at_top ? WorstCase{at_threshold, t} : WorstCase{at_top, hi};
  }
  return {j_stable(gamma, hi, d), hi};
}

double gamma_opt(const UncertaintyInterval& interval, double c, double omega_star) {
  interval.validate();
  const Decay d = decay(c, omega_star);
  const double q = d.quarter;
  // balance of the two worst-case operands, and the lower end of the interior case
  const double balance =
      interval.beta_high * (1.0 - q * q * q * q) / (3.0 * q - q * q * q);
  const double lower = interval.beta_low * (1.0 - d.half) / q;
  return std::max(balance, lower);
}

TuningReport tune(double a_star, const PlantParams& nominal,
                  const std::variant<PlantUncertainty, UncertaintyInterval>& uncertainty,
                  double c) {
  nominal.validate();
  TuningReport r;
  r.a_star = a_star;
  r.c = c;
  const DesignPoint design = solve_design_point(a_star, nominal);
  r.beta_star = design.beta_star;
  r.omega_star = design.omega_star;

  if (const auto* box = std::get_if<UncertaintyInterval>(&uncertainty)) {
    box->validate();
    r.beta_low = box->beta_low;
    r.beta_high = box->beta_high;
  } else {
    const auto& u = std::get<PlantUncertainty>(uncertainty);
    if (u.rel_lambda < 0.0 || u.rel_xi < 0.0 || u.rel_omega_n < 0.0) {
      throw Error(ErrorKind::InvalidInput, "relative uncertainties must be >= 0");
    }
    auto beta_for = [&](double fl, double fx, double fw) {
      PlantParams q{nominal.lambda_gain * fl, nominal.xi * fx, nominal.omega_n * fw};
      q.xi = std::min(q.xi, 1.0);
      try {
        return solve_design_point(a_star, q).beta_star;
      } catch (const Error& e) {
        throw Error(e.kind(), std::string(e.what()) + " (plant lambda=" + fmt(q.lambda_gain) +
                                  " xi=" + fmt(q.xi) + " omega_n=" + fmt(q.omega_n) + ")");
      }
    };

    r.beta_low = r.beta_star;
    r.beta_high = r.beta_star;
    for (int mask = 0; mask < 8; ++mask) {
      const double b = beta_for((mask & 1) ? 1.0 + u.rel_lambda : 1.0 - u.rel_lambda,
                                (mask & 2) ? 1.0 + u.rel_xi : 1.0 - u.rel_xi,
                                (mask & 4) ? 1.0 + u.rel_omega_n : 1.0 - u.rel_omega_n);
      r.beta_low = std::min(r.beta_low, b);
      r.beta_high = std::max(r.beta_high, b);
    }

    const bool degenerate = u.rel_lambda == 0.0 && u.rel_xi == 0.0 && u.rel_omega_n == 0.0;
    if (!degenerate) {
      std::mt19937_64 rng(20240917);
      std::uniform_real_distribution<double> unit(-1.0, 1.0);
      r.interior_samples = 100;
      for (int i = 0; i < r.interior_samples; ++i) {
        const double b = beta_for(1.0 + u.rel_lambda * unit(rng), 1.0 + u.rel_xi * unit(rng),
                                  1.0 + u.rel_omega_n * unit(rng));
        if (b < r.beta_low || b > r.beta_high) {
          ++r.interior_escapes;
          r.beta_low = std::min(r.beta_low, b);
          r.beta_high = std::max(r.beta_high, b);
        }
      }
    }
  }

  const UncertaintyInterval interval{r.beta_low, r.beta_high};
  r.gamma_opt = gamma_opt(interval, c, r.omega_star);
  r.predicted_cost = worst_case(r.gamma_opt, interval, c, r.omega_star).value;
  return r;
}

void write_report_csv(std::ostream& os, const TuningReport& r) {
  os << "a_star,beta_star,omega_star,beta_low,beta_high,c,gamma_opt,predicted_cost\n"
     << fmt(r.a_star) << ',' << fmt(r.beta_star) << ',' << fmt(r.omega_star) << ','
     << fmt(r.beta_low) << ',' << fmt(r.beta_high) << ',' << fmt(r.c) << ','
     << fmt(r.gamma_opt) << ',' << fmt(r.predicted_cost) << '\n';
}

void write_report_text(std::ostream& os, const TuningReport& r) {
  os << "Tuning report\n"
     << "  desired amplitude A*     " << fmt(r.a_star) << " rad\n"
     << "  burst width beta*        " << fmt(r.beta_star) << " s\n"
     << "  frequency omega*         " << fmt(r.omega_star) << " rad/s\n"
     << "  burst width interval     [" << fmt(r.beta_low) << ", " << fmt(r.beta_high) << "] s\n"
     << "  adaptation pole c        " << fmt(r.c) << " 1/s\n"
     << "  optimal gain gamma_opt   " << fmt(r.gamma_opt) << " s\n"
     << "  predicted worst-case J   " << fmt(r.predicted_cost) << " s\n";
  if (r.interior_samples > 0) {
    os << "  interior check           " << r.interior_escapes << " of " << r.interior_samples
       << " samples outside the vertex interval\n";
  }
}

}  // namespace nrc
