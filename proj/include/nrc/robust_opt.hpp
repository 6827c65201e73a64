#pragma once

#include <iosfwd>
#include <variant>

#include "nrc/describing_fn.hpp"
#include "nrc/plant.hpp"

namespace nrc {

struct UncertaintyInterval {
  double beta_low = 0.0;
  double beta_high = 0.0;

  void validate() const;
};

enum class CostBranch { Stable, Unstable };

const char* to_string(CostBranch branch) noexcept;

struct CostEvaluation {
  double gamma = 0.0;
  double beta_star = 0.0;
  double c = 0.0;
  double value = 0.0;
  CostBranch branch = CostBranch::Stable;
};

/// Burst width at which the error recursion bifurcates for a given gain:
/// gamma exp(-c pi/(2w*)) / (1 - exp(-c pi/w*)). beta* at or above it is the stable branch.
double branch_threshold(double gamma, double c, double omega_star);

/// Steady-state error beta* - threshold on the stable branch. Throws WrongBranch off it.
double cost_stable(double gamma, double beta_star, double c, double omega_star);

/// Ultimate bound (g0 + g2)/(1 + g1) on the unstable branch. Throws WrongBranch off it.
double cost_unstable(double gamma, double beta_star, double c, double omega_star);

/// Piecewise performance index, branch chosen by the threshold.
CostEvaluation cost(double gamma, double beta_star, double c, double omega_star);

struct WorstCase {
  double value = 0.0;
  double argmax_beta = 0.0;  // a supremum approached from below when it sits at the threshold
};

/// sup of the cost over beta* in the interval, by the three-case analysis on the threshold.
WorstCase worst_case(double gamma, const UncertaintyInterval& interval, double c,
                     double omega_star);

/// Closed-form minimizer of worst_case over gamma > 0.
double gamma_opt(const UncertaintyInterval& interval, double c, double omega_star);

/// Relative half-widths of a box around the nominal plant, e.g. 0.1 for +-10 %.
struct PlantUncertainty {
  double rel_lambda = 0.0;
  double rel_xi = 0.0;
  double rel_omega_n = 0.0;
};

struct TuningReport {
  double a_star = 0.0;
  double beta_star = 0.0;
  double omega_star = 0.0;
  double beta_low = 0.0;
  double beta_high = 0.0;
  double c = 0.0;
  double gamma_opt = 0.0;
  double predicted_cost = 0.0;
  int interior_samples = 0;   // interior points checked against the vertex interval
  int interior_escapes = 0;   // interior points whose beta* left the vertex interval
};

/// Design point, burst-width interval, then gamma_opt for a fixed pole c.
///
/// With a PlantUncertainty the interval comes from beta* at the 8 vertices of
/// the parameter box; 100 seeded interior samples then check it and widen it if
/// any escapes.
TuningReport tune(double a_star, const PlantParams& nominal,
                  const std::variant<PlantUncertainty, UncertaintyInterval>& uncertainty, double c);

void write_report_csv(std::ostream& os, const TuningReport& r);
void write_report_text(std::ostream& os, const TuningReport& r);

}  // namespace nrc
