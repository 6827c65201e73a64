#pragma once

#include <iosfwd>
#include <vector>

#include "nrc/plant.hpp"

namespace nrc {

/// Adaptation filter H(s) = gamma/(s + c). gamma = c = 0 freezes the burst width.
struct AdaptiveParams {
  double gamma = 0.0;  // impulse gain [s per event]
  double c = 0.0;      // pole [1/s]

  void validate() const;
};

/// Output of the adaptation filter, beta(t), and the time it was last brought up to date.
struct AdaptiveState {
  double beta_value = 0.0;
  double last_update = 0.0;
};

/// Exact decay beta(t) = beta(t0) exp(-c (t - t0)). Throws on time reversal.
AdaptiveState step_adaptive(const AdaptiveState& state, double to_time, double c);

/// beta <- beta + sign * gamma at the impulse instant.
AdaptiveState apply_adaptation_impulse(AdaptiveState state, int sign, double gamma);

/// sgn(ydot), with the tie ydot = 0 resolved to +1.
int actuation_sign(double y, double ydot);

enum class AdaptationRule {
  PeakMagnitude,  // sgn(A* - |y|)
  Literal,        // sgn(A* - y)
};

/// Sign of the adaptation impulse at an extremum of y; ties resolve to +1.
int adaptation_sign(double y_at_peak, double a_star,
                    AdaptationRule rule = AdaptationRule::PeakMagnitude);

enum class EventKind { Actuation, Adaptation };

const char* to_string(EventKind kind) noexcept;

struct EventRecord {
  double time = 0.0;
  EventKind kind = EventKind::Actuation;
  int sign = 1;
  double y = 0.0;
  double ydot = 0.0;
  double beta = 0.0;  // filter output at the event, before any impulse
};

/// Rectangular control pulse; width is frozen at onset.
struct BurstState {
  bool active = false;
  int sign = 1;
  double start = 0.0;
  double width = 0.0;

  double end() const { return start + width; }
  /// u(t): sign on [start, start + width], 0 elsewhere.
  double control_at(double t) const;
};

struct Sample {
  double t = 0.0;
  double y = 0.0;
  double ydot = 0.0;
  double u = 0.0;
  double beta = 0.0;
};

struct Peak {
  double t = 0.0;
  double magnitude = 0.0;
};

struct SimTrace {
  std::vector<Sample> samples;
  std::vector<EventRecord> events;
  std::vector<Peak> peaks;
  double final_time = 0.0;

  /// (t_k, beta(t_k)) at every actuation event.
  std::vector<Peak> burst_widths() const;
};

struct InitialCondition {
  PlantState plant{0.05, 0.0};
  double beta = 0.0;
};

struct SimOptions {
  double horizon = 0.0;  // [s]
  double dt = 0.0;       // fixed integrator step [s]; 0 selects 1e-3 of the natural period
  int sample_stride = 1; // record every n-th grid point; 0 records none
  AdaptationRule rule = AdaptationRule::PeakMagnitude;
  bool control_enabled = true;
  double event_tol_fraction = 1e-10;  // event time tolerance, fraction of the natural period
};

/// 1e-3 of the natural period 2 pi / omega_n.
double default_dt(const PlantParams& p);

/// Event-driven closed-loop simulation of the pendulum, burst actuator and adaptation filter.
///
/// Classical RK4 on a fixed grid of spacing dt. Steps are cut at burst ends so
/// the control is constant inside each step. Zero crossings of y (actuation)
/// and ydot (adaptation) are located by bisection on the cubic Hermite
/// interpolant of the step, after which the step is redone up to the event.
/// At an actuation event the burst width max{beta, 0} is frozen and any active
/// burst is replaced; at an adaptation event the filter receives a signed
/// impulse of size gamma.
///
/// Throws DivergenceError when the state stops being finite.
SimTrace run_closed_loop(const PlantParams& p, const AdaptiveParams& a, double a_star,
                         const InitialCondition& init, const SimOptions& opts);

struct Objectives {
  double periodicity_residual = 0.0;     // max |y(t + 2pi/w) - y(t)| over the tail
  double amplitude_error = 0.0;          // |A* - max tail peak|
  double ultimate_amplitude_error = 0.0; // sup over tail peaks of |peak - A*|
};

/// Rhythmic objectives over the last `tail_fraction` of the trace.
/// The tail must span at least 10 periods of omega_ref.
Objectives measure_objectives(const SimTrace& trace, double a_star, double omega_ref,
                              double tail_fraction = 0.25);

struct LimitCycleEstimate {
  double amplitude = 0.0;  // mean tail peak magnitude
  double omega = 0.0;      // pi / mean gap between tail actuation events
};

LimitCycleEstimate measure_limit_cycle(const SimTrace& trace, double tail_fraction = 0.25);

/// sup over tail actuation events of |beta(t_k) - beta_star|.
double burst_width_error(const SimTrace& trace, double beta_star, double tail_fraction = 0.25);

/// Builds peaks (and nothing else) from a sampled signal; used for synthetic traces.
SimTrace trace_from_samples(std::vector<Sample> samples);

void write_trace_csv(std::ostream& os, const SimTrace& trace);
void write_events_csv(std::ostream& os, const SimTrace& trace);

}  // namespace nrc
