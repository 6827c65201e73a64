#include "nrc/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "nrc/error.hpp"

namespace nrc {

namespace {

int sign_of(double v) { return (v > 0.0) - (v < 0.0); }

bool finite(const PlantState& x) { return std::isfinite(x.y) && std::isfinite(x.ydot); }

// Unchecked right-hand side; the integrator checks finiteness once per step.
PlantState rhs(const PlantState& x, double u, const PlantParams& p) {
  return {x.ydot,
          -2.0 * p.xi * p.omega_n * x.ydot - p.omega_n * p.omega_n * std::sin(x.y) +
              p.lambda_gain * u};
}

PlantState rk4(const PlantState& x, double h, double u, const PlantParams& p) {
  const PlantState k1 = rhs(x, u, p);
  const PlantState k2 = rhs({x.y + 0.5 * h * k1.y, x.ydot + 0.5 * h * k1.ydot}, u, p);
  const PlantState k3 = rhs({x.y + 0.5 * h * k2.y, x.ydot + 0.5 * h * k2.ydot}, u, p);
  const PlantState k4 = rhs({x.y + h * k3.y, x.ydot + h * k3.ydot}, u, p);
  return {x.y + h / 6.0 * (k1.y + 2.0 * k2.y + 2.0 * k3.y + k4.y),
          x.ydot + h / 6.0 * (k1.ydot + 2.0 * k2.ydot + 2.0 * k3.ydot + k4.ydot)};
}

// Cubic Hermite interpolant on [0, h] evaluated at offset s.
double hermite(double v0, double v1, double d0, double d1, double h, double s) {
  const double r = s / h;
  const double r2 = r * r;
  const double r3 = r2 * r;
  return (2.0 * r3 - 3.0 * r2 + 1.0) * v0 + (r3 - 2.0 * r2 + r) * h * d0 +
         (-2.0 * r3 + 3.0 * r2) * v1 + (r3 - r2) * h * d1;
}

// Offset of the sign change of the Hermite interpolant, v0 != 0 and sign(v1) != sign(v0).
double locate_root(double v0, double v1, double d0, double d1, double h, double tol) {
  if (v1 == 0.0) return h;
  const int s0 = sign_of(v0);
  double lo = 0.0;
  double hi = h;
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    if (sign_of(hermite(v0, v1, d0, d1, h, mid)) == s0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return hi;
}

// Tracks the side of zero a signal sits on. Right after an event the new side
// may not be reached yet because of localization error; detection stays
// disarmed until it is.
struct ZeroCrossing {
  int side = 0;
  bool armed = false;

  explicit ZeroCrossing(double v) : side(sign_of(v)), armed(side != 0) {}

  bool crosses(double v) const { return armed && sign_of(v) != side; }

  void settle(double v) {
    if (armed) return;
    const int s = sign_of(v);
    if (side == 0) side = s;
    armed = s != 0 && s == side;
  }

  void fire(double v_at_event) {
    side = -side;
    armed = sign_of(v_at_event) == side;
  }
};

bool in_tail(double t, double t0) { return t >= t0; }

double tail_start(const SimTrace& trace, double tail_fraction) {
  if (!(tail_fraction > 0.0 && tail_fraction <= 1.0)) {
    throw Error(ErrorKind::InvalidInput, "tail fraction must lie in (0, 1]");
  }
  return trace.final_time * (1.0 - tail_fraction);
}

}  // namespace

void AdaptiveParams::validate() const {
  if (!std::isfinite(gamma) || !std::isfinite(c) || gamma < 0.0 || c < 0.0) {
    throw Error(ErrorKind::InvalidInput, "adaptation gain and pole must be finite and >= 0");
  }
}

AdaptiveState step_adaptive(const AdaptiveState& state, double to_time, double c) {
  if (!(to_time >= state.last_update)) {
    throw Error(ErrorKind::InvalidInput, "adaptive state cannot be stepped backwards in time");
  }
  return {state.beta_value * std::exp(-c * (to_time - state.last_update)), to_time};
}

AdaptiveState apply_adaptation_impulse(AdaptiveState state, int sign, double gamma) {
  state.beta_value += sign * gamma;
  return state;
}

int actuation_sign(double /*y*/, double ydot) { return ydot < 0.0 ? -1 : 1; }

int adaptation_sign(double y_at_peak, double a_star, AdaptationRule rule) {
  const double level = rule == AdaptationRule::PeakMagnitude ? std::abs(y_at_peak) : y_at_peak;
  return a_star - level < 0.0 ? -1 : 1;
}

const char* to_string(EventKind kind) noexcept {
  return kind == EventKind::Actuation ? "actuation" : "adaptation";
}

double BurstState::control_at(double t) const {
  return active && t >= start && t <= end() ? static_cast<double>(sign) : 0.0;
}

std::vector<Peak> SimTrace::burst_widths() const {
  std::vector<Peak> out;
  for (const auto& e : events) {
    if (e.kind == EventKind::Actuation) out.push_back({e.time, e.beta});
  }
  return out;
}

double default_dt(const PlantParams& p) { return 1e-3 * p.natural_period(); }

SimTrace run_closed_loop(const PlantParams& p, const AdaptiveParams& a, double a_star,
                         const InitialCondition& init, const SimOptions& opts) {
  p.validate();
  a.validate();
  if (!std::isfinite(a_star) || a_star <= 0.0) {
    throw Error(ErrorKind::InvalidInput, "desired amplitude must be > 0");
  }
  if (!std::isfinite(opts.horizon) || opts.horizon <= 0.0) {
    throw Error(ErrorKind::InvalidInput, "horizon must be > 0");
  }
  if (!finite(init.plant) || !std::isfinite(init.beta)) {
    throw Error(ErrorKind::InvalidInput, "initial condition must be finite");
  }
  const double dt = opts.dt > 0.0 ? opts.dt : default_dt(p);
  const double tol = opts.event_tol_fraction * p.natural_period();
  const auto grid_points = static_cast<long long>(std::ceil(opts.horizon / dt - 1e-9));

  SimTrace trace;
  if (opts.sample_stride > 0) {
    trace.samples.reserve(static_cast<std::size_t>(grid_points / opts.sample_stride + 2));
  }

  PlantState x = init.plant;
  double t = 0.0;
  AdaptiveState adapt{init.beta, 0.0};
  BurstState burst;
  ZeroCrossing angle(x.y);
  ZeroCrossing rate(x.ydot);

  auto record_sample = [&]() {
    const double beta = step_adaptive(adapt, t, a.c).beta_value;
    trace.samples.push_back({t, x.y, x.ydot, opts.control_enabled ? burst.control_at(t) : 0.0,
                             beta});
  };
  if (opts.sample_stride > 0) record_sample();

  long long n = 0;
  while (n < grid_points) {
    const double t_grid = std::min(static_cast<double>(n + 1) * dt, opts.horizon);
    double t_end = t_grid;
    if (burst.active && burst.end() > t && burst.end() < t_end) t_end = burst.end();
    const double h = t_end - t;
    const double u = opts.control_enabled ? burst.control_at(t + 0.5 * h) : 0.0;

    const PlantState x1 = rk4(x, h, u, p);
    if (!finite(x1)) {
      throw DivergenceError("state became non-finite after t = " + std::to_string(t), t);
    }

    const bool cy = angle.crosses(x1.y);
    const bool cv = rate.crosses(x1.ydot);
    if (cy || cv) {
      const PlantState f0 = rhs(x, u, p);
      const PlantState f1 = rhs(x1, u, p);
      constexpr double kNever = std::numeric_limits<double>::infinity();
      const double sy = cy ? locate_root(x.y, x1.y, f0.y, f1.y, h, tol) : kNever;
      const double sv = cv ? locate_root(x.ydot, x1.ydot, f0.ydot, f1.ydot, h, tol) : kNever;
      const bool actuation = sy <= sv;
      const double s = std::min(sy, sv);

      x = s >= h ? x1 : rk4(x, s, u, p);
      t = s >= h ? t_end : t + s;
      adapt = step_adaptive(adapt, t, a.c);

      if (actuation) {
        const int sign = actuation_sign(x.y, x.ydot);
        trace.events.push_back({t, EventKind::Actuation, sign, x.y, x.ydot, adapt.beta_value});
        const double width = std::max(adapt.beta_value, 0.0);
        if (opts.control_enabled && width > 0.0) {
          burst = {true, sign, t, width};
        } else {
          burst.active = false;
        }
        angle.fire(x.y);
        rate.settle(x.ydot);
      } else {
        const int sign = adaptation_sign(x.y, a_star, opts.rule);
        trace.events.push_back({t, EventKind::Adaptation, sign, x.y, x.ydot, adapt.beta_value});
        trace.peaks.push_back({t, std::abs(x.y)});
        adapt = apply_adaptation_impulse(adapt, sign, a.gamma);
        rate.fire(x.ydot);
        angle.settle(x.y);
      }
    } else {
      x = x1;
      t = t_end;
      angle.settle(x.y);
      rate.settle(x.ydot);
    }

    if (burst.active && t >= burst.end()) burst.active = false;
    if (t >= t_grid) {
      t = t_grid;
      ++n;
      if (opts.sample_stride > 0 && n % opts.sample_stride == 0) record_sample();
    }
  }
  trace.final_time = t;
  return trace;
}

Objectives measure_objectives(const SimTrace& trace, double a_star, double omega_ref,
                              double tail_fraction) {
  if (!(omega_ref > 0.0)) throw Error(ErrorKind::InvalidInput, "reference frequency must be > 0");
  const double t0 = tail_start(trace, tail_fraction);
  const double period = 2.0 * std::numbers::pi / omega_ref;
  if (trace.final_time - t0 < 10.0 * period) {
    throw Error(ErrorKind::Window, "tail window shorter than 10 reference periods");
  }
  const auto& s = trace.samples;
  if (s.size() < 2) throw Error(ErrorKind::Window, "trace has no samples");

  Objectives out;
  std::size_t j = 0;
  for (const auto& smp : s) {
    if (!in_tail(smp.t, t0)) continue;
    const double target = smp.t + period;
    if (target > s.back().t) break;
    while (j + 1 < s.size() && s[j + 1].t < target) ++j;
    const auto& lo = s[j];
    const auto& hi = s[std::min(j + 1, s.size() - 1)];
    const double h = hi.t - lo.t;
    const double y_shift =
        h > 0.0 ? hermite(lo.y, hi.y, lo.ydot, hi.ydot, h, target - lo.t) : lo.y;
    out.periodicity_residual = std::max(out.periodicity_residual, std::abs(y_shift - smp.y));
  }

  double max_peak = -1.0;
  for (const auto& pk : trace.peaks) {
    if (!in_tail(pk.t, t0)) continue;
    max_peak = std::max(max_peak, pk.magnitude);
    out.ultimate_amplitude_error =
        std::max(out.ultimate_amplitude_error, std::abs(pk.magnitude - a_star));
  }
  if (max_peak < 0.0) throw Error(ErrorKind::Window, "no extrema in the tail window");
  out.amplitude_error = std::abs(a_star - max_peak);
  return out;
}

LimitCycleEstimate measure_limit_cycle(const SimTrace& trace, double tail_fraction) {
  const double t0 = tail_start(trace, tail_fraction);
  LimitCycleEstimate est;
  int peaks = 0;
  for (const auto& pk : trace.peaks) {
    if (!in_tail(pk.t, t0)) continue;
    est.amplitude += pk.magnitude;
    ++peaks;
  }
  double first = 0.0;
  double last = 0.0;
  int crossings = 0;
  for (const auto& e : trace.events) {
    if (e.kind != EventKind::Actuation || !in_tail(e.time, t0)) continue;
    if (crossings == 0) first = e.time;
    last = e.time;
    ++crossings;
  }
  if (peaks == 0 || crossings < 2) {
    throw Error(ErrorKind::Window, "tail window holds no oscillation");
  }
  est.amplitude /= peaks;
  est.omega = std::numbers::pi / ((last - first) / (crossings - 1));
  return est;
}

double burst_width_error(const SimTrace& trace, double beta_star, double tail_fraction) {
  const double t0 = tail_start(trace, tail_fraction);
  double err = -1.0;
  for (const auto& e : trace.events) {
    if (e.kind == EventKind::Actuation && in_tail(e.time, t0)) {
      err = std::max(err, std::abs(e.beta - beta_star));
    }
  }
  if (err < 0.0) throw Error(ErrorKind::Window, "no actuation events in the tail window");
  return err;
}

SimTrace trace_from_samples(std::vector<Sample> samples) {
  SimTrace trace;
  trace.samples = std::move(samples);
  const auto& s = trace.samples;
  for (std::size_t i = 1; i < s.size(); ++i) {
    const int s0 = sign_of(s[i - 1].ydot);
    const int s1 = sign_of(s[i].ydot);
    if (s0 == 0 || s0 == s1) continue;
    const double h = s[i].t - s[i - 1].t;
    const double frac = s[i - 1].ydot / (s[i - 1].ydot - s[i].ydot);
    const double y = hermite(s[i - 1].y, s[i].y, s[i - 1].ydot, s[i].ydot, h, frac * h);
    trace.peaks.push_back({s[i - 1].t + frac * h, std::abs(y)});
  }
  trace.final_time = s.empty() ? 0.0 : s.back().t;
  return trace;
}

}  // namespace nrc
