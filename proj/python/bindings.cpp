#include <pybind11/complex.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <vector>

#include "nrc/describing_fn.hpp"
#include "nrc/error.hpp"
#include "nrc/plant.hpp"
#include "nrc/robust_opt.hpp"
#include "nrc/simulator.hpp"
#include "nrc/slow_model.hpp"

namespace py = pybind11;
using namespace nrc;

namespace {

template <typename T, typename F>
py::array_t<double> column(const std::vector<T>& rows, F field) {
  py::array_t<double> out(static_cast<py::ssize_t>(rows.size()));
  auto view = out.mutable_unchecked<1>();
  for (std::size_t i = 0; i < rows.size(); ++i) view(static_cast<py::ssize_t>(i)) = field(rows[i]);
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Adaptive burst control of a pendulum";

  static py::exception<Error> error(m, "Error", PyExc_ValueError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::set_error(error, e.what());
    }
  });

  py::class_<PlantParams>(m, "PlantParams")
      .def(py::init([](double lambda_gain, double xi, double omega_n) {
             PlantParams p{lambda_gain, xi, omega_n};
             p.validate();
             return p;
           }),
           py::arg("lambda_gain") = 15.0, py::arg("xi") = 0.1, py::arg("omega_n") = 8.0)
      .def_readwrite("lambda_gain", &PlantParams::lambda_gain)
      .def_readwrite("xi", &PlantParams::xi)
      .def_readwrite("omega_n", &PlantParams::omega_n)
      .def("natural_period", &PlantParams::natural_period)
      .def("__repr__", [](const PlantParams& p) {
        return "PlantParams(lambda_gain=" + std::to_string(p.lambda_gain) +
               ", xi=" + std::to_string(p.xi) + ", omega_n=" + std::to_string(p.omega_n) + ")";
      });

  m.def("freq_response", &freq_response, py::arg("omega"), py::arg("plant") = PlantParams{});
  m.def("describing_fn", &describing_fn, py::arg("amplitude"), py::arg("omega"), py::arg("beta"));

  py::class_<HBSolution>(m, "HBSolution")
      .def_readonly("beta", &HBSolution::beta)
      .def_readonly("omega", &HBSolution::omega)
      .def_readonly("amplitude", &HBSolution::amplitude);
  py::class_<DesignPoint>(m, "DesignPoint")
      .def(py::init<double, double, double>(), py::arg("a_star"), py::arg("beta_star"),
           py::arg("omega_star"))
      .def_readonly("a_star", &DesignPoint::a_star)
      .def_readonly("beta_star", &DesignPoint::beta_star)
      .def_readonly("omega_star", &DesignPoint::omega_star);

  m.def("solve_hb", &solve_hb, py::arg("beta"), py::arg("plant") = PlantParams{},
        py::arg("phase_tol") = kDefaultPhaseTol);
  m.def("hb_amplitude", &hb_amplitude, py::arg("beta"), py::arg("plant") = PlantParams{});
  m.def(
      "amplitude_curve",
      [](const std::vector<double>& grid, const PlantParams& p) { return amplitude_curve(grid, p); },
      py::arg("beta_grid"), py::arg("plant") = PlantParams{});
  m.def(
      "solve_design_point",
      [](double a_star, const PlantParams& p, std::optional<std::pair<double, double>> bracket) {
        std::optional<BetaBracket> b;
        if (bracket) b = BetaBracket{bracket->first, bracket->second};
        return solve_design_point(a_star, p, b);
      },
      py::arg("a_star"), py::arg("plant") = PlantParams{}, py::arg("bracket") = py::none());

  py::class_<AdaptiveParams>(m, "AdaptiveParams")
      .def(py::init<double, double>(), py::arg("gamma") = 0.0, py::arg("c") = 0.0)
      .def_readwrite("gamma", &AdaptiveParams::gamma)
      .def_readwrite("c", &AdaptiveParams::c);
  py::enum_<AdaptationRule>(m, "AdaptationRule")
      .value("PEAK_MAGNITUDE", AdaptationRule::PeakMagnitude)
      .value("LITERAL", AdaptationRule::Literal);
  py::class_<InitialCondition>(m, "InitialCondition")
      .def(py::init([](double y, double ydot, double beta) {
             return InitialCondition{{y, ydot}, beta};
           }),
           py::arg("y") = 0.05, py::arg("ydot") = 0.0, py::arg("beta") = 0.0)
      .def_property_readonly("y", [](const InitialCondition& c) { return c.plant.y; })
      .def_property_readonly("ydot", [](const InitialCondition& c) { return c.plant.ydot; })
      .def_readonly("beta", &InitialCondition::beta);

  py::class_<SimTrace>(m, "SimTrace")
      .def_readonly("final_time", &SimTrace::final_time)
      .def_property_readonly("t", [](const SimTrace& s) { return column(s.samples, [](const Sample& x) { return x.t; }); })
      .def_property_readonly("y", [](const SimTrace& s) { return column(s.samples, [](const Sample& x) { return x.y; }); })
      .def_property_readonly("ydot", [](const SimTrace& s) { return column(s.samples, [](const Sample& x) { return x.ydot; }); })
      .def_property_readonly("u", [](const SimTrace& s) { return column(s.samples, [](const Sample& x) { return x.u; }); })
      .def_property_readonly("beta", [](const SimTrace& s) { return column(s.samples, [](const Sample& x) { return x.beta; }); })
      .def_property_readonly("event_times", [](const SimTrace& s) { return column(s.events, [](const EventRecord& e) { return e.time; }); })
      .def_property_readonly("event_is_actuation", [](const SimTrace& s) {
        std::vector<bool> out;
        for (const auto& e : s.events) out.push_back(e.kind == EventKind::Actuation);
        return out;
      })
      .def_property_readonly("event_signs", [](const SimTrace& s) {
        std::vector<int> out;
        for (const auto& e : s.events) out.push_back(e.sign);
        return out;
      })
      .def_property_readonly("peak_times", [](const SimTrace& s) { return column(s.peaks, [](const Peak& p) { return p.t; }); })
      .def_property_readonly("peak_magnitudes", [](const SimTrace& s) { return column(s.peaks, [](const Peak& p) { return p.magnitude; }); })
      .def_property_readonly("burst_widths", [](const SimTrace& s) {
        return column(s.burst_widths(), [](const Peak& p) { return p.magnitude; });
      });

  m.def(
      "run_closed_loop",
      [](const PlantParams& p, const AdaptiveParams& a, double a_star, const InitialCondition& init,
         double horizon, double dt, int sample_stride, AdaptationRule rule, bool control_enabled) {
        SimOptions o;
        o.horizon = horizon;
        o.dt = dt;
        o.sample_stride = sample_stride;
        o.rule = rule;
        o.control_enabled = control_enabled;
        py::gil_scoped_release release;
        return run_closed_loop(p, a, a_star, init, o);
      },
      py::arg("plant"), py::arg("adaptive"), py::arg("a_star"),
      py::arg("init") = InitialCondition{}, py::arg("horizon"), py::arg("dt") = 0.0,
      py::arg("sample_stride") = 1, py::arg("rule") = AdaptationRule::PeakMagnitude,
      py::arg("control_enabled") = true);

  py::class_<Objectives>(m, "Objectives")
      .def_readonly("periodicity_residual", &Objectives::periodicity_residual)
      .def_readonly("amplitude_error", &Objectives::amplitude_error)
      .def_readonly("ultimate_amplitude_error", &Objectives::ultimate_amplitude_error);
  m.def("measure_objectives", &measure_objectives, py::arg("trace"), py::arg("a_star"),
        py::arg("omega_ref"), py::arg("tail_fraction") = 0.25);

  py::class_<SlowGains>(m, "SlowGains")
      .def(py::init([](double g0, double g1, double g2, double omega_star, double beta_star) {
             return SlowGains{g0, g1, g2, omega_star, beta_star};
           }),
           py::arg("g0"), py::arg("g1"), py::arg("g2"), py::arg("omega_star") = 1.0,
           py::arg("beta_star") = 1.0)
      .def_readonly("g0", &SlowGains::g0)
      .def_readonly("g1", &SlowGains::g1)
      .def_readonly("g2", &SlowGains::g2)
      .def_readonly("omega_star", &SlowGains::omega_star)
      .def_readonly("beta_star", &SlowGains::beta_star);
  py::enum_<SlowRegime>(m, "SlowRegime")
      .value("STABLE_FIXED_POINT", SlowRegime::StableFixedPoint)
      .value("ULTIMATELY_BOUNDED", SlowRegime::UltimatelyBounded);
  py::class_<SlowVerdict>(m, "SlowVerdict")
      .def_readonly("regime", &SlowVerdict::regime)
      .def_readonly("fixed_point", &SlowVerdict::fixed_point)
      .def_readonly("ultimate_bound", &SlowVerdict::ultimate_bound);

  m.def("make_gains", py::overload_cast<double, double, double, double>(&make_gains),
        py::arg("gamma"), py::arg("c"), py::arg("beta_star"), py::arg("omega_star"));
  m.def("step_error", &step_error, py::arg("beta_err"), py::arg("gains"));
  m.def("fixed_point", &fixed_point, py::arg("gains"));
  m.def("classify", &classify, py::arg("gains"));
  m.def("bifurcation_gamma", py::overload_cast<double, double, double>(&bifurcation_gamma),
        py::arg("c"), py::arg("beta_star"), py::arg("omega_star"));
  m.def("iterate", &iterate, py::arg("beta0"), py::arg("gains"), py::arg("n"));
  m.def("predicted_amplitude_error", &predicted_amplitude_error, py::arg("gains"),
        py::arg("a_star"), py::arg("plant") = PlantParams{});

  py::class_<UncertaintyInterval>(m, "UncertaintyInterval")
      .def(py::init([](double lo, double hi) {
             UncertaintyInterval iv{lo, hi};
             iv.validate();
             return iv;
           }),
           py::arg("beta_low"), py::arg("beta_high"))
      .def_readonly("beta_low", &UncertaintyInterval::beta_low)
      .def_readonly("beta_high", &UncertaintyInterval::beta_high);
  py::enum_<CostBranch>(m, "CostBranch")
      .value("STABLE", CostBranch::Stable)
      .value("UNSTABLE", CostBranch::Unstable);
  m.def(
      "cost",
      [](double gamma, double beta_star, double c, double omega_star) {
        const auto e = cost(gamma, beta_star, c, omega_star);
        return py::make_tuple(e.value, e.branch);
      },
      py::arg("gamma"), py::arg("beta_star"), py::arg("c"), py::arg("omega_star"));
  py::class_<WorstCase>(m, "WorstCase")
      .def_readonly("value", &WorstCase::value)
      .def_readonly("argmax_beta", &WorstCase::argmax_beta);
  m.def("worst_case", &worst_case, py::arg("gamma"), py::arg("interval"), py::arg("c"),
        py::arg("omega_star"));
  m.def("gamma_opt", &gamma_opt, py::arg("interval"), py::arg("c"), py::arg("omega_star"));

  py::class_<TuningReport>(m, "TuningReport")
      .def_readonly("a_star", &TuningReport::a_star)
      .def_readonly("beta_star", &TuningReport::beta_star)
      .def_readonly("omega_star", &TuningReport::omega_star)
      .def_readonly("beta_low", &TuningReport::beta_low)
      .def_readonly("beta_high", &TuningReport::beta_high)
      .def_readonly("c", &TuningReport::c)
      .def_readonly("gamma_opt", &TuningReport::gamma_opt)
      .def_readonly("predicted_cost", &TuningReport::predicted_cost)
      .def_readonly("interior_samples", &TuningReport::interior_samples)
      .def_readonly("interior_escapes", &TuningReport::interior_escapes);
  m.def(
      "tune",
      [](double a_star, const PlantParams& p, double c, std::optional<UncertaintyInterval> interval,
         double rel_lambda, double rel_xi, double rel_omega_n) {
        if (interval) return tune(a_star, p, *interval, c);
        return tune(a_star, p, PlantUncertainty{rel_lambda, rel_xi, rel_omega_n}, c);
      },
      py::arg("a_star"), py::arg("plant") = PlantParams{}, py::arg("c") = 0.2,
      py::arg("interval") = py::none(), py::arg("rel_lambda") = 0.0, py::arg("rel_xi") = 0.0,
      py::arg("rel_omega_n") = 0.0);
}
