#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <optional>

#include "fgbfi/analysis.hpp"
#include "fgbfi/errors.hpp"
#include "fgbfi/lyapunov.hpp"

namespace py = pybind11;
using namespace fgbfi;

namespace {

// Numbers cross the boundary as decimal strings so nothing is rounded through double.
State to_state(const Context& ctx, const std::vector<std::string>& coords) { return ctx.state(coords); }

std::vector<std::string> to_strings(const State& x, int digits) {
  std::vector<std::string> out;
  for (const auto& v : x) out.push_back(v.to_fixed(digits));
  return out;
}

BoundingBall resolve_ball(const QuadraticSystem& sys, const Context& ctx, const State& x0, double horizon,
                          const std::optional<std::pair<std::vector<std::string>, std::string>>& ball,
                          Direction direction = Direction::forward) {
  if (!ball) return estimate_ball(sys, x0, horizon, direction);
  return {to_state(ctx, ball->first), ctx.parse(ball->second)};
}

py::dict stats_dict(const TrajectoryStats& s) {
  py::dict d;
  d["steps"] = s.step_count;
  d["min_degree"] = s.min_degree;
  d["max_degree"] = s.max_degree;
  return d;
}

py::dict integrate(const QuadraticSystem& sys, const std::vector<std::string>& x0, const std::string& T,
                   const Context& ctx, const std::string& grid, const std::string& direction,
                   const std::optional<std::pair<std::vector<std::string>, std::string>>& ball, int digits) {
  if (direction != "forward" && direction != "backward")
    throw ConfigError("direction must be 'forward' or 'backward'");
  const Direction dir = direction == "forward" ? Direction::forward : Direction::backward;
  const State start = to_state(ctx, x0);
  const Real total = ctx.parse(T);
  Trajectory traj;
  std::vector<Sample> samples;
  {
    py::gil_scoped_release release;
    const BoundingBall b = resolve_ball(sys, ctx, start, total.to_double(), ball, dir);
    traj = construct_trajectory(sys, start, total, dir, b, ctx);
    samples = dense_sample(traj, ctx.parse(grid));
  }
  py::list t, x, deg;
  for (const auto& s : samples) {
    t.append(s.time.to_double());
    x.append(to_doubles(s.state));
    deg.append(s.degree);
  }
  py::dict out;
  out["t"] = t;
  out["x"] = x;
  out["degree"] = deg;
  out["endpoint"] = to_strings(traj.endpoint, digits);
  out["stats"] = stats_dict(traj.stats);
  return out;
}

py::dict verify(const QuadraticSystem& sys, const std::vector<std::string>& x0, const std::string& T,
                const Context& ctx, const std::optional<std::pair<std::vector<std::string>, std::string>>& ball) {
  const State start = to_state(ctx, x0);
  const Real total = ctx.parse(T);
  VerificationReport r;
  {
    py::gil_scoped_release release;
    r = verify_round_trip(sys, start, total, resolve_ball(sys, ctx, start, total.to_double(), ball), ctx);
  }
  py::dict out;
  out["passed"] = r.passed;
  out["max_deviation"] = r.max_deviation.to_double();
  out["tolerance"] = r.tolerance.to_double();
  out["forward"] = stats_dict(r.forward);
  out["backward"] = stats_dict(r.backward);
  return out;
}

py::list returns(const QuadraticSystem& sys, const std::vector<std::string>& x0, const std::string& T,
                 const Context& ctx, const std::string& grid, std::size_t window) {
  const State start = to_state(ctx, x0);
  const Real total = ctx.parse(T);
  std::vector<ReturnEvent> events;
  {
    py::gil_scoped_release release;
    const auto traj = construct_trajectory(sys, start, total, Direction::forward,
                                           estimate_ball(sys, start, total.to_double()), ctx);
    events = find_returns(distance_series(traj, ctx.parse(grid)), window);
  }
  py::list out;
  for (const auto& e : events) {
    py::dict d;
    d["n"] = e.index;
    d["t"] = e.time.to_double();
    d["x"] = to_doubles(e.state);
    d["rho"] = e.rho.to_double();
    out.append(d);
  }
  return out;
}

py::dict rk4_compare(const QuadraticSystem& sys, const std::vector<std::string>& x0, const std::string& T,
                     const Context& ctx, const std::vector<std::string>& steps) {
  const State start = to_state(ctx, x0);
  const Real total = ctx.parse(T);
  std::vector<double> hs, errs;
  {
    py::gil_scoped_release release;
    const auto ref = construct_trajectory(sys, start, total, Direction::forward,
                                          estimate_ball(sys, start, total.to_double()), ctx, {false, {}});
    for (const auto& h : steps) {
      const auto cmp = rk4_error(sys, start, ctx.parse(h), total, ref);
      hs.push_back(cmp.step.to_double());
      errs.push_back(cmp.error.to_double());
    }
  }
  py::dict out;
  out["steps"] = hs;
  out["errors"] = errs;
  out["order"] = hs.size() >= 2 ? py::cast(convergence_order(hs, errs)) : py::none();
  return out;
}

py::dict lyapunov(const QuadraticSystem& sys, const std::vector<std::string>& x0, const std::string& T,
                  std::size_t segments, const Context& ctx, const std::string& group) {
  const State start = to_state(ctx, x0);
  const Real total = ctx.parse(T);
  const PerturbationGroup g =
      group == "axes" ? axis_group(ctx, sys.dimension()) : tumor_perturbation_group(ctx, std::stoi(group));
  LyapunovResult r;
  {
    py::gil_scoped_release release;
    r = benettin(sys, start, g, total, segments, estimate_ball(sys, start, total.to_double()), ctx);
  }
  py::dict out;
  out["group"] = r.group;
  out["exponents"] = r.raw();
  out["sorted"] = r.sorted();
  out["tau"] = r.tau.to_double();
  out["stabilized"] = r.stabilized();
  try {
    out["kaplan_yorke"] = r.kaplan_yorke();
  } catch (const ConfigError&) {
    out["kaplan_yorke"] = py::none();
  }
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Multiple-precision power-series integration of quadratic ODE systems";

  // Later registrations are tried first, so the base class goes in first.
  auto& base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<ConfigError>(m, "ConfigError", base.ptr());
  py::register_exception<BallEscape>(m, "BallEscape", base.ptr());

  py::class_<Context>(m, "Context")
      .def(py::init([](Bits bits, const std::string& eps_series, const std::string& eps_roundtrip,
                       const std::string& delta, unsigned degree_cap) {
             PrecisionConfig cfg;
             cfg.mantissa_bits = bits;
             cfg.series_accuracy = eps_series;
             cfg.round_trip_tolerance = eps_roundtrip;
             cfg.step_margin = delta;
             cfg.degree_cap = degree_cap;
             return Context{cfg};
           }),
           py::arg("bits") = 160, py::arg("eps_series") = "1e-40", py::arg("eps_roundtrip") = "1e-10",
           py::arg("delta") = "1", py::arg("degree_cap") = 200)
      .def_property_readonly("bits", &Context::bits)
      .def_property_readonly("machine_epsilon", [](const Context& c) { return c.machine_epsilon().to_double(); })
      .def("__repr__", [](const Context& c) { return "Context(" + c.config().describe() + ")"; });

  py::class_<QuadraticSystem>(m, "System")
      .def_property_readonly("name", &QuadraticSystem::name)
      .def_property_readonly("dimension", &QuadraticSystem::dimension)
      .def_property_readonly("labels", &QuadraticSystem::labels)
      .def_property_readonly("mu", [](const QuadraticSystem& s) { return s.mu().to_double(); })
      .def("rhs",
           [](const QuadraticSystem& s, const Context& ctx, const std::vector<py::object>& x) {
             std::vector<std::string> text;
             for (const auto& v : x) text.push_back(py::str(v));
             return to_doubles(evaluate_rhs(s, to_state(ctx, text)));
           },
           py::arg("ctx"), py::arg("x"))
      .def("__repr__", [](const QuadraticSystem& s) {
        return "System('" + s.name() + "', n=" + std::to_string(s.dimension()) + ")";
      });

  m.def("machine_epsilon", [](Bits bits) { return machine_epsilon(bits).to_scientific(5); }, py::arg("bits"));
  m.def("catalog_system",
        [](const Context& ctx, const std::string& model, const ModelParameters& params) {
          return catalog_system(ctx, model, params);
        },
        py::arg("ctx"), py::arg("model"), py::arg("params") = ModelParameters{});
  m.def("load_system_file", &load_system_file, py::arg("ctx"), py::arg("path"));
  m.def("integrate", &integrate, py::arg("system"), py::arg("x0"), py::arg("T"), py::arg("ctx"),
        py::arg("grid") = "0.01", py::arg("direction") = "forward", py::arg("ball") = py::none(),
        py::arg("digits") = 20);
  m.def("verify", &verify, py::arg("system"), py::arg("x0"), py::arg("T"), py::arg("ctx"),
        py::arg("ball") = py::none());
  m.def("returns", &returns, py::arg("system"), py::arg("x0"), py::arg("T"), py::arg("ctx"),
        py::arg("grid") = "0.001", py::arg("window") = 5);
  m.def("rk4_compare", &rk4_compare, py::arg("system"), py::arg("x0"), py::arg("T"), py::arg("ctx"),
        py::arg("steps"));
  m.def("lyapunov", &lyapunov, py::arg("system"), py::arg("x0"), py::arg("T"), py::arg("segments"),
        py::arg("ctx"), py::arg("group") = "1");
  m.def("kaplan_yorke", [](const std::vector<double>& l) { return kaplan_yorke(l); }, py::arg("exponents"));
}
