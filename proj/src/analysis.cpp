#include "fgbfi/analysis.hpp"

#include <cmath>

#include "fgbfi/errors.hpp"

namespace fgbfi {

std::vector<DistanceSample> distance_series(const Trajectory& trajectory, const Real& grid_step) {
  std::vector<DistanceSample> out;
  for (auto& s : dense_sample(trajectory, grid_step)) {
    Real rho = distance(s.state, trajectory.start);
    out.push_back({std::move(s.time), std::move(s.state), std::move(rho)});
  }
  return out;
}

std::vector<ReturnEvent> find_returns(std::span<const DistanceSample> series, std::size_t window) {
  if (window < 1) throw ConfigError("return window must be >= 1");
  std::vector<ReturnEvent> events;
  if (series.empty()) return events;
  events.push_back({0, series[0].time, series[0].state, series[0].rho});

  const std::size_t n = series.size();
  for (std::size_t i = 1; i < n; ++i) {
    const std::size_t lo = i > window ? i - window : 0;
    const std::size_t hi = std::min(n - 1, i + window);
    bool minimum = true;
    for (std::size_t j = lo; j <= hi && minimum; ++j)
      if (j != i && !(series[i].rho < series[j].rho)) minimum = false;
    if (minimum) events.push_back({events.size(), series[i].time, series[i].state, series[i].rho});
  }
  return events;
}

std::optional<double> even_return_spacing(std::span<const ReturnEvent> events) {
  double sum = 0.0;
  int count = 0;
  for (std::size_t k = 0; k + 2 < events.size(); k += 2) {
    sum += (events[k + 2].time - events[k].time).to_double();
    ++count;
  }
  if (count == 0) return std::nullopt;
  return sum / count;
}

namespace {

State axpy(std::span<const Real> x, const State& k, const Real& h) {
  State out(x.begin(), x.end());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += h * k[i];
  return out;
}

void rk4_step(const QuadraticSystem& system, State& x, const Real& h) {
  const Real half = h / 2L;
  const State k1 = evaluate_rhs(system, x);
  const State k2 = evaluate_rhs(system, axpy(x, k1, half));
  const State k3 = evaluate_rhs(system, axpy(x, k2, half));
  const State k4 = evaluate_rhs(system, axpy(x, k3, h));
  const Real sixth = h / 6L;
  for (std::size_t i = 0; i < x.size(); ++i) {
    Real incr = k1[i] + k2[i] * 2L;
    incr += k3[i] * 2L;
    incr += k4[i];
    x[i] += sixth * incr;
  }
}

}  // namespace

State rk4_integrate(const QuadraticSystem& system, std::span<const Real> x0, const Real& step,
                    const Real& total_time) {
  if (x0.size() != system.dimension()) throw DimensionMismatch(system.dimension(), x0.size());
  if (!(step > 0L)) throw ConfigError("RK4 step must be positive");
  if (total_time < 0L) throw ConfigError("time segment length must be >= 0");

  State x(x0.begin(), x0.end());
  if (total_time.is_zero()) return x;

  // Whole steps that fit in T; when T/step is an integer up to rounding of the
  // decimal step, the last of them absorbs the residue instead of adding a sliver.
  const Real ratio = total_time / step;
  Real whole(ratio.precision());
  mpfr_round(whole.get(), ratio.get());
  if (!(abs(ratio - whole) <= Real("1e-9", ratio.precision()))) mpfr_floor(whole.get(), ratio.get());
  const long full = mpfr_get_si(whole.get(), MPFR_RNDN);
  const bool exact_fit = full >= 1 && abs(ratio - whole) <= Real("1e-9", ratio.precision());

  const long plain = exact_fit ? full - 1 : full;
  for (long k = 0; k < plain; ++k) rk4_step(system, x, step);
  const Real last = total_time - step * plain;
  if (last > 0L) rk4_step(system, x, last);
  return x;
}

RK4Comparison rk4_error(const QuadraticSystem& system, std::span<const Real> x0, const Real& step,
                        const Real& total_time, const Trajectory& reference) {
  if (reference.direction != Direction::forward || reference.total_time != total_time)
    throw ConfigError("reference trajectory must run forward over the same [0, T]");
  State rk4 = rk4_integrate(system, x0, step, total_time);
  Real err = distance(rk4, reference.endpoint);
  return {step, std::move(rk4), reference.endpoint, std::move(err)};
}

double convergence_order(std::span<const double> steps, std::span<const double> errors) {
  if (steps.size() != errors.size() || steps.size() < 2)
    throw ConfigError("convergence_order needs at least two (step, error) pairs");
  const double n = static_cast<double>(steps.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < steps.size(); ++i) {
    const double x = std::log(steps[i]);
    const double y = std::log(errors[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace fgbfi
