#include "fgbfi/trajectory.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include "fgbfi/errors.hpp"

namespace fgbfi {

bool ball_contains(const BoundingBall& ball, std::span<const Real> x) {
  const std::size_t dims = ball.center.size();
  if (x.size() < dims) throw DimensionMismatch(dims, x.size());
  return distance(x.first(dims), ball.center) <= ball.radius;
}

namespace {

BoundingBall coarse_ball(const QuadraticSystem& system, std::span<const Real> x0, double total_time,
                         double inflation, double rk4_step, double sign) {
  const std::size_t n = system.dimension();
  if (x0.size() != n) throw DimensionMismatch(n, x0.size());
  if (!(rk4_step > 0) || !(inflation > 0)) throw ConfigError("estimate_ball: step and inflation must be positive");

  const auto a = to_doubles(system.linear().data());
  std::vector<std::vector<double>> q;
  for (const auto& m : system.quadratic()) q.push_back(to_doubles(m.data()));

  const auto rhs = [&](const std::vector<double>& x) {
    std::vector<double> out(n, 0.0);
    for (std::size_t p = 0; p < n; ++p) {
      double acc = 0.0;
      for (std::size_t k = 0; k < n; ++k) acc += a[p * n + k] * x[k];
      for (std::size_t u = 0; u < n; ++u) {
        double row = 0.0;
        for (std::size_t v = 0; v < n; ++v) row += q[p][u * n + v] * x[v];
        acc += row * x[u];
      }
      out[p] = acc;
    }
    return out;
  };
  const auto axpy = [n](const std::vector<double>& x, const std::vector<double>& k, double h) {
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = x[i] + h * k[i];
    return out;
  };

  std::vector<double> x = to_doubles(x0);
  std::vector<double> lo = x, hi = x;
  std::vector<std::vector<double>> visited{x};
  const auto steps = static_cast<std::size_t>(std::ceil(std::max(total_time, 0.0) / rk4_step));
  rk4_step *= sign;
  for (std::size_t s = 0; s < steps; ++s) {
    const auto k1 = rhs(x);
    const auto k2 = rhs(axpy(x, k1, rk4_step / 2));
    const auto k3 = rhs(axpy(x, k2, rk4_step / 2));
    const auto k4 = rhs(axpy(x, k3, rk4_step));
    for (std::size_t i = 0; i < n; ++i) {
      x[i] += rk4_step / 6 * (k1[i] + 2 * k2[i] + 2 * k3[i] + k4[i]);
      if (!std::isfinite(x[i])) throw ConfigError("estimate_ball: preliminary run diverged");
      lo[i] = std::min(lo[i], x[i]);
      hi[i] = std::max(hi[i], x[i]);
    }
    visited.push_back(x);
  }

  std::vector<double> center(n);
  for (std::size_t i = 0; i < n; ++i) center[i] = 0.5 * (lo[i] + hi[i]);
  double reach = 0.0;
  for (const auto& v : visited) {
    double d2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) d2 += (v[i] - center[i]) * (v[i] - center[i]);
    reach = std::max(reach, std::sqrt(d2));
  }
  const double radius = std::max(inflation * reach, 1.0);

  const Bits bits = system.precision();
  BoundingBall ball{{}, Real(bits)};
  for (double c : center) {
    Real r(bits);
    mpfr_set_d(r.get(), c, MPFR_RNDN);
    ball.center.push_back(std::move(r));
  }
  mpfr_set_d(ball.radius.get(), radius, MPFR_RNDN);
  return ball;
}

}  // namespace

BoundingBall estimate_ball(const QuadraticSystem& system, std::span<const Real> x0, double total_time,
                           double inflation, double rk4_step) {
  return coarse_ball(system, x0, total_time, inflation, rk4_step, 1.0);
}

BoundingBall estimate_ball(const QuadraticSystem& system, std::span<const Real> x0, double total_time,
                           Direction direction) {
  if (direction == Direction::forward) return estimate_ball(system, x0, total_time);
  try {
    return coarse_ball(system, x0, total_time, 2.0, 1e-3, -1.0);
  } catch (const ConfigError&) {
    // Reversed time is often violently unstable in double precision.
    Real reach = norm2(x0);
    if (reach < 1L) reach = Real(1L, system.precision());
    return {State(x0.begin(), x0.end()), reach * 10L};
  }
}

const TaylorStep& Trajectory::locate(const Real& elapsed) const {
  if (steps.empty()) throw Error("trajectory has no stored steps");
  // Last step whose start is not after `elapsed`.
  const auto it = std::upper_bound(steps.begin(), steps.end(), elapsed,
                                   [](const Real& s, const TaylorStep& step) {
                                     return s < abs(step.t_start);
                                   });
  return it == steps.begin() ? steps.front() : *std::prev(it);
}

Trajectory construct_trajectory(const QuadraticSystem& system, std::span<const Real> x0,
                                const Real& total_time, Direction direction,
                                const BoundingBall& ball, const Context& ctx,
                                const TrajectoryOptions& options) {
  const std::size_t n = system.dimension();
  if (x0.size() != n) throw DimensionMismatch(n, x0.size());
  if (system.precision() != ctx.bits())
    throw ConfigError("system built at " + std::to_string(system.precision()) +
                      " bits but the context uses " + std::to_string(ctx.bits()));
  if (total_time < 0L) throw ConfigError("time segment length must be >= 0");
  if (!ball_contains(ball, x0)) throw ConfigError("initial point lies outside the bounding ball");

  const long way = static_cast<long>(direction);
  Trajectory traj;
  traj.direction = direction;
  traj.start.assign(x0.begin(), x0.end());
  traj.endpoint = traj.start;
  traj.total_time = total_time;

  const SeriesPlan plan(system);
  Real t = ctx.zero();
  while (t < total_time) {
    // Steps 5-7: guaranteed step, clamped to the remaining time, signed by direction.
    Real dt = step_size(system, traj.endpoint, ctx.step_margin()).dt_max;
    Real t_next(ctx.bits());
    if (dt > total_time - t) {
      dt = total_time - t;
      t_next = total_time;
    } else {
      t_next = t + dt;
    }

    TaylorStep step = compute_coefficients(system, plan, traj.endpoint, t * way, dt * way,
                                           ctx.series_accuracy(), ctx.degree_cap());
    State arrival = evaluate(step, step.dt);
    if (!ball_contains(ball, arrival)) throw BallEscape((t_next * way).to_double());

    auto& st = traj.stats;
    st.min_degree = st.step_count == 0 ? step.degree : std::min(st.min_degree, step.degree);
    st.max_degree = std::max(st.max_degree, step.degree);
    ++st.step_count;
    if (options.sink) options.sink(step, arrival);
    if (options.keep_steps) traj.steps.push_back(std::move(step));

    traj.endpoint = std::move(arrival);
    t = std::move(t_next);
  }
  return traj;
}

std::vector<Sample> dense_sample(const Trajectory& trajectory, const Real& grid_step) {
  if (!(grid_step > 0L)) throw ConfigError("grid step must be positive");
  const Real& total = trajectory.total_time;
  const long way = static_cast<long>(trajectory.direction);
  const Bits bits = std::max(total.precision(), grid_step.precision());

  std::vector<Sample> out;
  const auto emit = [&](const Real& elapsed) {
    if (trajectory.steps.empty()) {
      out.push_back({elapsed * way, trajectory.start, 0});
      return;
    }
    const TaylorStep& step = trajectory.locate(elapsed);
    Real local = elapsed * way - step.t_start;
    if (abs(local) > abs(step.dt)) local = step.dt;
    out.push_back({elapsed * way, evaluate(step, local), step.degree});
  };

  // Interior grid points stop short of T by a tiny fraction of the grid so T itself
  // is emitted exactly once, even when T / grid is not representable.
  const Real cutoff = total - grid_step * Real("1e-9", bits);
  for (long k = 0;; ++k) {
    Real elapsed = grid_step * k;
    if (k > 0 && !(elapsed < cutoff)) break;
    if (elapsed > total) break;
    emit(elapsed);
    if (total.is_zero()) return out;
  }
  emit(total);
  return out;
}

VerificationReport verify_round_trip(const QuadraticSystem& system, std::span<const Real> x0,
                                     const Real& total_time, const BoundingBall& ball,
                                     const Context& ctx) {
  const TrajectoryOptions lean{false, {}};
  const auto leg = [&](std::span<const Real> start, Direction dir, const char* name) {
    try {
      return construct_trajectory(system, start, total_time, dir, ball, ctx, lean);
    } catch (const BallEscape& e) {
      throw e.with_leg(name);
    } catch (const AccuracyUnreachable& e) {
      throw e.with_leg(name);
    }
  };

  const Trajectory forward = leg(x0, Direction::forward, "forward");
  const Trajectory backward = leg(forward.endpoint, Direction::backward, "backward");

  VerificationReport report;
  report.initial.assign(x0.begin(), x0.end());
  report.forward_endpoint = forward.endpoint;
  report.backward_endpoint = backward.endpoint;
  report.max_deviation = ctx.zero();
  report.tolerance = ctx.round_trip_tolerance();
  for (std::size_t p = 0; p < x0.size(); ++p) {
    Real dev = abs(backward.endpoint[p] - x0[p]);
    if (dev > report.max_deviation) report.max_deviation = dev;
    report.deviation.push_back(std::move(dev));
  }
  report.forward = forward.stats;
  report.backward = backward.stats;
  report.passed = report.max_deviation < report.tolerance &&
                  forward.stats.max_degree == backward.stats.max_degree &&
                  forward.stats.min_degree == backward.stats.min_degree;
  return report;
}

}  // namespace fgbfi
