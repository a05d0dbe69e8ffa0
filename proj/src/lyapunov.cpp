#include "fgbfi/lyapunov.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>

#include "fgbfi/errors.hpp"

namespace fgbfi {

PerturbationGroup tumor_perturbation_group(const Context& ctx, int number) {
  static constexpr std::array<std::array<std::array<long, 3>, 3>, 4> kGroups{{
      {{{5, 7, 13}, {10, -1, 11}, {8, 6, 9}}},
      {{{-6, 13, 5}, {63, 1, -17}, {31, -7, 19}}},
      {{{1, -4, 75}, {7, -13, 11}, {-40, 51, 39}}},
      {{{1, 1, 2}, {1, -37, 11}, {29, -3, 5}}},
  }};
  static constexpr std::array<const char*, 4> kLabels{"I", "II", "III", "IV"};
  if (number < 1 || number > 4)
    throw ConfigError("perturbation group must be 1..4, got " + std::to_string(number));

  PerturbationGroup g{kLabels[number - 1], {}};
  for (const auto& v : kGroups[number - 1]) {
    State s;
    for (long c : v) s.push_back(ctx.number(c));
    g.vectors.push_back(std::move(s));
  }
  return g;
}

PerturbationGroup axis_group(const Context& ctx, std::size_t n) {
  PerturbationGroup g{"axes", {}};
  for (std::size_t i = 0; i < n; ++i) {
    State s = ctx.zeros(n);
    s[i] = ctx.number(1);
    g.vectors.push_back(std::move(s));
  }
  return g;
}

GramSchmidtResult gram_schmidt_pass(std::span<const State> vectors, const Real& min_norm,
                                    std::size_t segment) {
  GramSchmidtResult out;
  for (std::size_t i = 0; i < vectors.size(); ++i) {
    State v = vectors[i];
    // A second projection sweep removes what rounding left behind in the first, so
    // orthogonality holds to a few ulps however close to dependent the inputs are.
    for (int sweep = 0; sweep < 2; ++sweep)
      for (std::size_t j = 0; j < i; ++j) {
        const Real a = dot(v, out.basis[j]);
        for (std::size_t c = 0; c < v.size(); ++c) v[c] -= a * out.basis[j][c];
      }
    Real norm = norm2(v);
    if (!(norm >= min_norm)) throw LinearDependence(segment, i);
    for (auto& c : v) c /= norm;
    out.basis.push_back(std::move(v));
    out.norms.push_back(std::move(norm));
  }
  return out;
}

std::vector<double> LyapunovResult::raw() const { return to_doubles(exponents); }

std::vector<double> LyapunovResult::sorted() const {
  auto v = raw();
  std::sort(v.begin(), v.end(), std::greater<>());
  return v;
}

double LyapunovResult::kaplan_yorke() const { return fgbfi::kaplan_yorke(raw()); }

bool LyapunovResult::stabilized(double tail_fraction, double tolerance) const {
  if (history.size() < 2) return false;
  const auto back = static_cast<std::size_t>(std::ceil(tail_fraction * history.size()));
  const std::size_t earlier = history.size() - 1 - std::min(back, history.size() - 1);
  const auto& last = history.back();
  const auto& prev = history[earlier];
  double scale = 0.0, drift = 0.0;
  for (std::size_t i = 0; i < last.size(); ++i) {
    scale = std::max(scale, std::fabs(last[i]));
    drift = std::max(drift, std::fabs(last[i] - prev[i]));
  }
  return drift <= tolerance * scale;
}

LyapunovResult benettin(const QuadraticSystem& system, std::span<const Real> y0,
                        const PerturbationGroup& group, const Real& total_time, std::size_t segments,
                        const BoundingBall& ball, const Context& ctx,
                        const LyapunovOptions& options) {
  const std::size_t n = system.dimension();
  if (y0.size() != n) throw DimensionMismatch(n, y0.size());
  if (segments < 1) throw ConfigError("segment count M must be >= 1");
  if (!(total_time > 0L)) throw ConfigError("Lyapunov time T must be positive");
  if (group.vectors.empty() || group.vectors.size() > n)
    throw ConfigError("perturbation group needs between 1 and n vectors");
  for (std::size_t i = 0; i < group.vectors.size(); ++i) {
    if (group.vectors[i].size() != n) throw DimensionMismatch(n, group.vectors[i].size());
    if (std::all_of(group.vectors[i].begin(), group.vectors[i].end(),
                    [](const Real& c) { return c.is_zero(); }))
      throw ConfigError("perturbation vector " + std::to_string(i + 1) + " is zero");
  }

  const QuadraticSystem extended = extend_with_variational(system);
  const std::size_t m = group.vectors.size();
  const Real tau = total_time / static_cast<long>(segments);
  const Real min_norm = ctx.machine_epsilon() * 10L;
  const TrajectoryOptions lean{false, {}};

  LyapunovResult result;
  result.segments = segments;
  result.tau = tau;
  result.total_time = total_time;
  result.group = group.label;
  result.history.reserve(segments);

  State y(y0.begin(), y0.end());
  std::vector<State> z = group.vectors;
  std::vector<Real> sums(m, ctx.zero());
  State x(2 * n, ctx.zero());
  std::vector<double> running(m);

  for (std::size_t k = 0; k <= segments; ++k) {
    GramSchmidtResult gs = gram_schmidt_pass(z, min_norm, k);
    if (k != 0) {
      for (std::size_t i = 0; i < m; ++i) {
        sums[i] += log(gs.norms[i]);
        running[i] = (sums[i] / (tau * static_cast<long>(k))).to_double();
      }
      result.history.push_back(running);
      if (options.progress) options.progress(k, running);
    }
    z = std::move(gs.basis);
    if (k == segments) break;

    State next_y;
    for (std::size_t i = 0; i < m; ++i) {
      std::copy(y.begin(), y.end(), x.begin());
      std::copy(z[i].begin(), z[i].end(), x.begin() + static_cast<std::ptrdiff_t>(n));
      Trajectory seg = construct_trajectory(extended, x, tau, Direction::forward, ball, ctx, lean);
      if (i == 0) {
        next_y.assign(seg.endpoint.begin(), seg.endpoint.begin() + static_cast<std::ptrdiff_t>(n));
      } else {
        for (std::size_t c = 0; c < n; ++c)
          result.base_spread =
              std::max(result.base_spread, std::fabs((seg.endpoint[c] - next_y[c]).to_double()));
      }
      z[i].assign(seg.endpoint.begin() + static_cast<std::ptrdiff_t>(n), seg.endpoint.end());
    }
    y = std::move(next_y);
  }

  for (auto& s : sums) s /= total_time;
  result.exponents = std::move(sums);
  return result;
}

double kaplan_yorke(std::span<const double> exponents) {
  if (exponents.empty()) throw ConfigError("kaplan_yorke needs at least one exponent");
  std::vector<double> l(exponents.begin(), exponents.end());
  std::sort(l.begin(), l.end(), std::greater<>());

  double partial = 0.0;
  std::size_t j = 0;
  for (; j < l.size(); ++j) {
    if (partial + l[j] < 0.0) break;
    partial += l[j];
  }
  if (j == l.size()) return static_cast<double>(l.size());
  if (l[j] == 0.0) throw ConfigError("degenerate spectrum: lambda_" + std::to_string(j + 1) + " = 0");
  return static_cast<double>(j) + partial / std::fabs(l[j]);
}

Real divergence_average(const QuadraticSystem& system, const Trajectory& trajectory,
                        const Real& grid_step) {
  const auto samples = dense_sample(trajectory, grid_step);
  const long way = static_cast<long>(trajectory.direction);
  if (samples.size() < 2 || trajectory.total_time.is_zero())
    return jacobian_trace(system, trajectory.start) * way;

  Real integral(0L, system.precision());
  Real prev = jacobian_trace(system, samples[0].state);
  for (std::size_t i = 1; i < samples.size(); ++i) {
    Real cur = jacobian_trace(system, samples[i].state);
    const Real width = abs(samples[i].time - samples[i - 1].time);
    integral += (prev + cur) * width / 2L;
    prev = std::move(cur);
  }
  return integral / trajectory.total_time * way;
}

}  // namespace fgbfi
