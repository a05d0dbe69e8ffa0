#pragma once

#include <functional>
#include <span>
#include <vector>

#include "fgbfi/numerics.hpp"
#include "fgbfi/quadsys.hpp"
#include "fgbfi/taylor.hpp"

namespace fgbfi {

enum class Direction : int { forward = 1, backward = -1 };

/// Closed Euclidean ball assumed to contain the attractor.
struct BoundingBall {
  State center;
  Real radius;
};

/// Distance from the center <= radius. Only the leading center.size()
/// coordinates of x are tested, so a base-space ball also serves an extended system.
bool ball_contains(const BoundingBall& ball, std::span<const Real> x);

/// Ball around a coarse double-precision RK4 run over [0, T]: center at the
/// middle of the visited bounding box, radius = inflation * farthest distance.
BoundingBall estimate_ball(const QuadraticSystem& system, std::span<const Real> x0, double total_time,
                           double inflation = 2.0, double rk4_step = 1e-3);

/// Same, with the coarse run going in `direction`. A backward run that diverges falls
/// back to a ball of radius 10 * max(1, |x0|) around x0.
BoundingBall estimate_ball(const QuadraticSystem& system, std::span<const Real> x0, double total_time,
                           Direction direction);

struct TrajectoryStats {
  std::size_t step_count = 0;
  unsigned min_degree = 0;
  unsigned max_degree = 0;
};

/// Called after every accepted step with the step and its arrival point.
using StepSink = std::function<void(const TaylorStep&, const State&)>;

struct TrajectoryOptions {
  /// Retain every step's coefficients (needed for dense output).
  bool keep_steps = true;
  StepSink sink;
};

struct Trajectory {
  Direction direction = Direction::forward;
  State start;
  State endpoint;
  Real total_time{53};
  std::vector<TaylorStep> steps;  // empty when built with keep_steps = false
  TrajectoryStats stats;

  /// Step whose interval contains elapsed time s (0 <= s <= T).
  const TaylorStep& locate(const Real& elapsed) const;
};

/// Tiles [0, T] with guaranteed-convergence power-series steps, integrating in `direction`.
/// Throws BallEscape when an arrival point leaves `ball`.
Trajectory construct_trajectory(const QuadraticSystem& system, std::span<const Real> x0,
                                const Real& total_time, Direction direction,
                                const BoundingBall& ball, const Context& ctx,
                                const TrajectoryOptions& options = {});

struct Sample {
  Real time;  // signed: direction * elapsed
  State state;
  unsigned degree = 0;
};

/// Samples at elapsed 0, g, 2g, ... and exactly T, evaluating the stored polynomials.
std::vector<Sample> dense_sample(const Trajectory& trajectory, const Real& grid_step);

struct VerificationReport {
  State initial;
  State forward_endpoint;
  State backward_endpoint;
  std::vector<Real> deviation;  // |x_back - x0| per coordinate
  Real max_deviation{53};
  Real tolerance{53};
  TrajectoryStats forward;
  TrajectoryStats backward;
  bool passed = false;
};

/// Forward over [0, T], then backward for T from the forward endpoint. Passes when
/// every coordinate returns within eps_R and both legs share global min/max degree.
VerificationReport verify_round_trip(const QuadraticSystem& system, std::span<const Real> x0,
                                     const Real& total_time, const BoundingBall& ball,
                                     const Context& ctx);

}  // namespace fgbfi
