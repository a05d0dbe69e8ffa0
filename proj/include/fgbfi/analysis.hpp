#pragma once

#include <optional>
#include <span>
#include <vector>

#include "fgbfi/numerics.hpp"
#include "fgbfi/quadsys.hpp"
#include "fgbfi/trajectory.hpp"

namespace fgbfi {

struct DistanceSample {
  Real time;
  State state;
  Real rho;  // Euclidean distance to the initial point
};

/// rho(t) = |X(t) - X(0)| on the dense grid.
std::vector<DistanceSample> distance_series(const Trajectory& trajectory, const Real& grid_step);

struct ReturnEvent {
  std::size_t index = 0;
  Real time;
  State state;
  Real rho;
};

/// Event 0 is the initial sample; further events are strict local minima of rho
/// over +-window neighbouring samples (the window is truncated at the ends).
std::vector<ReturnEvent> find_returns(std::span<const DistanceSample> series, std::size_t window);

/// Mean of t_{k+2} - t_k over even k: the near-period of the recurrence.
std::optional<double> even_return_spacing(std::span<const ReturnEvent> events);

/// Classical fixed-step RK4 in the system's precision. The last step is shortened so
/// the run ends exactly at T.
State rk4_integrate(const QuadraticSystem& system, std::span<const Real> x0, const Real& step,
                    const Real& total_time);

struct RK4Comparison {
  Real step;
  State rk4_endpoint;
  State reference_endpoint;
  Real error;  // Euclidean distance between the endpoints
};

RK4Comparison rk4_error(const QuadraticSystem& system, std::span<const Real> x0, const Real& step,
                        const Real& total_time, const Trajectory& reference);

/// Least-squares slope of log(error) against log(step).
double convergence_order(std::span<const double> steps, std::span<const double> errors);

}  // namespace fgbfi
