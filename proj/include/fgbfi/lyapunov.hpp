#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "fgbfi/numerics.hpp"
#include "fgbfi/quadsys.hpp"
#include "fgbfi/trajectory.hpp"

namespace fgbfi {

/// Initial perturbation directions, stored before normalization.
struct PerturbationGroup {
  std::string label;
  std::vector<State> vectors;
};

/// The four reference tumor-model groups, numbered 1..4 (labels "I".."IV").
PerturbationGroup tumor_perturbation_group(const Context& ctx, int number);

/// n unit vectors along the coordinate axes.
PerturbationGroup axis_group(const Context& ctx, std::size_t n);

struct GramSchmidtResult {
  std::vector<State> basis;  // orthonormal, same order as the input
  std::vector<Real> norms;   // norm of each vector right before its normalization
};

/// Gram-Schmidt in input order: project out the earlier (already normalized) vectors,
/// twice, then normalize. Throws LinearDependence when a norm falls below `min_norm`.
GramSchmidtResult gram_schmidt_pass(std::span<const State> vectors, const Real& min_norm,
                                    std::size_t segment = 0);

struct LyapunovOptions {
  /// Called after each segment k = 1..M with the running estimates.
  std::function<void(std::size_t, std::span<const double>)> progress;
};

struct LyapunovResult {
  std::vector<Real> exponents;  // algorithm order: lambda_i from the i-th vector
  std::size_t segments = 0;     // M
  Real tau{53};
  Real total_time{53};
  std::string group;
  /// Running estimates after each segment (history[k-1] after segment k).
  std::vector<std::vector<double>> history;
  /// Largest disagreement between the base-state blocks of the m extended solutions.
  double base_spread = 0.0;

  std::vector<double> raw() const;
  std::vector<double> sorted() const;  // descending
  double kaplan_yorke() const;
  /// max_i |lambda_i(T) - lambda_i(0.9 T)| <= 1% of max_i |lambda_i(T)|.
  bool stabilized(double tail_fraction = 0.1, double tolerance = 0.01) const;
};

/// Benettin's algorithm over the variationally extended system: each segment of
/// length tau = T / M integrates [Y, Z_i] for every perturbation vector, then
/// re-orthonormalizes the Z_i and accumulates the log norms. `ball` bounds the base state.
LyapunovResult benettin(const QuadraticSystem& system, std::span<const Real> y0,
                        const PerturbationGroup& group, const Real& total_time, std::size_t segments,
                        const BoundingBall& ball, const Context& ctx,
                        const LyapunovOptions& options = {});

/// D_KY = j + (lambda_1 + ... + lambda_j) / |lambda_{j+1}|, j the largest index with a
/// nonnegative partial sum. Sorts its input descending.
double kaplan_yorke(std::span<const double> exponents);

/// Trapezoidal time average of trace J(X(t)) along the dense-sampled trajectory.
Real divergence_average(const QuadraticSystem& system, const Trajectory& trajectory,
                        const Real& grid_step);

}  // namespace fgbfi
