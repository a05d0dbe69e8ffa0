#pragma once

#include <span>
#include <utility>
#include <vector>

#include "fgbfi/numerics.hpp"
#include "fgbfi/quadsys.hpp"

namespace fgbfi {

/// Guaranteed-convergence step length at one initial condition.
struct StepBudget {
  Real h1;      // sum of |x0_p|
  Real h2;
  Real dt_max;  // 1 / (h2 + delta)
};

StepBudget step_size(const QuadraticSystem& system, std::span<const Real> x0, const Real& delta);

using IndexPair = std::pair<std::size_t, std::size_t>;

/// Sparsity pattern of the coefficient recurrence: the coordinate products that
/// actually appear in some Q_p, and the nonzero entries of A and Q_p per row.
class SeriesPlan {
 public:
  explicit SeriesPlan(const QuadraticSystem& system);

  struct Term {
    std::size_t index;  // coordinate (linear) or pair slot (quadratic)
    Real coeff;
  };

  std::size_t dimension() const noexcept { return linear_.size(); }
  const std::vector<IndexPair>& pairs() const noexcept { return pairs_; }
  const std::vector<Term>& linear_terms(std::size_t p) const { return linear_[p]; }
  const std::vector<Term>& quadratic_terms(std::size_t p) const { return quadratic_[p]; }

 private:
  std::vector<IndexPair> pairs_;
  std::vector<std::vector<Term>> linear_;
  std::vector<std::vector<Term>> quadratic_;
};

/// One power-series step: x_p(t_start + s) = sum_i coeffs[p][i] * s^i for |s| <= |dt|.
struct TaylorStep {
  Real t_start;
  Real dt;  // signed; negative for backward integration
  std::vector<std::vector<Real>> coeffs;
  unsigned degree = 0;
};

/// c_{uv,order} = sum_{j=0}^{order} a_u[j] * a_v[order - j] for every requested pair.
std::vector<Real> cauchy_products(std::span<const std::vector<Real>> coeffs,
                                  std::span<const IndexPair> pairs, std::size_t order);

/// Builds the series at x0 for a step of signed length `dt`.
///
/// The degree is the smallest d >= 2 for which the terms of orders d-1 and d are both
/// below `eps_p` in every coordinate (|alpha_{p,i}| * |dt|^i < eps_p). The caller keeps
/// |dt| within the budget from `step_size`. Throws AccuracyUnreachable at `degree_cap`.
TaylorStep compute_coefficients(const QuadraticSystem& system, const SeriesPlan& plan,
                                std::span<const Real> x0, const Real& t_start, const Real& dt,
                                const Real& eps_p, unsigned degree_cap);

TaylorStep compute_coefficients(const QuadraticSystem& system, std::span<const Real> x0,
                                const Real& dt, const Real& eps_p, unsigned degree_cap);

/// Horner evaluation at local time s, |s| <= |step.dt|.
State evaluate(const TaylorStep& step, const Real& t_local);

}  // namespace fgbfi
