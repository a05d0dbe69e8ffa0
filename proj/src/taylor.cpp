#include "fgbfi/taylor.hpp"

#include <algorithm>

#include "fgbfi/errors.hpp"

namespace fgbfi {

StepBudget step_size(const QuadraticSystem& system, std::span<const Real> x0, const Real& delta) {
  if (x0.size() != system.dimension()) throw DimensionMismatch(system.dimension(), x0.size());
  const Real& a = system.linear_norm();
  const Real& mu = system.mu();
  Real h1 = norm1(x0);
  Real h2 = h1 > 1L ? mu * h1 * h1 + (a + mu * 2L) * h1 : a + mu;
  Real dt = Real(1L, h2.precision()) / (h2 + delta);
  return {std::move(h1), std::move(h2), std::move(dt)};
}

SeriesPlan::SeriesPlan(const QuadraticSystem& system) {
  const std::size_t n = system.dimension();
  for (std::size_t u = 0; u < n; ++u)
    for (std::size_t v = 0; v < n; ++v)
      for (std::size_t p = 0; p < n; ++p)
        if (!system.quadratic(p)(u, v).is_zero()) {
          pairs_.emplace_back(u, v);
          break;
        }

  linear_.resize(n);
  quadratic_.resize(n);
  for (std::size_t p = 0; p < n; ++p) {
    for (std::size_t q = 0; q < n; ++q)
      if (!system.linear()(p, q).is_zero()) linear_[p].push_back({q, system.linear()(p, q)});
    const Matrix& qp = system.quadratic(p);
    for (std::size_t slot = 0; slot < pairs_.size(); ++slot) {
      const auto [u, v] = pairs_[slot];
      if (!qp(u, v).is_zero()) quadratic_[p].push_back({slot, qp(u, v)});
    }
  }
}

namespace {

void cauchy_into(Real& out, Real& scratch, const std::vector<Real>& a, const std::vector<Real>& b,
                 std::size_t order) {
  mul_into(out, a[0], b[order]);
  for (std::size_t j = 1; j <= order; ++j) {
    mul_into(scratch, a[j], b[order - j]);
    add_into(out, out, scratch);
  }
}

}  // namespace

std::vector<Real> cauchy_products(std::span<const std::vector<Real>> coeffs,
                                  std::span<const IndexPair> pairs, std::size_t order) {
  std::vector<Real> out;
  out.reserve(pairs.size());
  for (const auto& [u, v] : pairs) {
    const auto& a = coeffs[u];
    const auto& b = coeffs[v];
    if (a.size() <= order || b.size() <= order)
      throw Error("cauchy_products: coefficients not available through order " +
                  std::to_string(order));
    Real c(std::max(a[0].precision(), b[0].precision()));
    Real scratch(c.precision());
    cauchy_into(c, scratch, a, b, order);
    out.push_back(std::move(c));
  }
  return out;
}

TaylorStep compute_coefficients(const QuadraticSystem& system, const SeriesPlan& plan,
                                std::span<const Real> x0, const Real& t_start, const Real& dt,
                                const Real& eps_p, unsigned degree_cap) {
  const std::size_t n = system.dimension();
  if (x0.size() != n) throw DimensionMismatch(n, x0.size());
  const Bits bits = system.precision();

  TaylorStep step{t_start, dt, {}, 0};
  step.coeffs.resize(n);
  for (std::size_t p = 0; p < n; ++p) {
    step.coeffs[p].reserve(32);
    step.coeffs[p].push_back(x0[p]);
  }

  const auto& pairs = plan.pairs();
  std::vector<Real> products(pairs.size(), Real(bits));
  Real scratch(bits), term(bits), magnitude(bits);
  const Real abs_dt = abs(dt);
  Real power(1L, bits);  // |dt|^(i+1) after the update below
  std::vector<bool> below_prev(n, false);

  for (std::size_t i = 0;; ++i) {
    for (std::size_t s = 0; s < pairs.size(); ++s)
      cauchy_into(products[s], scratch, step.coeffs[pairs[s].first], step.coeffs[pairs[s].second], i);

    mul_into(power, power, abs_dt);
    const std::size_t next = i + 1;
    bool all_below = true;
    std::size_t worst = 0;
    Real worst_mag(0L, bits);
    for (std::size_t p = 0; p < n; ++p) {
      Real acc(0L, bits);
      for (const auto& t : plan.linear_terms(p)) {
        mul_into(term, t.coeff, step.coeffs[t.index][i]);
        add_into(acc, acc, term);
      }
      for (const auto& t : plan.quadratic_terms(p)) {
        mul_into(term, t.coeff, products[t.index]);
        add_into(acc, acc, term);
      }
      div_into(acc, acc, static_cast<unsigned long>(next));

      abs_into(magnitude, acc);
      mul_into(magnitude, magnitude, power);
      const bool below = magnitude < eps_p;
      if (!(below && below_prev[p])) all_below = false;
      below_prev[p] = below;
      if (magnitude > worst_mag) {
        worst_mag = magnitude;
        worst = p;
      }
      step.coeffs[p].push_back(std::move(acc));
    }

    if (next >= 2 && all_below) {
      step.degree = static_cast<unsigned>(next);
      return step;
    }
    if (next >= degree_cap) throw AccuracyUnreachable(degree_cap, worst);
  }
}

TaylorStep compute_coefficients(const QuadraticSystem& system, std::span<const Real> x0,
                                const Real& dt, const Real& eps_p, unsigned degree_cap) {
  return compute_coefficients(system, SeriesPlan(system), x0, Real(0L, system.precision()), dt,
                              eps_p, degree_cap);
}

State evaluate(const TaylorStep& step, const Real& t_local) {
  if (abs(t_local) > abs(step.dt))
    throw Error("evaluate: local time " + t_local.to_scientific(6) +
                " is outside the step's validity interval |s| <= " + abs(step.dt).to_scientific(6));
  State out;
  out.reserve(step.coeffs.size());
  for (const auto& c : step.coeffs) {
    Real acc = c[step.degree];
    for (std::size_t k = step.degree; k-- > 0;) {
      mul_into(acc, acc, t_local);
      add_into(acc, acc, c[k]);
    }
    out.push_back(std::move(acc));
  }
  return out;
}

}  // namespace fgbfi
