#pragma once

#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fgbfi/numerics.hpp"

namespace fgbfi {

/// Canonical quadratic ODE system  X' = A X + Phi(X),  Phi_p(X) = <Q_p X, X>.
///
/// Q_p is stored exactly as given (not symmetrized). Immutable once built; the
/// one-norm of A and mu = n * max_p ||Q_p||_1 are cached at construction.
class QuadraticSystem {
 public:
  QuadraticSystem(std::string name, Matrix a, std::vector<Matrix> q,
                  std::vector<std::string> labels = {});

  std::size_t dimension() const noexcept { return a_.size(); }
  const std::string& name() const noexcept { return name_; }
  const std::vector<std::string>& labels() const noexcept { return labels_; }
  const Matrix& linear() const noexcept { return a_; }
  const Matrix& quadratic(std::size_t p) const { return q_.at(p); }
  const std::vector<Matrix>& quadratic() const noexcept { return q_; }
  Bits precision() const noexcept { return a_(0, 0).precision(); }

  const Real& linear_norm() const noexcept { return a_norm_; }
  const Real& mu() const noexcept { return mu_; }

 private:
  std::string name_;
  Matrix a_;
  std::vector<Matrix> q_;
  std::vector<std::string> labels_;
  Real a_norm_;
  Real mu_;
};

/// A X + Phi(X).
State evaluate_rhs(const QuadraticSystem& system, std::span<const Real> x);

/// Maximum absolute column sum.
Real one_norm(const Matrix& m);

/// n * max_p ||Q_p||_1.
Real mu(const QuadraticSystem& system);

/// Trace of the Jacobian of A X + Phi(X) at x.
Real jacobian_trace(const QuadraticSystem& system, std::span<const Real> x);

/// 2n-dimensional system whose trailing n coordinates obey the variational
/// equation z' = J(x) z of the original system.
QuadraticSystem extend_with_variational(const QuadraticSystem& system);

QuadraticSystem tumor_system(const Context& ctx, const Real& normal, const Real& host,
                             const Real& immune);
QuadraticSystem lorenz_system(const Context& ctx, const Real& sigma, const Real& r,
                              const Real& b);

/// Named scalar model parameters as decimal strings, substituted at load time.
using ModelParameters = std::map<std::string, std::string>;

/// Parses "N=5,H=3,I=0.7".
ModelParameters parse_parameters(std::string_view text);

/// Catalog lookup ("tumor", "lorenz"). Missing parameters take the model defaults.
QuadraticSystem catalog_system(const Context& ctx, std::string_view model,
                               const ModelParameters& params);

/// Parses a YAML system definition: name, dimension, A (n*n row-major entries),
/// Q (n lists of n*n entries) and optional labels. Entries are read as exact
/// decimal strings (or p/q fractions) directly into the context.
QuadraticSystem load_system(const Context& ctx, std::string_view definition);
QuadraticSystem load_system_file(const Context& ctx, const std::filesystem::path& path);

}  // namespace fgbfi
