#include "fgbfi/quadsys.hpp"

#include <algorithm>

#include "fgbfi/errors.hpp"

namespace fgbfi {

QuadraticSystem::QuadraticSystem(std::string name, Matrix a, std::vector<Matrix> q,
                                 std::vector<std::string> labels)
    : name_(std::move(name)),
      a_(std::move(a)),
      q_(std::move(q)),
      labels_(std::move(labels)),
      a_norm_(53),
      mu_(53) {
  const std::size_t n = a_.size();
  if (n == 0) throw ConfigError("system dimension must be positive");
  if (q_.size() != n)
    throw ConfigError("system '" + name_ + "' needs " + std::to_string(n) +
                      " quadratic matrices, got " + std::to_string(q_.size()));
  for (std::size_t p = 0; p < n; ++p)
    if (q_[p].size() != n)
      throw ConfigError("Q" + std::to_string(p + 1) + " is " + std::to_string(q_[p].size()) +
                        "x" + std::to_string(q_[p].size()) + ", expected " + std::to_string(n) +
                        "x" + std::to_string(n));
  for (const auto& v : a_.data())
    if (!v.is_finite()) throw ConfigError("non-finite entry in A of '" + name_ + "'");
  for (const auto& m : q_)
    for (const auto& v : m.data())
      if (!v.is_finite()) throw ConfigError("non-finite entry in Q of '" + name_ + "'");

  if (labels_.empty())
    for (std::size_t p = 0; p < n; ++p) labels_.push_back("x" + std::to_string(p + 1));
  if (labels_.size() != n)
    throw ConfigError("expected " + std::to_string(n) + " labels, got " +
                      std::to_string(labels_.size()));

  a_norm_ = one_norm(a_);
  mu_ = fgbfi::mu(*this);
}

State evaluate_rhs(const QuadraticSystem& system, std::span<const Real> x) {
  const std::size_t n = system.dimension();
  if (x.size() != n) throw DimensionMismatch(n, x.size());
  const Bits bits = system.precision();
  State out(n, Real(bits));
  Real qx(bits), term(bits);
  for (std::size_t p = 0; p < n; ++p) {
    Real& acc = out[p];
    for (std::size_t q = 0; q < n; ++q) {
      mul_into(term, system.linear()(p, q), x[q]);
      acc += term;
    }
    const Matrix& qp = system.quadratic(p);
    for (std::size_t u = 0; u < n; ++u) {
      qx = 0L;
      for (std::size_t v = 0; v < n; ++v) {
        mul_into(term, qp(u, v), x[v]);
        qx += term;
      }
      mul_into(term, qx, x[u]);
      acc += term;
    }
  }
  return out;
}

Real one_norm(const Matrix& m) {
  const std::size_t n = m.size();
  Real best(0L, n ? m(0, 0).precision() : 53);
  for (std::size_t c = 0; c < n; ++c) {
    Real col(best.precision());
    for (std::size_t r = 0; r < n; ++r) col += abs(m(r, c));
    if (col > best) best = col;
  }
  return best;
}

Real mu(const QuadraticSystem& system) {
  Real best(0L, system.precision());
  for (const auto& q : system.quadratic()) {
    Real norm = one_norm(q);
    if (norm > best) best = std::move(norm);
  }
  return best * static_cast<long>(system.dimension());
}

Real jacobian_trace(const QuadraticSystem& system, std::span<const Real> x) {
  const std::size_t n = system.dimension();
  if (x.size() != n) throw DimensionMismatch(n, x.size());
  Real tr(0L, system.precision());
  for (std::size_t p = 0; p < n; ++p) {
    tr += system.linear()(p, p);
    const Matrix& q = system.quadratic(p);
    for (std::size_t v = 0; v < n; ++v) tr += (q(p, v) + q(v, p)) * x[v];
  }
  return tr;
}

QuadraticSystem extend_with_variational(const QuadraticSystem& system) {
  const std::size_t n = system.dimension();
  const Real zero(0L, system.precision());
  Matrix a(2 * n, zero);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < n; ++c) {
      a(r, c) = system.linear()(r, c);
      a(n + r, n + c) = system.linear()(r, c);
    }

  std::vector<Matrix> q(2 * n, Matrix(2 * n, zero));
  for (std::size_t p = 0; p < n; ++p) {
    const Matrix& src = system.quadratic(p);
    for (std::size_t u = 0; u < n; ++u)
      for (std::size_t v = 0; v < n; ++v) {
        q[p](u, v) = src(u, v);
        // d(phi_p)/dx_u = sum_v (Q_uv + Q_vu) x_v, applied to the perturbation z_v.
        q[n + p](u, n + v) = src(u, v) + src(v, u);
      }
  }

  std::vector<std::string> labels = system.labels();
  for (std::size_t p = 0; p < n; ++p) labels.push_back("d" + system.labels()[p]);
  return QuadraticSystem(system.name() + "+variational", std::move(a), std::move(q),
                         std::move(labels));
}

QuadraticSystem tumor_system(const Context& ctx, const Real& normal, const Real& host,
                             const Real& immune) {
  if (!normal.is_finite() || !host.is_finite() || !immune.is_finite())
    throw ConfigError("tumor parameters must be finite");
  const Real zero = ctx.zero();
  const auto c = [&](std::string_view s) { return ctx.parse(s); };

  Matrix a(3, zero);
  a(0, 0) = normal * 2L;
  a(1, 1) = ctx.number(4) - immune;
  a(2, 2) = -immune;

  const Real half_host = c("0.5") * host;
  std::vector<Matrix> q(3, Matrix(3, zero));
  q[0](0, 0) = ctx.number(-1);
  q[0](0, 2) = -host;

  q[1](0, 0) = c("0.5");
  q[1](1, 1) = c("-0.14");
  q[1](1, 2) = -half_host;
  q[1](2, 2) = c("0.001");

  q[2](1, 1) = c("0.07");
  q[2](1, 2) = half_host;
  q[2](2, 2) = c("-0.002");

  return QuadraticSystem("tumor", std::move(a), std::move(q), {"x1", "x2", "x3"});
}

QuadraticSystem lorenz_system(const Context& ctx, const Real& sigma, const Real& r,
                              const Real& b) {
  const Real zero = ctx.zero();
  Matrix a(3, zero);
  a(0, 0) = -sigma;
  a(0, 1) = sigma;
  a(1, 0) = r;
  a(1, 1) = ctx.number(-1);
  a(2, 2) = -b;

  std::vector<Matrix> q(3, Matrix(3, zero));
  q[1](0, 2) = ctx.number(-1);  // -x1 x3
  q[2](0, 1) = ctx.number(1);   //  x1 x2
  return QuadraticSystem("lorenz", std::move(a), std::move(q), {"x", "y", "z"});
}

ModelParameters parse_parameters(std::string_view text) {
  ModelParameters out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto comma = std::min(text.find(',', pos), text.size());
    const auto item = text.substr(pos, comma - pos);
    pos = comma + 1;
    if (item.find_first_not_of(" \t") == std::string_view::npos) {
      if (comma >= text.size()) break;
      continue;
    }
    const auto eq = item.find('=');
    if (eq == std::string_view::npos)
      throw ParseError("expected name=value, got '" + std::string(item) + "'", 0, "parameters");
    auto strip = [](std::string_view s) {
      const auto f = s.find_first_not_of(" \t");
      const auto l = s.find_last_not_of(" \t");
      return f == std::string_view::npos ? std::string{} : std::string(s.substr(f, l - f + 1));
    };
    out[strip(item.substr(0, eq))] = strip(item.substr(eq + 1));
    if (comma >= text.size()) break;
  }
  return out;
}

namespace {

Real param(const Context& ctx, const ModelParameters& params, const std::string& key,
           std::string_view fallback) {
  const auto it = params.find(key);
  const std::string text = it == params.end() ? std::string(fallback) : it->second;
  try {
    return ctx.parse(text);
  } catch (const ParseError&) {
    throw ParseError("not a number: '" + text + "'", 0, "parameter " + key);
  }
}

void reject_unknown(const ModelParameters& params, std::initializer_list<std::string_view> known,
                    std::string_view model) {
  for (const auto& [key, value] : params)
    if (std::find(known.begin(), known.end(), key) == known.end())
      throw ConfigError("unknown parameter '" + key + "' for model " + std::string(model));
}

}  // namespace

QuadraticSystem catalog_system(const Context& ctx, std::string_view model,
                               const ModelParameters& params) {
  if (model == "tumor") {
    reject_unknown(params, {"N", "H", "I"}, model);
    const Real n = param(ctx, params, "N", "5");
    const Real h = param(ctx, params, "H", "3");
    const Real i = param(ctx, params, "I", "0.7");
    if (!(i >= 0L) || !(h > 1L) || !(n > 0L))
      throw ConfigError("tumor model requires I >= 0, H > 1, N > 0");
    return tumor_system(ctx, n, h, i);
  }
  if (model == "lorenz") {
    reject_unknown(params, {"sigma", "r", "b"}, model);
    return lorenz_system(ctx, param(ctx, params, "sigma", "10"), param(ctx, params, "r", "28"),
                         param(ctx, params, "b", "8/3"));
  }
  throw ConfigError("unknown model '" + std::string(model) + "' (available: tumor, lorenz)");
}

}  // namespace fgbfi
