#pragma once

#include <mpfr.h>

#include <compare>
#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace fgbfi {

using Bits = mpfr_prec_t;

/// Arbitrary-precision real backed by MPFR. Every operation rounds to nearest-even.
///
/// A value carries its own mantissa width; binary operators produce a result at the
/// wider of the two operand precisions. Values are not shared between threads.
class Real {
 public:
  explicit Real(Bits bits);
  Real(long value, Bits bits);
  /// Parses a decimal literal (or `p/q` fraction) correctly rounded to `bits`.
  Real(std::string_view text, Bits bits);

  Real(const Real& other);
  Real(Real&& other) noexcept;
  Real& operator=(const Real& other);
  Real& operator=(Real&& other) noexcept;
  Real& operator=(long value);
  ~Real();

  Bits precision() const noexcept { return mpfr_get_prec(value_); }
  mpfr_srcptr get() const noexcept { return value_; }
  mpfr_ptr get() noexcept { return value_; }

  double to_double() const noexcept { return mpfr_get_d(value_, MPFR_RNDN); }
  /// Fixed notation with `digits` fractional digits.
  std::string to_fixed(int digits) const;
  /// Scientific notation with `digits` digits after the point.
  std::string to_scientific(int digits) const;
  /// Shortest round-trippable scientific form at this precision.
  std::string to_string() const;

  bool is_zero() const noexcept { return mpfr_zero_p(value_) != 0; }
  bool is_finite() const noexcept { return mpfr_number_p(value_) != 0; }
  int sign() const noexcept { return mpfr_sgn(value_); }

  Real& operator+=(const Real& rhs);
  Real& operator-=(const Real& rhs);
  Real& operator*=(const Real& rhs);
  Real& operator/=(const Real& rhs);
  Real& operator*=(long rhs);
  Real& operator/=(long rhs);

  friend Real operator+(const Real& a, const Real& b);
  friend Real operator-(const Real& a, const Real& b);
  friend Real operator*(const Real& a, const Real& b);
  friend Real operator/(const Real& a, const Real& b);
  friend Real operator*(const Real& a, long b);
  friend Real operator*(long a, const Real& b) { return b * a; }
  friend Real operator/(const Real& a, long b);
  friend Real operator-(const Real& a);

  friend bool operator==(const Real& a, const Real& b) noexcept {
    return mpfr_equal_p(a.value_, b.value_) != 0;
  }
  friend std::partial_ordering operator<=>(const Real& a, const Real& b) noexcept;
  friend bool operator==(const Real& a, long b) noexcept { return mpfr_cmp_si(a.value_, b) == 0; }
  friend std::partial_ordering operator<=>(const Real& a, long b) noexcept;

 private:
  void release() noexcept;

  mpfr_t value_;
  bool live_ = false;
};

Real abs(const Real& x);
Real sqrt(const Real& x);
Real log(const Real& x);
Real exp(const Real& x);
/// x * 2^e, exact.
Real ldexp(const Real& x, long e);

// Allocation-free kernels for inner loops. `out` keeps its own precision.
inline void mul_into(Real& out, const Real& a, const Real& b) noexcept {
  mpfr_mul(out.get(), a.get(), b.get(), MPFR_RNDN);
}
inline void add_into(Real& out, const Real& a, const Real& b) noexcept {
  mpfr_add(out.get(), a.get(), b.get(), MPFR_RNDN);
}
inline void sub_into(Real& out, const Real& a, const Real& b) noexcept {
  mpfr_sub(out.get(), a.get(), b.get(), MPFR_RNDN);
}
inline void abs_into(Real& out, const Real& a) noexcept { mpfr_abs(out.get(), a.get(), MPFR_RNDN); }
inline void div_into(Real& out, const Real& a, unsigned long b) noexcept {
  mpfr_div_ui(out.get(), a.get(), b, MPFR_RNDN);
}

using State = std::vector<Real>;

/// 2^(1 - bits): the spacing of floats just above 1 at this mantissa width.
Real machine_epsilon(Bits bits);

Real dot(std::span<const Real> a, std::span<const Real> b);
Real norm1(std::span<const Real> x);
Real norm2(std::span<const Real> x);
Real distance(std::span<const Real> a, std::span<const Real> b);
std::vector<double> to_doubles(std::span<const Real> x);

/// Square, row-major matrix of reals.
class Matrix {
 public:
  Matrix(std::size_t n, const Real& fill) : n_(n), data_(n * n, fill) {}

  std::size_t size() const noexcept { return n_; }
  Real& operator()(std::size_t row, std::size_t col) { return data_[row * n_ + col]; }
  const Real& operator()(std::size_t row, std::size_t col) const { return data_[row * n_ + col]; }
  std::span<const Real> data() const noexcept { return data_; }

 private:
  std::size_t n_;
  std::vector<Real> data_;
};

struct PrecisionConfig {
  Bits mantissa_bits = 160;
  std::string series_accuracy = "1e-40";    // eps_p
  std::string round_trip_tolerance = "1e-10";  // eps_R
  std::string step_margin = "1";            // delta, 1/time
  unsigned degree_cap = 200;
  /// Required gap between machine epsilon and eps_p: eps_m <= eps_p * guard.
  std::string guard_factor = "1e-6";

  /// Canonical one-line description, used for fingerprints and headers.
  std::string describe() const;
};

/// Validated precision settings. Immutable; safe to share across threads.
class Context {
 public:
  explicit Context(PrecisionConfig config);

  const PrecisionConfig& config() const noexcept { return config_; }
  Bits bits() const noexcept { return config_.mantissa_bits; }
  unsigned degree_cap() const noexcept { return config_.degree_cap; }

  Real zero() const { return Real(0L, bits()); }
  Real number(long v) const { return Real(v, bits()); }
  Real parse(std::string_view text) const { return Real(text, bits()); }
  State state(std::span<const std::string> coords) const;
  State zeros(std::size_t n) const { return State(n, zero()); }

  const Real& machine_epsilon() const noexcept { return eps_m_; }
  const Real& series_accuracy() const noexcept { return eps_p_; }
  const Real& round_trip_tolerance() const noexcept { return eps_r_; }
  const Real& step_margin() const noexcept { return delta_; }

 private:
  PrecisionConfig config_;
  Real eps_m_;
  Real eps_p_;
  Real eps_r_;
  Real delta_;
};

}  // namespace fgbfi
