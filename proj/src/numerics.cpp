#include "fgbfi/numerics.hpp"

#include <algorithm>
#include <cstring>
#include <memory>

#include "fgbfi/errors.hpp"

namespace fgbfi {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

// Parses a plain decimal literal into `out`; false unless the whole string is consumed.
bool parse_decimal(mpfr_ptr out, std::string_view text) {
  const std::string buf(text);
  if (buf.empty()) return false;
  char* end = nullptr;
  mpfr_strtofr(out, buf.c_str(), &end, 10, MPFR_RNDN);
  return end == buf.c_str() + buf.size() && mpfr_number_p(out);
}

struct FreeString {
  void operator()(char* p) const noexcept { mpfr_free_str(p); }
};

std::string printf_real(const char* fmt, int digits, mpfr_srcptr x) {
  char* raw = nullptr;
  if (mpfr_asprintf(&raw, fmt, digits, x) < 0) return "nan";
  std::string s(raw);
  mpfr_free_str(raw);
  return s;
}

Bits wider(const Real& a, const Real& b) { return std::max(a.precision(), b.precision()); }

}  // namespace

Real::Real(Bits bits) : live_(true) {
  mpfr_init2(value_, bits);
  mpfr_set_zero(value_, 1);
}

Real::Real(long value, Bits bits) : live_(true) {
  mpfr_init2(value_, bits);
  mpfr_set_si(value_, value, MPFR_RNDN);
}

Real::Real(std::string_view text, Bits bits) : live_(true) {
  mpfr_init2(value_, bits);
  const auto s = trim(text);
  const auto slash = s.find('/');
  if (slash == std::string_view::npos) {
    if (!parse_decimal(value_, s)) {
      mpfr_clear(value_);
      live_ = false;
      throw ParseError("not a finite decimal number: '" + std::string(text) + "'");
    }
    return;
  }
  // p/q: both parts are exact decimals at a generous working width, divided once.
  const Bits work = bits + 64;
  Real num(work), den(work);
  if (!parse_decimal(num.get(), trim(s.substr(0, slash))) ||
      !parse_decimal(den.get(), trim(s.substr(slash + 1))) || den.is_zero()) {
    mpfr_clear(value_);
    live_ = false;
    throw ParseError("not a valid fraction: '" + std::string(text) + "'");
  }
  mpfr_div(value_, num.get(), den.get(), MPFR_RNDN);
}

Real::Real(const Real& other) : live_(true) {
  mpfr_init2(value_, other.precision());
  mpfr_set(value_, other.value_, MPFR_RNDN);
}

Real::Real(Real&& other) noexcept : live_(other.live_) {
  std::memcpy(value_, other.value_, sizeof(mpfr_t));
  other.live_ = false;
}

Real& Real::operator=(const Real& other) {
  if (this == &other) return *this;
  if (!live_) {
    mpfr_init2(value_, other.precision());
    live_ = true;
  } else if (precision() != other.precision()) {
    mpfr_set_prec(value_, other.precision());
  }
  mpfr_set(value_, other.value_, MPFR_RNDN);
  return *this;
}

Real& Real::operator=(Real&& other) noexcept {
  if (this == &other) return *this;
  if (live_ && other.live_) {
    mpfr_swap(value_, other.value_);
  } else {
    release();
    std::memcpy(value_, other.value_, sizeof(mpfr_t));
    live_ = other.live_;
    other.live_ = false;
  }
  return *this;
}

Real& Real::operator=(long value) {
  if (!live_) {
    mpfr_init2(value_, 64);
    live_ = true;
  }
  mpfr_set_si(value_, value, MPFR_RNDN);
  return *this;
}

Real::~Real() { release(); }

void Real::release() noexcept {
  if (live_) mpfr_clear(value_);
  live_ = false;
}

std::string Real::to_fixed(int digits) const { return printf_real("%.*RNf", digits, value_); }

std::string Real::to_scientific(int digits) const {
  return printf_real("%.*RNe", digits, value_);
}

std::string Real::to_string() const {
  if (is_zero()) return "0";
  if (!is_finite()) return mpfr_nan_p(value_) ? "nan" : (sign() > 0 ? "inf" : "-inf");
  mpfr_exp_t exp10 = 0;
  std::unique_ptr<char, FreeString> digits(mpfr_get_str(nullptr, &exp10, 10, 0, value_, MPFR_RNDN));
  std::string d(digits.get());
  std::string sign;
  if (d.front() == '-') {
    sign = "-";
    d.erase(0, 1);
  }
  while (d.size() > 1 && d.back() == '0') d.pop_back();
  std::string out = sign + d.substr(0, 1);
  if (d.size() > 1) out += "." + d.substr(1);
  return out + "e" + std::to_string(static_cast<long>(exp10) - 1);
}

Real& Real::operator+=(const Real& rhs) {
  if (rhs.precision() > precision()) mpfr_prec_round(value_, rhs.precision(), MPFR_RNDN);
  mpfr_add(value_, value_, rhs.value_, MPFR_RNDN);
  return *this;
}
Real& Real::operator-=(const Real& rhs) {
  if (rhs.precision() > precision()) mpfr_prec_round(value_, rhs.precision(), MPFR_RNDN);
  mpfr_sub(value_, value_, rhs.value_, MPFR_RNDN);
  return *this;
}
Real& Real::operator*=(const Real& rhs) {
  if (rhs.precision() > precision()) mpfr_prec_round(value_, rhs.precision(), MPFR_RNDN);
  mpfr_mul(value_, value_, rhs.value_, MPFR_RNDN);
  return *this;
}
Real& Real::operator/=(const Real& rhs) {
  if (rhs.precision() > precision()) mpfr_prec_round(value_, rhs.precision(), MPFR_RNDN);
  mpfr_div(value_, value_, rhs.value_, MPFR_RNDN);
  return *this;
}
Real& Real::operator*=(long rhs) {
  mpfr_mul_si(value_, value_, rhs, MPFR_RNDN);
  return *this;
}
Real& Real::operator/=(long rhs) {
  mpfr_div_si(value_, value_, rhs, MPFR_RNDN);
  return *this;
}

Real operator+(const Real& a, const Real& b) {
  Real r(wider(a, b));
  mpfr_add(r.value_, a.value_, b.value_, MPFR_RNDN);
  return r;
}
Real operator-(const Real& a, const Real& b) {
  Real r(wider(a, b));
  mpfr_sub(r.value_, a.value_, b.value_, MPFR_RNDN);
  return r;
}
Real operator*(const Real& a, const Real& b) {
  Real r(wider(a, b));
  mpfr_mul(r.value_, a.value_, b.value_, MPFR_RNDN);
  return r;
}
Real operator/(const Real& a, const Real& b) {
  Real r(wider(a, b));
  mpfr_div(r.value_, a.value_, b.value_, MPFR_RNDN);
  return r;
}
Real operator*(const Real& a, long b) {
  Real r(a.precision());
  mpfr_mul_si(r.value_, a.value_, b, MPFR_RNDN);
  return r;
}
Real operator/(const Real& a, long b) {
  Real r(a.precision());
  mpfr_div_si(r.value_, a.value_, b, MPFR_RNDN);
  return r;
}
Real operator-(const Real& a) {
  Real r(a.precision());
  mpfr_neg(r.value_, a.value_, MPFR_RNDN);
  return r;
}

std::partial_ordering operator<=>(const Real& a, const Real& b) noexcept {
  if (mpfr_unordered_p(a.value_, b.value_)) return std::partial_ordering::unordered;
  const int c = mpfr_cmp(a.value_, b.value_);
  return c < 0 ? std::partial_ordering::less
               : (c > 0 ? std::partial_ordering::greater : std::partial_ordering::equivalent);
}

std::partial_ordering operator<=>(const Real& a, long b) noexcept {
  if (mpfr_nan_p(a.value_)) return std::partial_ordering::unordered;
  const int c = mpfr_cmp_si(a.value_, b);
  return c < 0 ? std::partial_ordering::less
               : (c > 0 ? std::partial_ordering::greater : std::partial_ordering::equivalent);
}

Real abs(const Real& x) {
  Real r(x.precision());
  mpfr_abs(r.get(), x.get(), MPFR_RNDN);
  return r;
}
Real sqrt(const Real& x) {
  Real r(x.precision());
  mpfr_sqrt(r.get(), x.get(), MPFR_RNDN);
  return r;
}
Real log(const Real& x) {
  Real r(x.precision());
  mpfr_log(r.get(), x.get(), MPFR_RNDN);
  return r;
}
Real exp(const Real& x) {
  Real r(x.precision());
  mpfr_exp(r.get(), x.get(), MPFR_RNDN);
  return r;
}
Real ldexp(const Real& x, long e) {
  Real r(x.precision());
  mpfr_mul_2si(r.get(), x.get(), e, MPFR_RNDN);
  return r;
}

Real machine_epsilon(Bits bits) {
  if (bits < 2) throw ConfigError("mantissa bits must be >= 2, got " + std::to_string(bits));
  return ldexp(Real(1L, bits), 1 - static_cast<long>(bits));
}

Real dot(std::span<const Real> a, std::span<const Real> b) {
  if (a.size() != b.size()) throw DimensionMismatch(a.size(), b.size());
  if (a.empty()) return Real(53);
  Real acc = a[0] * b[0];
  Real term(acc.precision());
  for (std::size_t i = 1; i < a.size(); ++i) {
    mul_into(term, a[i], b[i]);
    acc += term;
  }
  return acc;
}

Real norm1(std::span<const Real> x) {
  if (x.empty()) return Real(53);
  Real acc = abs(x[0]);
  for (std::size_t i = 1; i < x.size(); ++i) {
    if (x[i].sign() < 0)
      mpfr_sub(acc.get(), acc.get(), x[i].get(), MPFR_RNDN);
    else
      mpfr_add(acc.get(), acc.get(), x[i].get(), MPFR_RNDN);
  }
  return acc;
}

Real norm2(std::span<const Real> x) { return sqrt(dot(x, x)); }

Real distance(std::span<const Real> a, std::span<const Real> b) {
  if (a.size() != b.size()) throw DimensionMismatch(a.size(), b.size());
  if (a.empty()) return Real(53);
  Real acc(std::max(a[0].precision(), b[0].precision()));
  Real diff(acc.precision());
  for (std::size_t i = 0; i < a.size(); ++i) {
    sub_into(diff, a[i], b[i]);
    mpfr_sqr(diff.get(), diff.get(), MPFR_RNDN);
    acc += diff;
  }
  return sqrt(acc);
}

std::vector<double> to_doubles(std::span<const Real> x) {
  std::vector<double> out;
  out.reserve(x.size());
  for (const auto& v : x) out.push_back(v.to_double());
  return out;
}

std::string PrecisionConfig::describe() const {
  return "bits=" + std::to_string(mantissa_bits) + " eps_p=" + series_accuracy +
         " eps_R=" + round_trip_tolerance + " delta=" + step_margin +
         " degree_cap=" + std::to_string(degree_cap) + " guard=" + guard_factor;
}

namespace {

Real parse_setting(std::string_view value, std::string_view name, Bits bits) {
  try {
    return Real(value, bits);
  } catch (const ParseError&) {
    throw ConfigError(std::string(name) + " is not a number: '" + std::string(value) + "'");
  }
}

}  // namespace

Context::Context(PrecisionConfig config)
    : config_(std::move(config)),
      eps_m_(2L, 53),
      eps_p_(53),
      eps_r_(53),
      delta_(53) {
  const Bits b = config_.mantissa_bits;
  if (b < 24) throw ConfigError("mantissa_bits >= 24 violated: got " + std::to_string(b));
  eps_m_ = fgbfi::machine_epsilon(b);
  eps_p_ = parse_setting(config_.series_accuracy, "series_accuracy", b);
  eps_r_ = parse_setting(config_.round_trip_tolerance, "round_trip_tolerance", b);
  delta_ = parse_setting(config_.step_margin, "step_margin", b);
  const Real guard = parse_setting(config_.guard_factor, "guard_factor", b);

  if (!(eps_p_ > 0L)) throw ConfigError("eps_p > 0 violated: eps_p = " + config_.series_accuracy);
  if (!(guard > 0L)) throw ConfigError("guard factor > 0 violated");
  if (!(eps_m_ <= eps_p_ * guard))
    throw ConfigError("eps_m <= eps_p * guard violated: eps_m = " + eps_m_.to_scientific(5) +
                      ", eps_p * guard = " + (eps_p_ * guard).to_scientific(5) +
                      " (increase mantissa bits or eps_p)");
  if (!(eps_p_ < eps_r_))
    throw ConfigError("eps_p < eps_R violated: eps_p = " + config_.series_accuracy +
                      ", eps_R = " + config_.round_trip_tolerance);
  if (!(delta_ > 0L)) throw ConfigError("delta > 0 violated: delta = " + config_.step_margin);
  if (config_.degree_cap < 2)
    throw ConfigError("degree_cap >= 2 violated: got " + std::to_string(config_.degree_cap));
}

State Context::state(std::span<const std::string> coords) const {
  State s;
  s.reserve(coords.size());
  for (const auto& c : coords) s.push_back(parse(c));
  return s;
}

}  // namespace fgbfi
