#include <doctest.h>

#include <random>

#include "fgbfi/errors.hpp"
#include "fgbfi/numerics.hpp"

using namespace fgbfi;

TEST_SUITE("numerics") {

TEST_CASE("machine epsilon at 160 bits") {
  CHECK(machine_epsilon(160).to_scientific(5) == "1.36846e-48");
  CHECK(machine_epsilon(2) == Real("0.5", 64));
  CHECK(machine_epsilon(53).to_double() == doctest::Approx(2.220446049250313e-16).epsilon(1e-15));
  CHECK_THROWS_AS(machine_epsilon(1), ConfigError);
}

TEST_CASE("machine epsilon is the smallest power of two that moves 1") {
  for (Bits b : {24, 53, 160}) {
    CAPTURE(b);
    const Real one(1L, b);
    const Real eps = machine_epsilon(b);
    CHECK(one + eps != one);
    // Half of it ties to even and is absorbed; so is anything smaller.
    CHECK(one + ldexp(eps, -1) == one);
    CHECK(one + ldexp(eps, -2) == one);
  }
}

TEST_CASE("decimal and fraction parsing") {
  CHECK(Real("0.1", 160).to_fixed(40) == "0.1000000000000000000000000000000000000000");
  CHECK(Real("-2.5e-3", 64).to_double() == -0.0025);
  const Real third("1/3", 200);
  CHECK((third * 3L - Real(1L, 200)).to_double() == doctest::Approx(0.0).epsilon(1e-59));
  CHECK(Real("8/3", 64).to_double() == doctest::Approx(8.0 / 3.0));
  CHECK_THROWS_AS(Real("abc", 64), ParseError);
  CHECK_THROWS_AS(Real("1/0", 64), ParseError);
  CHECK_THROWS_AS(Real("", 64), ParseError);
  CHECK_THROWS_AS(Real("inf", 64), ParseError);
}

TEST_CASE("arithmetic widens to the larger precision") {
  const Real a(1L, 64), b(3L, 200);
  CHECK((a / b).precision() == 200);
  CHECK((b + a).precision() == 200);
}

TEST_CASE("vector helpers") {
  const State x{Real(3L, 64), Real(-4L, 64)};
  CHECK(norm1(x) == 7L);
  CHECK(norm2(x) == 5L);
  CHECK(dot(x, x) == 25L);
  const State y{Real(0L, 64), Real(0L, 64)};
  CHECK(distance(x, y) == 5L);
  CHECK_THROWS_AS(dot(x, std::vector<Real>{Real(1L, 64)}), DimensionMismatch);
}

TEST_CASE("context validation names the violated inequality") {
  PrecisionConfig ok;
  CHECK_NOTHROW(Context{ok});
  CHECK(Context{ok}.machine_epsilon() == machine_epsilon(160));

  auto fails_with = [](PrecisionConfig c, const std::string& fragment) {
    try {
      Context ctx{c};
    } catch (const ConfigError& e) {
      return std::string(e.what()).find(fragment) != std::string::npos;
    }
    return false;
  };
  PrecisionConfig c = ok;
  c.mantissa_bits = 20;
  CHECK(fails_with(c, "mantissa_bits >= 24"));
  c = ok;
  c.mantissa_bits = 64;  // eps_m ~ 1e-19 is not 6 decades below 1e-40
  CHECK(fails_with(c, "eps_m <= eps_p * guard"));
  c = ok;
  c.series_accuracy = "1e-9";
  CHECK(fails_with(c, "eps_p < eps_R"));
  c = ok;
  c.step_margin = "0";
  CHECK(fails_with(c, "delta > 0"));
  c = ok;
  c.degree_cap = 1;
  CHECK(fails_with(c, "degree_cap >= 2"));
  c = ok;
  c.series_accuracy = "tiny";
  CHECK(fails_with(c, "not a number"));
}

TEST_CASE("context numbers carry the context width") {
  PrecisionConfig cfg;
  cfg.mantissa_bits = 96;
  cfg.series_accuracy = "1e-20";
  const Context ctx{cfg};
  CHECK(ctx.parse("0.7").precision() == 96);
  CHECK(ctx.number(3).precision() == 96);
  const std::vector<std::string> coords{"1", "2.5"};
  const State s = ctx.state(coords);
  REQUIRE(s.size() == 2);
  CHECK(s[1] == Real("2.5", 96));
}

TEST_CASE("operations are deterministic") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> d(-3, 3);
  std::vector<double> xs(50);
  for (auto& x : xs) x = d(rng);
  auto run = [&xs] {
    Real acc(0L, 160);
    for (double x : xs) {
      Real v(0L, 160);
      mpfr_set_d(v.get(), x, MPFR_RNDN);
      acc = acc * v + sqrt(abs(v)) - exp(v / 7L);
    }
    return acc;
  };
  CHECK(run() == run());
}

}  // TEST_SUITE
