#include <doctest.h>

#include <cmath>

#include "fgbfi/analysis.hpp"
#include "fgbfi/errors.hpp"

using namespace fgbfi;

namespace {

struct ReferenceReturns {
  Context ctx{PrecisionConfig{}};
  QuadraticSystem sys = tumor_system(ctx, ctx.parse("5"), ctx.parse("3"), ctx.parse("0.7"));
  State x0 = ctx.state(std::vector<std::string>{"0.1450756817", "0.8395885828", "9.954786333"});
  Trajectory traj = construct_trajectory(sys, x0, ctx.parse("27.327"), Direction::forward,
                                         estimate_ball(sys, x0, 27.327), ctx);
  std::vector<DistanceSample> series = distance_series(traj, ctx.parse("0.001"));
};

const ReferenceReturns& reference() {
  static const ReferenceReturns t;
  return t;
}

DistanceSample sample(double t, double rho) {
  Real tt(53), rr(53);
  mpfr_set_d(tt.get(), t, MPFR_RNDN);
  mpfr_set_d(rr.get(), rho, MPFR_RNDN);
  return {tt, {}, rr};
}

}  // namespace

TEST_SUITE("analysis") {

TEST_CASE("distance series on the I=0.7 reference run") {
  const auto& s = reference().series;
  CHECK(s.front().rho.is_zero());
  CHECK(s[21778].time == reference().ctx.parse("21.778"));
  CHECK(s[21778].rho.to_fixed(6) == "0.007668");
  CHECK(s[10889].rho.to_fixed(6) == "0.006117");

  // rho moves no faster than the largest sampled speed allows.
  double vmax = 0;
  for (std::size_t i = 0; i < s.size(); i += 50)
    vmax = std::max(vmax, norm2(evaluate_rhs(reference().sys, s[i].state)).to_double());
  for (std::size_t i = 1; i < s.size(); ++i)
    REQUIRE(std::fabs((s[i].rho - s[i - 1].rho).to_double()) <= 0.001 * vmax * 1.5);
}

TEST_CASE("return events on the I=0.7 reference run") {
  const auto events = find_returns(reference().series, 5);
  REQUIRE(events.size() == 6);
  const double expected[] = {0, 5.553, 10.889, 16.439, 21.778, 27.327};
  for (std::size_t k = 0; k < 6; ++k) {
    CHECK(events[k].index == k);
    CHECK(std::fabs(events[k].time.to_double() - expected[k]) <= 0.002 + 1e-9);
  }
  const auto spacing = even_return_spacing(events);
  REQUIRE(spacing);
  CHECK(*spacing == doctest::Approx(10.89).epsilon(0.001));

  for (std::size_t w : {3, 10}) {
    const auto other = find_returns(reference().series, w);
    REQUIRE(other.size() == events.size());
    for (std::size_t k = 0; k < events.size(); ++k) CHECK(other[k].time == events[k].time);
  }
}

TEST_CASE("return detection on synthetic series") {
  std::vector<DistanceSample> mono;
  for (int i = 0; i < 20; ++i) mono.push_back(sample(i * 0.1, i * 0.5));
  CHECK(find_returns(mono, 5).size() == 1);

  std::vector<DistanceSample> flat;
  for (int i = 0; i < 20; ++i) flat.push_back(sample(i * 0.1, 0.0));
  CHECK(find_returns(flat, 3).size() == 1);  // plateaus are not strict minima

  std::vector<DistanceSample> dip;
  for (int i = 0; i < 21; ++i) dip.push_back(sample(i, std::fabs(i - 10.0) + 1));
  const auto events = find_returns(dip, 2);
  REQUIRE(events.size() == 2);
  CHECK(events[1].time == Real(10L, 53));
  CHECK_FALSE(even_return_spacing(events));
  CHECK_THROWS_AS(find_returns(dip, 0), ConfigError);
  CHECK(find_returns(std::vector<DistanceSample>{}, 3).empty());
}

TEST_CASE("equilibrium gives a flat distance") {
  const Context ctx{PrecisionConfig{}};
  const auto sys = tumor_system(ctx, ctx.parse("5"), ctx.parse("3"), ctx.parse("0.7"));
  const State zero = ctx.zeros(3);
  const BoundingBall ball{zero, ctx.number(1)};
  const auto traj = construct_trajectory(sys, zero, ctx.number(2), Direction::forward, ball, ctx);
  const auto series = distance_series(traj, ctx.parse("0.1"));
  for (const auto& s : series) CHECK(s.rho.is_zero());
  CHECK(find_returns(series, 5).size() == 1);
}

TEST_CASE("RK4 on a linear system is the quartic Taylor polynomial") {
  const Context ctx{PrecisionConfig{}};
  Matrix a(2, ctx.zero());
  a(0, 0) = ctx.parse("-0.5");
  a(0, 1) = ctx.number(2);
  a(1, 0) = ctx.number(-1);
  a(1, 1) = ctx.parse("0.25");
  const QuadraticSystem lin("lin", a, std::vector<Matrix>(2, Matrix(2, ctx.zero())));
  const State x0{ctx.number(1), ctx.parse("-0.5")};
  const Real h = ctx.parse("0.1");
  const State got = rk4_integrate(lin, x0, h, h);

  // sum_{k<=4} (hA)^k x0 / k!
  auto apply = [&](const State& v) {
    return State{(a(0, 0) * v[0] + a(0, 1) * v[1]) * h, (a(1, 0) * v[0] + a(1, 1) * v[1]) * h};
  };
  State term = x0, want = x0;
  for (long k = 1; k <= 4; ++k) {
    term = apply(term);
    for (auto& c : term) c /= k;
    want[0] += term[0];
    want[1] += term[1];
  }
  for (int p = 0; p < 2; ++p) CHECK(abs(got[p] - want[p]) < ctx.parse("1e-45"));
}

TEST_CASE("RK4 step bookkeeping") {
  const Context ctx{PrecisionConfig{}};
  const auto sys = tumor_system(ctx, ctx.parse("5"), ctx.parse("3"), ctx.parse("0.4"));
  const State x0 = ctx.state(std::vector<std::string>{"1.292927957", "0.5183621413", "1.168939477"});
  const Real T = ctx.parse("0.3");
  // 0.3 / 0.1 is 3 up to decimal rounding: three steps, not three plus a sliver.
  const State three = rk4_integrate(sys, x0, ctx.parse("0.1"), T);
  CHECK(abs(three[0] - rk4_integrate(sys, rk4_integrate(sys, x0, ctx.parse("0.1"), ctx.parse("0.2")),
                                     ctx.parse("0.1"), ctx.parse("0.1"))[0]) < ctx.parse("1e-40"));
  // A step that does not divide T ends with a shortened step, landing at T.
  const State partial = rk4_integrate(sys, x0, ctx.parse("0.07"), T);
  const State reference = rk4_integrate(sys, x0, ctx.parse("0.001"), T);
  CHECK(distance(partial, reference).to_double() < 1e-3);
  // One step spanning the whole interval.
  const State single = rk4_integrate(sys, x0, T, T);
  CHECK(distance(single, reference).to_double() < 1e-1);
  CHECK(rk4_integrate(sys, x0, T, ctx.zero()) == x0);
  CHECK_THROWS_AS(rk4_integrate(sys, x0, ctx.zero(), T), ConfigError);
  CHECK_THROWS_AS(rk4_integrate(sys, x0, -T, T), ConfigError);
}

TEST_CASE("RK4 against the power-series endpoint") {
  PrecisionConfig cfg;
  cfg.mantissa_bits = 96;
  cfg.series_accuracy = "1e-20";
  const Context ctx{cfg};
  const auto sys = tumor_system(ctx, ctx.parse("5"), ctx.parse("3"), ctx.parse("0.4"));
  const State x0 = ctx.state(std::vector<std::string>{"1.292927957", "0.5183621413", "1.168939477"});
  const Real T = ctx.parse("30");
  const auto ref = construct_trajectory(sys, x0, T, Direction::forward, estimate_ball(sys, x0, 30), ctx,
                                        {false, {}});
  const char* steps[] = {"0.05", "0.01", "0.005", "0.001"};
  const double reference[] = {0.0387658, 4.06488e-5, 2.40695e-6, 3.68753e-9};
  std::vector<double> hs, errs;
  for (int i = 0; i < 4; ++i) {
    const auto cmp = rk4_error(sys, x0, ctx.parse(steps[i]), T, ref);
    CHECK(cmp.error == distance(cmp.rk4_endpoint, cmp.reference_endpoint));
    CHECK(cmp.error.to_double() == doctest::Approx(reference[i]).epsilon(0.005));
    hs.push_back(cmp.step.to_double());
    errs.push_back(cmp.error.to_double());
  }
  const double order = convergence_order(hs, errs);
  CHECK(order >= 3.5);
  CHECK(order <= 4.5);

  const auto shorter = construct_trajectory(sys, x0, ctx.number(1), Direction::forward,
                                            estimate_ball(sys, x0, 30), ctx, {false, {}});
  CHECK_THROWS_AS(rk4_error(sys, x0, ctx.parse("0.01"), T, shorter), ConfigError);
}

TEST_CASE("convergence order fit") {
  const std::vector<double> h{0.1, 0.05, 0.025};
  const std::vector<double> e{1e-4, 6.25e-6, 3.90625e-7};
  CHECK(convergence_order(h, e) == doctest::Approx(4.0));
  CHECK_THROWS_AS(convergence_order(std::vector<double>{0.1}, std::vector<double>{1.0}), ConfigError);
}

}  // TEST_SUITE
