#include <doctest.h>

#include "fgbfi/errors.hpp"
#include "fgbfi/trajectory.hpp"

using namespace fgbfi;

namespace {

const Context& ctx160() {
  static const Context ctx{PrecisionConfig{}};
  return ctx;
}

State parse_state(const Context& c, std::vector<std::string> s) { return c.state(s); }

struct Reference {
  Context ctx{PrecisionConfig{}};
  QuadraticSystem sys = tumor_system(ctx, ctx.parse("5"), ctx.parse("3"), ctx.parse("0.7"));
  State x0 = parse_state(ctx, {"0.1450756817", "0.8395885828", "9.954786333"});
  Real T = ctx.parse("27.327");
  BoundingBall ball = estimate_ball(sys, x0, 27.327);
};

// One shared forward run; building it takes about a second.
const Trajectory& reference_run() {
  static const Trajectory traj = [] {
    Reference t;
    return construct_trajectory(t.sys, t.x0, t.T, Direction::forward, t.ball, t.ctx);
  }();
  return traj;
}

bool matches(const State& got, const State& want, const char* tol) {
  for (std::size_t i = 0; i < got.size(); ++i)
    if (abs(got[i] - want[i]) > Real(tol, 160)) return false;
  return true;
}

}  // namespace

TEST_SUITE("fgbfi") {

TEST_CASE("ball containment is closed") {
  const Context& c = ctx160();
  const BoundingBall ball{parse_state(c, {"1", "2"}), c.parse("3")};
  CHECK(ball_contains(ball, ball.center));
  CHECK_FALSE(ball_contains(ball, parse_state(c, {"5", "2"})));
  CHECK(ball_contains(ball, parse_state(c, {"4", "2"})));
  CHECK(ball_contains(ball, parse_state(c, {"1", "-1"})));
  // Extra coordinates beyond the center's dimension are ignored.
  CHECK(ball_contains(ball, parse_state(c, {"1", "2", "1000"})));
}

TEST_CASE("backward ball estimate") {
  Reference t;
  const State end = parse_state(t.ctx, {"0.118689978", "0.7111230373", "9.6323947777"});
  const auto ball = estimate_ball(t.sys, end, 1.0, Direction::backward);
  CHECK(ball_contains(ball, end));
  CHECK_NOTHROW(construct_trajectory(t.sys, end, t.ctx.number(1), Direction::backward, ball, t.ctx,
                                     {false, {}}));
  // x' = -x grows like e^t backward and overflows a double long before t = -1000;
  // the fallback ball is then centered on the start.
  Matrix a(1, t.ctx.number(-1));
  const QuadraticSystem decay("decay", a, {Matrix(1, t.ctx.zero())});
  const State x0{t.ctx.number(3)};
  const auto fallback = estimate_ball(decay, x0, 1000.0, Direction::backward);
  CHECK(fallback.center == x0);
  CHECK(fallback.radius == 30L);
}

TEST_CASE("I=0.7 reference forward run") {
  const Trajectory& traj = reference_run();
  const Context& c = ctx160();
  CHECK(matches(traj.endpoint, parse_state(c, {"0.118689978", "0.7111230373", "9.6323947777"}),
                "1e-9"));
  CHECK(traj.stats.step_count == traj.steps.size());
  CHECK(traj.stats.min_degree >= 2);
  CHECK(traj.stats.max_degree < 200);

  const auto samples = dense_sample(traj, c.parse("0.001"));
  CHECK(samples.size() == 27328);
  const Sample& s = samples[10889];
  CHECK(s.time == c.parse("10.889"));
  CHECK(s.state[0].to_fixed(10) == "0.1434845476");
  CHECK(s.state[1].to_fixed(10) == "0.8337896719");
  CHECK(s.state[2].to_fixed(9) == "9.953662472");
  CHECK(samples.back().time == c.parse("27.327"));
  CHECK(samples.back().state == traj.endpoint);
}

TEST_CASE("steps tile [0, T] exactly and chain continuously") {
  const Trajectory& traj = reference_run();
  Real sum = ctx160().zero();
  for (const auto& s : traj.steps) {
    CHECK(s.t_start == sum);
    sum += abs(s.dt);
  }
  CHECK(sum == traj.total_time);
  for (std::size_t i = 0; i + 1 < traj.steps.size(); i += 97) {
    const State end = evaluate(traj.steps[i], traj.steps[i].dt);
    for (std::size_t p = 0; p < 3; ++p) CHECK(end[p] == traj.steps[i + 1].coeffs[p][0]);
  }
  // Each step respects its guaranteed radius.
  for (std::size_t i = 0; i < traj.steps.size(); i += 101) {
    State x0;
    for (const auto& row : traj.steps[i].coeffs) x0.push_back(row[0]);
    Reference t;
    CHECK(abs(traj.steps[i].dt) <= step_size(t.sys, x0, t.ctx.step_margin()).dt_max);
  }
}

TEST_CASE("dense sampling edge cases") {
  const Trajectory& traj = reference_run();
  const auto two = dense_sample(traj, traj.total_time);
  REQUIRE(two.size() == 2);
  CHECK(two[0].time.is_zero());
  CHECK(two[0].state == traj.start);
  CHECK(two[1].state == traj.endpoint);

  // A grid point on a step boundary reproduces that step's initial condition.
  const TaylorStep& boundary = traj.steps[500];
  const auto at = dense_sample(traj, boundary.t_start);
  State initial;
  for (const auto& row : boundary.coeffs) initial.push_back(row[0]);
  CHECK(matches(at[1].state, initial, "1e-45"));
  CHECK_THROWS_AS(dense_sample(traj, ctx160().zero()), ConfigError);
}

TEST_CASE("short segment is a single clamped step") {
  Reference t;
  const Real T = t.ctx.parse("1e-5");
  const auto traj = construct_trajectory(t.sys, t.x0, T, Direction::forward, t.ball, t.ctx);
  REQUIRE(traj.steps.size() == 1);
  CHECK(traj.steps[0].dt == T);

  const auto back = construct_trajectory(t.sys, t.x0, T, Direction::backward, t.ball, t.ctx);
  CHECK(back.steps[0].dt == -T);
  CHECK(dense_sample(back, T).back().time == -T);
}

TEST_CASE("zero-length segment") {
  Reference t;
  const auto traj = construct_trajectory(t.sys, t.x0, t.ctx.zero(), Direction::forward, t.ball, t.ctx);
  CHECK(traj.steps.empty());
  CHECK(traj.endpoint == t.x0);
  CHECK(dense_sample(traj, t.ctx.parse("0.1")).size() == 1);
  const auto report = verify_round_trip(t.sys, t.x0, t.ctx.zero(), t.ball, t.ctx);
  CHECK(report.passed);
  CHECK(report.max_deviation.is_zero());
}

TEST_CASE("precondition errors") {
  Reference t;
  const BoundingBall tiny{t.x0, t.ctx.parse("1e-3")};
  const BoundingBall far{parse_state(t.ctx, {"100", "100", "100"}), t.ctx.parse("1")};
  CHECK_THROWS_AS(construct_trajectory(t.sys, t.x0, t.T, Direction::forward, far, t.ctx), ConfigError);
  CHECK_THROWS_AS(construct_trajectory(t.sys, t.x0, -t.T, Direction::forward, t.ball, t.ctx),
                  ConfigError);
  try {
    construct_trajectory(t.sys, t.x0, t.T, Direction::forward, tiny, t.ctx);
    FAIL("expected escape");
  } catch (const BallEscape& e) {
    CHECK(e.escape_time() > 0);
    CHECK(std::string(e.what()).find(kRemediation) != std::string::npos);
  }

  PrecisionConfig other;
  other.mantissa_bits = 200;
  CHECK_THROWS_AS(construct_trajectory(t.sys, t.x0, t.T, Direction::forward, t.ball, Context{other}),
                  ConfigError);
}

TEST_CASE("coarse series accuracy escapes backward") {
  PrecisionConfig cfg;
  cfg.series_accuracy = "1e-3";
  cfg.round_trip_tolerance = "1e-2";
  const Context coarse{cfg};
  const auto sys = tumor_system(coarse, coarse.parse("5"), coarse.parse("3"), coarse.parse("0.7"));
  const State end = parse_state(coarse, {"0.118689978", "0.7111230373", "9.6323947777"});
  Reference t;
  try {
    construct_trajectory(sys, end, coarse.parse("27.327"), Direction::backward, t.ball, coarse,
                         {false, {}});
    FAIL("expected the backward run to leave the ball");
  } catch (const BallEscape& e) {
    CHECK(e.escape_time() < 0);
  }
}

TEST_CASE("construction is deterministic") {
  Reference t;
  const Real T = t.ctx.parse("2");
  const auto a = construct_trajectory(t.sys, t.x0, T, Direction::forward, t.ball, t.ctx);
  const auto b = construct_trajectory(t.sys, t.x0, T, Direction::forward, t.ball, t.ctx);
  REQUIRE(a.steps.size() == b.steps.size());
  CHECK(a.endpoint == b.endpoint);
  for (std::size_t i = 0; i < a.steps.size(); ++i) CHECK(a.steps[i].coeffs == b.steps[i].coeffs);

  std::size_t seen = 0;
  TrajectoryOptions sink{false, [&](const TaylorStep&, const State&) { ++seen; }};
  const auto lean = construct_trajectory(t.sys, t.x0, T, Direction::forward, t.ball, t.ctx, sink);
  CHECK(lean.steps.empty());
  CHECK(seen == a.steps.size());
  CHECK(lean.endpoint == a.endpoint);
}

TEST_CASE("I=0.7 reference round trip passes") {
  Reference t;
  const auto report = verify_round_trip(t.sys, t.x0, t.T, t.ball, t.ctx);
  CHECK(report.passed);
  CHECK(report.max_deviation < t.ctx.parse("1e-10"));
  CHECK(report.forward.max_degree == report.backward.max_degree);
  CHECK(report.forward.min_degree == report.backward.min_degree);
  CHECK(report.deviation.size() == 3);
}

TEST_CASE("round trip tightens as eps_p shrinks") {
  Reference t;
  std::vector<double> devs;
  for (const char* eps : {"1e-20", "1e-30", "1e-40"}) {
    PrecisionConfig cfg;
    cfg.series_accuracy = eps;
    const Context c{cfg};
    const auto sys = tumor_system(c, c.parse("5"), c.parse("3"), c.parse("0.7"));
    const auto report = verify_round_trip(sys, t.x0, t.T, t.ball, c);
    devs.push_back(report.max_deviation.to_double());
  }
  CAPTURE(devs[0]);
  CAPTURE(devs[1]);
  CAPTURE(devs[2]);
  CHECK(devs[1] <= devs[0] * 10);
  CHECK(devs[2] <= devs[1] * 10);
  CHECK(devs[2] < devs[0]);
}

TEST_CASE("the round trip discriminates a too-coarse configuration") {
  PrecisionConfig cfg;
  cfg.mantissa_bits = 64;
  cfg.series_accuracy = "1e-12";
  cfg.guard_factor = "1e-6";
  // 2^-63 ~ 1.1e-19 <= 1e-12 * 1e-6, so the context itself is valid.
  const Context c{cfg};
  const auto sys = tumor_system(c, c.parse("5"), c.parse("3"), c.parse("0.7"));
  Reference t;
  const State x0 = c.state(std::vector<std::string>{"0.1450756817", "0.8395885828", "9.954786333"});
  bool failed = false;
  try {
    failed = !verify_round_trip(sys, x0, c.parse("27.327"), t.ball, c).passed;
  } catch (const BallEscape&) {
    failed = true;
  }
  CHECK(failed);
}

}  // TEST_SUITE
