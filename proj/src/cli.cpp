#include "fgbfi/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <optional>
#include <sstream>

#include "fgbfi/analysis.hpp"
#include "fgbfi/errors.hpp"
#include "fgbfi/lyapunov.hpp"
#include "fgbfi/quadsys.hpp"
#include "fgbfi/report.hpp"
#include "fgbfi/trajectory.hpp"

namespace fgbfi {
namespace {

// Reference starting points; used when --x0 is not given.
constexpr const char* kTumorStart = "0.1450756817,0.8395885828,9.954786333";
constexpr const char* kTumorStartI04 = "1.292927957,0.5183621413,1.168939477";
constexpr const char* kLorenzStart = "6.6852969382,1.3161366067,31.1718333342";

struct CommonArgs {
  std::string model = "tumor";
  std::string params;
  std::string system_file;
  std::string x0;
  std::string total_time;
  Bits bits = 160;
  std::string eps_series = "1e-40";
  std::string eps_roundtrip = "1e-10";
  std::string delta = "1";
  unsigned degree_cap = 200;
  std::string ball_center;
  std::string ball_radius;
  int digits = 10;
  std::string output;
  std::string manifest;
};

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> parts;
  std::string item;
  std::istringstream in(text);
  while (std::getline(in, item, ',')) {
    item.erase(0, item.find_first_not_of(" \t"));
    item.erase(item.find_last_not_of(" \t") + 1);
    if (item.empty()) throw ParseError("empty entry in list '" + text + "'");
    parts.push_back(item);
  }
  if (parts.empty()) throw ParseError("empty list");
  return parts;
}

void add_common(CLI::App& cmd, CommonArgs& a, const std::string& default_time) {
  a.total_time = default_time;
  cmd.add_option("--model", a.model, "Catalog system: tumor | lorenz")
      ->envname("FGBFI_MODEL");
  cmd.add_option("-p,--params", a.params,
                 "Model parameters, e.g. N=5,H=3,I=0.7 (tumor) or sigma=10,r=28,b=8/3 (lorenz)");
  cmd.add_option("--system-file", a.system_file, "YAML system definition (overrides --model)")
      ->check(CLI::ExistingFile);
  cmd.add_option("--x0", a.x0,
                 "Initial state, comma separated (default: the reference start for the model)");
  cmd.add_option("-T,--time", a.total_time, "Length of the time segment [time units]");
  cmd.add_option("--bits", a.bits, "Mantissa width b_m [bits]")->envname("FGBFI_BITS");
  cmd.add_option("--eps-series", a.eps_series, "Series truncation accuracy eps_p")
      ->envname("FGBFI_EPS_SERIES");
  cmd.add_option("--eps-roundtrip", a.eps_roundtrip, "Round-trip tolerance eps_R")
      ->envname("FGBFI_EPS_ROUNDTRIP");
  cmd.add_option("--delta", a.delta, "Step-size margin delta [1/time units]")
      ->envname("FGBFI_DELTA");
  cmd.add_option("--degree-cap", a.degree_cap, "Largest admissible series degree")
      ->envname("FGBFI_DEGREE_CAP");
  cmd.add_option("--ball-center", a.ball_center,
                 "Bounding ball center, comma separated (default: estimated from a coarse run)");
  cmd.add_option("--ball-radius", a.ball_radius, "Bounding ball radius [state units]");
  cmd.add_option("--digits", a.digits, "Fractional digits in decimal output")
      ->envname("FGBFI_DIGITS")
      ->check(CLI::Range(1, 200));
  cmd.add_option("-o,--output", a.output, "Data file (default: standard output)");
  cmd.add_option("--manifest", a.manifest,
                 "Manifest JSON path (default: <output>.manifest.json when --output is set)");
}

/// Resolved inputs shared by every command.
struct Setup {
  Context ctx;
  QuadraticSystem system;
  State x0;
  Real total_time;
  RunManifest manifest;
};

QuadraticSystem load(const Context& ctx, const CommonArgs& a, RunManifest& m) {
  if (!a.system_file.empty()) {
    std::ifstream in(a.system_file);
    std::stringstream text;
    text << in.rdbuf();
    m.inputs["system"] = "file sha256:" + sha256_hex(text.str());
    return load_system(ctx, text.str());
  }
  const ModelParameters params = a.params.empty() ? ModelParameters{} : parse_parameters(a.params);
  std::string canonical;
  for (const auto& [k, v] : params) canonical += (canonical.empty() ? "" : ",") + k + "=" + v;
  m.inputs["system"] = a.model + (canonical.empty() ? "" : " " + canonical);
  return catalog_system(ctx, a.model, params);
}

std::string default_start(const CommonArgs& a) {
  if (!a.system_file.empty())
    throw ConfigError("--x0 is required with --system-file");
  if (a.model == "lorenz") return kLorenzStart;
  const ModelParameters params = a.params.empty() ? ModelParameters{} : parse_parameters(a.params);
  const auto it = params.find("I");
  if (it != params.end() && Real(it->second, 64) == Real("0.4", 64)) return kTumorStartI04;
  return kTumorStart;
}

Setup prepare(const std::string& command, const CommonArgs& a) {
  PrecisionConfig cfg;
  cfg.mantissa_bits = a.bits;
  cfg.series_accuracy = a.eps_series;
  cfg.round_trip_tolerance = a.eps_roundtrip;
  cfg.step_margin = a.delta;
  cfg.degree_cap = a.degree_cap;
  Context ctx{cfg};

  RunManifest m;
  m.command = command;
  QuadraticSystem sys = load(ctx, a, m);
  const std::string start = a.x0.empty() ? default_start(a) : a.x0;
  State x0 = ctx.state(split_list(start));
  if (x0.size() != sys.dimension()) throw DimensionMismatch(sys.dimension(), x0.size());
  Real total_time = ctx.parse(a.total_time);
  if (total_time < 0L) throw ConfigError("-T must be >= 0");

  m.inputs["x0"] = start;
  m.inputs["T"] = a.total_time;
  m.inputs["precision"] = cfg.describe();
  m.inputs["digits"] = std::to_string(a.digits);
  if (!a.output.empty()) m.artifacts.push_back(a.output);
  return {std::move(ctx), std::move(sys), std::move(x0), std::move(total_time), std::move(m)};
}

BoundingBall resolve_ball(const CommonArgs& a, Setup& s, Direction direction) {
  if (a.ball_center.empty() != a.ball_radius.empty())
    throw ConfigError("--ball-center and --ball-radius must be given together");
  if (!a.ball_center.empty()) {
    BoundingBall ball{s.ctx.state(split_list(a.ball_center)), s.ctx.parse(a.ball_radius)};
    if (ball.center.size() != s.system.dimension())
      throw DimensionMismatch(s.system.dimension(), ball.center.size());
    if (!(ball.radius > 0L)) throw ConfigError("--ball-radius must be positive");
    s.manifest.inputs["ball"] = a.ball_center + " r=" + a.ball_radius;
    return ball;
  }
  s.manifest.inputs["ball"] = "estimated";
  return estimate_ball(s.system, s.x0, s.total_time.to_double(), direction);
}

/// Writes `body` to --output (or `out`) and the manifest next to it.
void emit(const CommonArgs& a, const RunManifest& m, const std::string& body, std::ostream& out) {
  if (a.output.empty()) {
    out << body;
  } else {
    std::ofstream file(a.output, std::ios::binary);
    if (!file) throw ConfigError("cannot write " + a.output);
    file << body;
  }
  std::string manifest_path = a.manifest;
  if (manifest_path.empty() && !a.output.empty()) manifest_path = a.output + ".manifest.json";
  if (!manifest_path.empty()) {
    std::ofstream file(manifest_path, std::ios::binary);
    if (!file) throw ConfigError("cannot write " + manifest_path);
    file << m.to_json();
  }
}

std::string fixed(double v, int digits) {
  std::ostringstream s;
  s.setf(std::ios::fixed);
  s.precision(digits);
  s << v;
  return s.str();
}

int cmd_integrate(const CommonArgs& a, const std::string& grid, const std::string& direction,
                  std::ostream& out) {
  Setup s = prepare("integrate", a);
  if (direction != "forward" && direction != "backward")
    throw ConfigError("--direction must be forward or backward");
  const Direction dir = direction == "forward" ? Direction::forward : Direction::backward;
  const Real grid_step = s.ctx.parse(grid);
  if (!(grid_step > 0L)) throw ConfigError("--grid must be positive");
  s.manifest.inputs["grid"] = grid;
  s.manifest.inputs["direction"] = direction;

  std::vector<Sample> samples;
  if (!s.total_time.is_zero()) {
    const BoundingBall ball = resolve_ball(a, s, dir);
    const Trajectory traj = construct_trajectory(s.system, s.x0, s.total_time, dir, ball, s.ctx);
    samples = dense_sample(traj, grid_step);
    s.manifest.results["steps"] = std::to_string(traj.stats.step_count);
    s.manifest.results["min_degree"] = std::to_string(traj.stats.min_degree);
    s.manifest.results["max_degree"] = std::to_string(traj.stats.max_degree);
    std::string end;
    for (const auto& x : traj.endpoint) end += (end.empty() ? "" : ",") + x.to_fixed(a.digits);
    s.manifest.results["endpoint"] = end;
  }
  std::ostringstream body;
  write_trajectory(body, s.manifest, s.system.labels(), samples, a.digits);
  emit(a, s.manifest, body.str(), out);
  return kExitOk;
}

int cmd_verify(const CommonArgs& a, std::ostream& out) {
  Setup s = prepare("verify", a);
  const BoundingBall ball = resolve_ball(a, s, Direction::forward);
  const VerificationReport report = verify_round_trip(s.system, s.x0, s.total_time, ball, s.ctx);
  s.manifest.results["passed"] = report.passed ? "true" : "false";
  s.manifest.results["max_deviation"] = report.max_deviation.to_scientific(3);
  std::ostringstream body;
  write_verification(body, s.manifest, report, a.digits);
  emit(a, s.manifest, body.str(), out);
  return report.passed ? kExitOk : kExitVerifyFailed;
}

int cmd_returns(const CommonArgs& a, const std::string& grid, std::size_t window,
                std::ostream& out) {
  Setup s = prepare("returns", a);
  const Real grid_step = s.ctx.parse(grid);
  if (!(grid_step > 0L)) throw ConfigError("--grid must be positive");
  s.manifest.inputs["grid"] = grid;
  s.manifest.inputs["window"] = std::to_string(window);

  std::vector<ReturnEvent> events;
  if (s.total_time.is_zero()) {
    events.push_back({0, s.ctx.zero(), s.x0, s.ctx.zero()});
  } else {
    const BoundingBall ball = resolve_ball(a, s, Direction::forward);
    const Trajectory traj = construct_trajectory(s.system, s.x0, s.total_time, Direction::forward,
                                                 ball, s.ctx);
    events = find_returns(distance_series(traj, grid_step), window);
  }
  s.manifest.results["events"] = std::to_string(events.size());
  if (auto spacing = even_return_spacing(events)) s.manifest.results["even_spacing"] = fixed(*spacing, 3);
  std::ostringstream body;
  write_returns(body, s.manifest, s.system.labels(), events, a.digits);
  emit(a, s.manifest, body.str(), out);
  return kExitOk;
}

int cmd_rk4(const CommonArgs& a, const std::string& steps, std::ostream& out) {
  Setup s = prepare("rk4-compare", a);
  s.manifest.inputs["steps"] = steps;
  if (!(s.total_time > 0L)) throw ConfigError("rk4-compare needs T > 0");
  const BoundingBall ball = resolve_ball(a, s, Direction::forward);
  const Trajectory reference = construct_trajectory(s.system, s.x0, s.total_time, Direction::forward,
                                                    ball, s.ctx, {false, {}});
  std::vector<RK4Comparison> rows;
  std::vector<double> hs, errs;
  for (const auto& text : split_list(steps)) {
    rows.push_back(rk4_error(s.system, s.x0, s.ctx.parse(text), s.total_time, reference));
    hs.push_back(rows.back().step.to_double());
    errs.push_back(rows.back().error.to_double());
  }
  std::optional<double> order;
  if (rows.size() >= 2 && std::all_of(errs.begin(), errs.end(), [](double e) { return e > 0; }))
    order = convergence_order(hs, errs);
  if (order) s.manifest.results["order"] = fixed(*order, 3);
  s.manifest.results["max_degree"] = std::to_string(reference.stats.max_degree);
  s.manifest.results["min_degree"] = std::to_string(reference.stats.min_degree);
  std::ostringstream body;
  write_rk4_table(body, s.manifest, rows, order);
  emit(a, s.manifest, body.str(), out);
  return kExitOk;
}

struct LyapunovArgs {
  std::string group;
  std::size_t segments = 0;
  std::string tau;
  bool progress = false;
};

int cmd_lyapunov(const CommonArgs& a, const LyapunovArgs& l, std::ostream& out, std::ostream& err) {
  Setup s = prepare("lyapunov", a);
  if (!(s.total_time > 0L)) throw ConfigError("lyapunov needs T > 0");

  // Default policy: tau close to 0.01 unless M or tau is given.
  std::size_t segments = l.segments;
  if (segments == 0) {
    const Real tau = s.ctx.parse(l.tau.empty() ? "0.01" : l.tau);
    if (!(tau > 0L)) throw ConfigError("--tau must be positive");
    segments = static_cast<std::size_t>(std::max(1.0, std::round((s.total_time / tau).to_double())));
  }

  std::string group = l.group;
  if (group.empty()) group = (a.system_file.empty() && a.model == "tumor") ? "1" : "axes";
  std::vector<PerturbationGroup> groups;
  if (group == "axes") {
    groups.push_back(axis_group(s.ctx, s.system.dimension()));
  } else if (group == "all") {
    for (int g = 1; g <= 4; ++g) groups.push_back(tumor_perturbation_group(s.ctx, g));
  } else {
    for (const auto& g : split_list(group)) {
      int number = 0;
      try {
        number = std::stoi(g);
      } catch (const std::exception&) {
        throw ParseError("--group expects 1..4, 'all' or 'axes', got '" + g + "'");
      }
      groups.push_back(tumor_perturbation_group(s.ctx, number));
    }
  }
  for (const auto& g : groups)
    if (g.vectors.front().size() != s.system.dimension())
      throw DimensionMismatch(s.system.dimension(), g.vectors.front().size());

  s.manifest.inputs["M"] = std::to_string(segments);
  s.manifest.inputs["group"] = group;
  const BoundingBall ball = resolve_ball(a, s, Direction::forward);

  std::vector<LyapunovResult> results;
  for (const auto& g : groups) {
    LyapunovOptions options;
    if (l.progress) {
      const std::size_t every = std::max<std::size_t>(1, segments / 20);
      options.progress = [&err, &g, every, segments](std::size_t k, std::span<const double> v) {
        if (k % every != 0 && k != segments) return;
        err << "group " << g.label << " segment " << k << "/" << segments << ":";
        for (double x : v) err << " " << x;
        err << "\n";
      };
    }
    results.push_back(benettin(s.system, s.x0, g, s.total_time, segments, ball, s.ctx, options));
    const auto& r = results.back();
    std::string key = "group " + r.group;
    std::string vals;
    for (double x : r.raw()) vals += (vals.empty() ? "" : ",") + fixed(x, 6);
    s.manifest.results[key] = vals + (r.stabilized() ? " stabilized" : " not-stabilized");
  }
  s.manifest.inputs["tau"] = results.front().tau.to_string();

  std::ostringstream body;
  write_spectrum(body, s.manifest, results, a.digits);
  emit(a, s.manifest, body.str(), out);
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Power-series trajectories of quadratic ODE systems in multiple precision", "fgbfi"};
  app.option_defaults()->always_capture_default();
  app.require_subcommand(1);

  CommonArgs integ_args, verify_args, returns_args, rk4_args, lyap_args;
  std::string integ_grid = "0.01", integ_direction = "forward";
  auto* integrate = app.add_subcommand("integrate", "Build a trajectory and sample it on a grid");
  add_common(*integrate, integ_args, "27.327");
  integrate->add_option("--grid", integ_grid, "Output grid spacing [time units]");
  integrate->add_option("--direction", integ_direction, "forward | backward");

  auto* verify = app.add_subcommand("verify", "Forward-then-backward round-trip check (exit 2 on failure)");
  add_common(*verify, verify_args, "27.327");

  std::string returns_grid = "0.001";
  std::size_t window = 5;
  auto* returns = app.add_subcommand("returns", "Local minima of the distance to the initial point");
  add_common(*returns, returns_args, "27.327");
  returns->add_option("--grid", returns_grid, "Distance grid spacing [time units]");
  returns->add_option("--window", window, "Half-width of the local-minimum window [grid samples]")
      ->check(CLI::PositiveNumber);

  std::string steps = "0.05,0.01,0.005,0.001";
  auto* rk4 = app.add_subcommand("rk4-compare", "Fixed-step RK4 error against the power-series endpoint");
  add_common(*rk4, rk4_args, "30");
  rk4->add_option("--steps", steps, "RK4 step sizes, comma separated [time units]");

  LyapunovArgs lyap;
  auto* lyapunov = app.add_subcommand("lyapunov", "Lyapunov spectrum and Kaplan-Yorke dimension");
  add_common(*lyapunov, lyap_args, "200");
  lyapunov->add_option("--group", lyap.group,
                       "Perturbation group: 1..4 (comma list), all, or axes (default: 1 for tumor, axes otherwise)");
  lyapunov->add_option("-M,--segments", lyap.segments,
                       "Number of renormalization segments (0: derive from --tau)");
  lyapunov->add_option("--tau", lyap.tau, "Segment length when M is 0 [time units] (default 0.01)");
  lyapunov->add_flag("--progress", lyap.progress, "Report running estimates on stderr");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitParse;
  }

  try {
    if (*integrate) return cmd_integrate(integ_args, integ_grid, integ_direction, out);
    if (*verify) return cmd_verify(verify_args, out);
    if (*returns) return cmd_returns(returns_args, returns_grid, window, out);
    if (*rk4) return cmd_rk4(rk4_args, steps, out);
    if (*lyapunov) return cmd_lyapunov(lyap_args, lyap, out, err);
  } catch (const BallEscape& e) {
    err << "error: " << e.what() << "\n";
    return kExitBallEscape;
  } catch (const ParseError& e) {
    err << "parse error: " << e.what() << "\n";
    return kExitParse;
  } catch (const ConfigError& e) {
    err << "configuration error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const DimensionMismatch& e) {
    err << "configuration error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const AccuracyUnreachable& e) {
    err << "configuration error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const LinearDependence& e) {
    err << "configuration error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitFailure;
}

}  // namespace fgbfi
