// cclab: batch driver for forward solves, identity checks, continuation
// probes and size-estimate calibration.

#include "cclab/continuation.hpp"
#include "cclab/csv.hpp"
#include "cclab/error.hpp"
#include "cclab/io.hpp"
#include "cclab/pipeline.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using namespace cclab;

namespace {

struct Options {
  fs::path config;
  fs::path out = ".";
  std::optional<std::uint64_t> seed;
  int threads = 1;
};

struct Context {
  Options opts;
  Json config;
  fs::path base;  // directory of the config file, for relative paths

  fs::path resolve(const std::string& p) const {
    const fs::path path(p);
    return path.is_absolute() ? path : base / path;
  }
  fs::path out(const std::string& name) const { return opts.out / name; }
};

/// A run that completed but whose checks failed.
struct CheckFailure {
  std::string reason;
  std::string message;
};

[[noreturn]] void config_error(const std::string& what) { throw Error(ErrorCode::Config, what); }

template <class T>
T get(const Json& j, const char* key, T fallback) {
  try {
    return j.contains(key) ? j[key].get<T>() : fallback;
  } catch (const nlohmann::json::exception& e) {
    config_error(std::string("bad value for '") + key + "': " + e.what());
  }
}

const char* flag(bool b) { return b ? "1" : "0"; }

SolverOptions solver_options(const Context& ctx) {
  SolverOptions o;
  if (!ctx.config.contains("solver")) return o;
  const Json& s = ctx.config["solver"];
  const std::string method = get<std::string>(s, "method", "direct");
  if (method == "direct") {
    o.kind = SolverOptions::Kind::Direct;
  } else if (method == "krylov") {
    o.kind = SolverOptions::Kind::Krylov;
  } else {
    config_error("unknown solver method '" + method + "'");
  }
  o.tolerance = get<double>(s, "tolerance", o.tolerance);
  o.max_iterations = get<int>(s, "max_iterations", o.max_iterations);
  return o;
}

ScenarioSpec load_scenario(const Context& ctx) {
  if (ctx.config.contains("scenario")) return scenario_from_json(ctx.config["scenario"]);
  if (ctx.config.contains("scenario_file")) {
    return scenario_from_json(read_json_file(ctx.resolve(get<std::string>(ctx.config, "scenario_file", ""))));
  }
  config_error("config needs 'scenario' or 'scenario_file'");
}

std::uint64_t require_seed(const Context& ctx, const Json& j) {
  if (ctx.opts.seed) return *ctx.opts.seed;
  if (j.contains("seed")) return get<std::uint64_t>(j, "seed", 0);
  config_error("generator-based runs need a seed (--seed or 'seed')");
}

struct Generated {
  std::uint64_t seed = 0;
  int count = 0;
  EnsembleRanges ranges;
};

Generated generator(const Context& ctx, const Json& j) {
  Generated g;
  g.seed = require_seed(ctx, j);
  g.count = get<int>(j, "count", 20);
  if (g.count < 0) config_error("count must be non-negative");
  if (j.contains("ranges")) g.ranges = ranges_from_json(j["ranges"]);
  return g;
}

/// Scenario list from 'scenarios', 'scenario', 'ensemble_file' or a
/// generator block 'ensemble'. Sorted by id.
std::vector<ScenarioSpec> load_ensemble(const Context& ctx) {
  std::vector<ScenarioSpec> specs;
  const Json& c = ctx.config;
  auto add_all = [&](const Json& list) {
    if (!list.is_array()) config_error("'scenarios' must be an array");
    for (const Json& s : list) specs.push_back(scenario_from_json(s));
  };
  if (c.contains("scenarios")) {
    add_all(c["scenarios"]);
  } else if (c.contains("ensemble_file")) {
    const Json j = read_json_file(ctx.resolve(get<std::string>(c, "ensemble_file", "")));
    add_all(j.contains("scenarios") ? j["scenarios"] : j);
  } else if (c.contains("ensemble")) {
    const Generated g = generator(ctx, c["ensemble"]);
    for (int i = 0; i < g.count; ++i) specs.push_back(generate_scenario_spec(g.seed, i, g.ranges));
  } else if (c.contains("scenario") || c.contains("scenario_file")) {
    specs.push_back(load_scenario(ctx));
  } else {
    config_error("config needs 'scenarios', 'ensemble_file', 'ensemble' or 'scenario'");
  }
  if (specs.empty()) throw Error(ErrorCode::InvalidArgument, "empty ensemble");
  std::stable_sort(specs.begin(), specs.end(), [](const auto& a, const auto& b) { return a.id < b.id; });
  for (std::size_t i = 1; i < specs.size(); ++i) {
    if (specs[i].id == specs[i - 1].id) config_error("duplicate scenario id '" + specs[i].id + "'");
  }
  return specs;
}

std::vector<Scenario> build(const std::vector<ScenarioSpec>& specs) {
  std::vector<Scenario> out;
  out.reserve(specs.size());
  for (const auto& s : specs) out.emplace_back(s);
  return out;
}

std::vector<ScenarioRun> run_all(const Context& ctx, std::span<const Scenario> scenarios, bool require_adm) {
  std::vector<ScenarioRun> runs(scenarios.size());
  const SolverOptions so = solver_options(ctx);
  parallel_for(scenarios.size(), ctx.opts.threads,
               [&](std::size_t i) { runs[i] = run_scenario(scenarios[i], so, require_adm); });
  return runs;
}

template <class F>
std::string csv(F&& write) {
  std::ostringstream s;
  write(s);
  return s.str();
}

// ---------------------------------------------------------------------------

int cmd_forward(const Context& ctx) {
  const Scenario sc(load_scenario(ctx));
  const ScenarioRun run = run_scenario(sc, solver_options(ctx));
  write_text_file(ctx.out("vertices.csv"), csv([&](auto& o) { write_vertices_csv(sc.mesh(), o); }));
  write_text_file(ctx.out("cells.csv"), csv([&](auto& o) { write_cells_csv(sc.mesh(), o); }));
  write_text_file(ctx.out("u0.csv"), csv([&](auto& o) { write_solution_csv(run.u0, o); }));
  write_text_file(ctx.out("u1.csv"), csv([&](auto& o) { write_solution_csv(run.u1, o); }));
  write_text_file(ctx.out("grad_u0.csv"), csv([&](auto& o) { write_gradient_csv(run.u0, o); }));
  write_text_file(ctx.out("grad_u1.csv"), csv([&](auto& o) { write_gradient_csv(run.u1, o); }));
  write_json_file(ctx.out("power.json"), Json{{"id", sc.id()},
                                              {"hash", hex(run.hash)},
                                              {"admissibility", to_json(run.admissibility)},
                                              {"inclusion", to_json(inclusion_measure(sc))},
                                              {"power", to_json(run.power)}});
  return 0;
}

int cmd_verify(const Context& ctx) {
  const double tol = get<double>(ctx.config, "tolerance", 1e-6);
  const auto specs = load_ensemble(ctx);
  const auto scenarios = build(specs);
  const auto runs = run_all(ctx, scenarios, false);

  std::ostringstream rows;
  rows << "id,hash,admissible,guaranteed,basic_residual,identity_residual1,identity_residual2,re_dW,E_D,lower,upper,"
          "lower_holds,upper_holds,pass\n";
  Json reports = Json::array();
  Json flagged = Json::array();
  bool all_pass = true;
  for (std::size_t i = 0; i < runs.size(); ++i) {
    const PowerReport& p = runs[i].power;
    const bool identities = p.max_basic_residual() <= tol && p.identity.residual1 <= tol && p.identity.residual2 <= tol;
    const bool positive = !(p.inclusion_energy > 0.0) || p.re_gap > 0.0;
    // Without a nonnegative jump the inequality is not guaranteed; it is
    // reported but does not decide the exit status.
    const bool pass = identities && (!p.guaranteed || (p.inequality_holds() && positive));
    all_pass = all_pass && pass;
    if (!p.guaranteed) flagged.push_back(specs[i].id);
    rows << specs[i].id << ',' << hex(runs[i].hash) << ',' << flag(runs[i].admissibility.admissible()) << ','
         << flag(p.guaranteed) << ',' << fmt17(p.max_basic_residual()) << ',' << fmt17(p.identity.residual1) << ','
         << fmt17(p.identity.residual2) << ',' << fmt17(p.re_gap) << ',' << fmt17(p.inclusion_energy) << ','
         << fmt17(p.lower) << ',' << fmt17(p.upper) << ',' << flag(p.lower_holds) << ',' << flag(p.upper_holds) << ','
         << flag(pass) << '\n';
    Json r{{"id", specs[i].id},
           {"hash", hex(runs[i].hash)},
           {"pass", pass},
           {"inequality", p.guaranteed ? (p.inequality_holds() ? "holds" : "fails") : "not guaranteed"},
           {"admissibility", to_json(runs[i].admissibility)},
           {"power", to_json(p)}};
    reports.push_back(std::move(r));
  }
  write_text_file(ctx.out("verify.csv"), rows.str());
  write_json_file(ctx.out("verify.json"), Json{{"tolerance", tol},
                                               {"count", runs.size()},
                                               {"all_pass", all_pass},
                                               {"not_guaranteed", flagged},
                                               {"scenarios", reports}});
  if (!all_pass) throw CheckFailure{"verification-failed", "identity or inequality check failed; see verify.json"};
  return 0;
}

std::optional<ComplexField> field_for(const Context& ctx, const Scenario& sc) {
  const std::string which = get<std::string>(ctx.config, "field", "background");
  const SolverOptions so = solver_options(ctx);
  if (which == "background") return solve_neumann(assemble(sc, Problem::Background), so);
  if (which == "perturbed") return solve_neumann(assemble(sc, Problem::Perturbed), so);
  config_error("field must be 'background' or 'perturbed'");
}

std::vector<Vec2> centers_in(const Mesh& mesh, double margin, int n) {
  const Vec2 lo = mesh.bbox_min();
  const Vec2 hi = mesh.bbox_max();
  std::vector<Vec2> out;
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      const double x = lo.x() + margin + (i + 0.5) / n * (hi.x() - lo.x() - 2.0 * margin);
      const double y = lo.y() + margin + (j + 0.5) / n * (hi.y() - lo.y() - 2.0 * margin);
      out.emplace_back(x, y);
    }
  }
  return out;
}

std::vector<Vec2> points(const Json& list) {
  std::vector<Vec2> out;
  for (const Json& p : list) {
    if (!p.is_array() || p.size() != 2) config_error("points are [x, y] pairs");
    out.emplace_back(p[0].get<double>(), p[1].get<double>());
  }
  return out;
}

int cmd_threeball(const Context& ctx) {
  const Scenario sc(load_scenario(ctx));
  const Json& c = ctx.config;
  ThreeBallParams base;
  base.r0 = get<double>(c, "r0", base.r0);
  base.r1 = get<double>(c, "r1", base.r1);
  base.r2 = get<double>(c, "r2", base.r2);
  base.lambda = get<double>(c, "lambda", ellipticity(sc));
  base.lipschitz = sc.constants().lipschitz;
  if (c.contains("s")) {
    base.s = get<double>(c, "s", 0.0);
    if (!(base.s > 0.0)) throw Error(ErrorCode::InvalidArgument, "s must be positive");
  }
  // Validates the radii once for the whole sweep.
  tau(base.r0, base.r1, base.r2, base.lambda, base.s > 0.0 ? base.s : 2.0);

  const auto u = field_for(ctx, sc);
  const std::vector<Vec2> centers =
      c.contains("centers") ? points(c["centers"]) : centers_in(sc.mesh(), base.r2, get<int>(c, "grid", 5));

  std::vector<ThreeBallReport> rows;
  Json skipped = Json::array();
  for (const Vec2& x : centers) {
    const double dist = sc.mesh().distance_to_boundary(x);
    if (!sc.mesh().contains(x)) {
      skipped.push_back({{"center", {x.x(), x.y()}}, {"reason", "center outside the domain"}});
      continue;
    }
    if (dist < base.r2) {
      skipped.push_back({{"center", {x.x(), x.y()}}, {"reason", "r2 exceeds dist(center, boundary) = " + fmt17(dist)}});
      continue;
    }
    ThreeBallParams p = base;
    p.center = x;
    rows.push_back(three_ball_check(*u, p));
  }
  write_text_file(ctx.out("threeball.csv"), csv([&](auto& o) { write_three_ball_csv(rows, o); }));

  double lo = std::numeric_limits<double>::infinity();
  double hi = 0.0;
  bool finite = true, window = true, s_above_k = true;
  for (const auto& r : rows) {
    finite = finite && std::isfinite(r.c_hat);
    window = window && r.window;
    s_above_k = s_above_k && r.s_above_k;
    if (std::isfinite(r.c_hat)) {
      lo = std::min(lo, r.c_hat);
      hi = std::max(hi, r.c_hat);
    }
  }
  Json stability{{"rows", rows.size()},
                 {"skipped", skipped},
                 {"all_finite", finite},
                 {"all_window", window},
                 {"all_s_above_k", s_above_k}};
  if (!rows.empty()) {
    stability["c_hat_min"] = lo;
    stability["c_hat_max"] = hi;
    stability["max_over_min"] = lo > 0.0 ? Json(hi / lo) : Json(nullptr);
  }
  write_json_file(ctx.out("threeball.json"), stability);
  return 0;
}

int cmd_smallness(const Context& ctx) {
  const Scenario sc(load_scenario(ctx));
  const Json& c = ctx.config;
  std::vector<double> rhos;
  if (c.contains("rhos")) {
    rhos = get<std::vector<double>>(c, "rhos", {});
  } else {
    rhos.push_back(get<double>(c, "rho", 0.1));
  }
  const auto u = field_for(ctx, sc);
  const std::vector<Vec2> candidates = c.contains("points") ? points(c["points"]) : sample_grid(sc.mesh(), get<int>(c, "grid", 9));

  std::ostringstream rows;
  rows << "x,y,rho,ratio\n";
  Json summary = Json::array();
  for (double rho : rhos) {
    const SmallnessReport r = smallness_chain(*u, rho, candidates);
    for (std::size_t i = 0; i < r.samples.size(); ++i) {
      rows << fmt17(r.samples[i].x()) << ',' << fmt17(r.samples[i].y()) << ',' << fmt17(rho) << ','
           << fmt17(r.ratios[i]) << '\n';
    }
    summary.push_back({{"rho", rho},
                       {"samples", r.samples.size()},
                       {"min_ratio", r.min_ratio},
                       {"argmin", {r.argmin.x(), r.argmin.y()}}});
  }
  write_text_file(ctx.out("smallness.csv"), rows.str());
  write_json_file(ctx.out("smallness.json"), Json{{"radii", summary}});
  return 0;
}

const char* shape_name(const ScenarioSpec& s) {
  if (!s.inclusion) return "none";
  if (std::holds_alternative<Disk>(s.inclusion->shape)) return "disk";
  if (std::holds_alternative<Ellipse>(s.inclusion->shape)) return "ellipse";
  return "polygon";
}

int cmd_gen(const Context& ctx) {
  const Json& block = ctx.config.contains("ensemble") ? ctx.config["ensemble"] : ctx.config;
  const Generated g = generator(ctx, block);
  if (g.count == 0) throw Error(ErrorCode::InvalidArgument, "empty ensemble");
  const auto scenarios = generate_ensemble(g.seed, g.count, g.ranges);
  Json specs = Json::array();
  std::ostringstream rows;
  rows << "id,hash,shape,exact_area,cell_area,eroded_cells,erosion_condition,beta,alpha0,alpha1\n";
  for (const Scenario& sc : scenarios) {
    specs.push_back(to_json(sc.spec()));
    const InclusionMeasure m = inclusion_measure(sc);
    const Constants& k = sc.constants();
    rows << sc.id() << ',' << hex(scenario_hash(sc.spec())) << ',' << shape_name(sc.spec()) << ','
         << fmt17(m.exact_area) << ',' << fmt17(m.cell_area) << ',' << fmt17(m.eroded_cells) << ','
         << flag(m.erosion_condition) << ',' << fmt17(k.beta) << ',' << fmt17(k.alpha0) << ',' << fmt17(k.alpha1)
         << '\n';
  }
  write_json_file(ctx.out("ensemble.json"),
                  Json{{"seed", g.seed}, {"count", g.count}, {"ranges", to_json(g.ranges)}, {"scenarios", specs}});
  write_text_file(ctx.out("ensemble.csv"), rows.str());
  return 0;
}

ConstantSource source_of(const std::string& name) {
  if (name == "analytic") return ConstantSource::Analytic;
  if (name == "calibrated") return ConstantSource::Calibrated;
  config_error("source must be 'analytic' or 'calibrated'");
}

int cmd_calibrate(const Context& ctx) {
  const auto specs = load_ensemble(ctx);
  const auto scenarios = build(specs);
  const auto runs = run_all(ctx, scenarios, true);
  const auto samples = calibration_samples(scenarios, runs);
  const ConstantSource source = source_of(get<std::string>(ctx.config, "source", "analytic"));

  const int n = static_cast<int>(samples.size());
  int n_test = 0;
  if (ctx.config.contains("test_count")) {
    n_test = get<int>(ctx.config, "test_count", 0);
  } else {
    n_test = static_cast<int>(std::lround(get<double>(ctx.config, "test_fraction", 0.2) * n));
  }
  if (n_test < 0 || n_test >= n) throw Error(ErrorCode::InvalidArgument, "test split leaves no training scenario");
  const int n_train = n - n_test;

  const Calibration cal = calibrate(std::span(samples).first(n_train));
  write_json_file(ctx.out("calibration.json"), to_json(cal));

  std::ostringstream rows;
  rows << "id,hash,role,area,re_dW,re_W0,ratio,K,lower,upper,bracketed,extrapolated,upper_supported\n";
  Json tests = Json::array();
  int violations = 0;
  std::vector<double> areas, ratios;
  for (int i = 0; i < n; ++i) {
    const CalibrationSample& s = samples[i];
    const bool train = i < n_train;
    const SizeEstimate e = estimate_size(s, cal, source);
    const bool ok = e.brackets(s.area);
    if (!train && !ok) ++violations;
    areas.push_back(s.area);
    ratios.push_back(e.ratio);
    rows << s.id << ',' << hex(s.hash) << ',' << (train ? "train" : "test") << ',' << fmt17(s.area) << ','
         << fmt17(s.re_gap) << ',' << fmt17(s.re_w0) << ',' << fmt17(e.ratio) << ',' << fmt17(s.k_value()) << ','
         << fmt17(e.lower) << ',' << fmt17(e.upper) << ',' << flag(ok) << ',' << flag(e.extrapolated) << ','
         << flag(e.upper_supported) << '\n';
    if (!train) tests.push_back({{"id", s.id}, {"area", s.area}, {"bracketed", ok}, {"estimate", to_json(e)}});
  }
  write_text_file(ctx.out("ensemble.csv"), rows.str());
  Json summary{{"source", to_string(source)},
               {"train_count", n_train},
               {"test_count", n_test},
               {"violations", violations},
               {"tests", tests}};
  summary["spearman_ratio_area"] = n >= 2 ? Json(spearman(areas, ratios)) : Json(nullptr);
  write_json_file(ctx.out("estimates.json"), summary);
  return 0;
}

int cmd_estimate(const Context& ctx) {
  const Json& c = ctx.config;
  std::optional<Calibration> cal;
  if (c.contains("calibration")) {
    const Json& j = c["calibration"];
    cal = calibration_from_json(j.is_string() ? read_json_file(ctx.resolve(j.get<std::string>())) : j);
  }
  const bool user = c.contains("K1") || c.contains("K2");
  if (!cal && !user) config_error("config needs 'calibration' or 'K1' and 'K2'");
  if (user && !(c.contains("K1") && c.contains("K2"))) config_error("both 'K1' and 'K2' are required");

  std::optional<CalibrationSample> sample;
  double re_gap = 0.0, re_w0 = 0.0;
  if (c.contains("scenario") || c.contains("scenario_file")) {
    const Scenario sc(load_scenario(ctx));
    const ScenarioRun run = run_scenario(sc, solver_options(ctx));
    sample = make_sample(sc, run.u0, run.power, run.hash);
    re_gap = sample->re_gap;
    re_w0 = sample->re_w0;
  } else if (c.contains("measurement")) {
    re_gap = get<double>(c["measurement"], "re_dW", 0.0);
    re_w0 = get<double>(c["measurement"], "re_W0", 0.0);
  } else {
    config_error("config needs 'measurement' or 'scenario'");
  }

  SizeEstimate e;
  if (user) {
    e = estimate_size(re_gap, re_w0, get<double>(c, "K1", 0.0), get<double>(c, "K2", 0.0), ConstantSource::User);
    if (sample) e.upper_supported = sample->erosion_condition;
  } else {
    const std::string fallback = cal->analytic_k1 && cal->analytic_k2 ? "analytic" : "calibrated";
    const ConstantSource source = source_of(get<std::string>(c, "source", fallback));
    if (sample) {
      e = estimate_size(*sample, *cal, source);
    } else {
      CalibrationSample m;
      m.re_gap = re_gap;
      m.re_w0 = re_w0;
      e = estimate_size(m, *cal, source);
      e.extrapolated = false;  // no descriptor to compare against
    }
  }
  Json out{{"estimate", to_json(e)}};
  std::optional<double> truth;
  if (sample) truth = sample->area;
  if (c.contains("true_area")) truth = get<double>(c, "true_area", 0.0);
  if (truth) {
    out["true_area"] = *truth;
    out["bracketed"] = e.brackets(*truth);
  }
  write_json_file(ctx.out("estimate.json"), out);
  return 0;
}

int exit_code(ErrorCode code) {
  switch (code) {
    case ErrorCode::Config:
    case ErrorCode::Io:
    case ErrorCode::InvalidArgument:
    case ErrorCode::Generation:
      return 1;
    default:
      return 2;
  }
}

int report(const std::string& reason, const std::string& message, int code, const fs::path& out) {
  const Json j{{"error", reason}, {"message", message}, {"exit_code", code}};
  std::cerr << j.dump() << '\n';
  std::error_code ec;
  if (fs::is_directory(out, ec)) {
    try {
      write_json_file(out / "error.json", j);
    } catch (const Error&) {
    }
  }
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Complex conductivity laboratory"};
  app.require_subcommand(1);
  Options opts;
  std::uint64_t seed = 0;

  using Handler = int (*)(const Context&);
  const std::vector<std::tuple<const char*, const char*, Handler>> commands{
      {"forward", "Solve background and perturbed problems, write solutions and power report", cmd_forward},
      {"verify", "Check power identities and energy inequalities over an ensemble", cmd_verify},
      {"threeball", "Three-ball probe over a sweep of centres", cmd_threeball},
      {"smallness", "Propagation-of-smallness ratios", cmd_smallness},
      {"calibrate", "Fit size constants on a training split and test on the rest", cmd_calibrate},
      {"estimate", "Apply size constants to a measurement", cmd_estimate},
      {"gen", "Generate an admissible scenario ensemble", cmd_gen},
  };
  std::vector<std::pair<CLI::App*, Handler>> subs;
  CLI::Option* seed_opts[16] = {};
  for (std::size_t i = 0; i < commands.size(); ++i) {
    const auto& [name, help, handler] = commands[i];
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("--config", opts.config, "JSON config file")->required();
    sub->add_option("--out", opts.out, "output directory");
    seed_opts[i] = sub->add_option("--seed", seed, "random seed for generated ensembles");
    sub->add_option("--threads", opts.threads, "worker threads")->check(CLI::PositiveNumber);
    subs.emplace_back(sub, handler);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return report("invalid-argument", e.what(), 1, opts.out);
  }

  for (std::size_t i = 0; i < subs.size(); ++i) {
    if (!subs[i].first->parsed()) continue;
    if (seed_opts[i]->count() > 0) opts.seed = seed;
    try {
      std::error_code ec;
      fs::create_directories(opts.out, ec);
      if (ec) throw Error(ErrorCode::Io, "cannot create " + opts.out.string() + ": " + ec.message());
      Context ctx{opts, read_json_file(opts.config), opts.config.parent_path()};
      if (!ctx.config.is_object()) config_error("config must be a JSON object");
      return subs[i].second(ctx);
    } catch (const Error& e) {
      return report(std::string(to_string(e.code())), e.what(), exit_code(e.code()), opts.out);
    } catch (const CheckFailure& f) {
      return report(f.reason, f.message, 2, opts.out);
    } catch (const std::exception& e) {
      return report("internal", e.what(), 2, opts.out);
    }
  }
  return 1;
}
