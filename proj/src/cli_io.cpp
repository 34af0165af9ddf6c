#include "vaxgame/cli_io.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iterator>
#include <map>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <thread>

#include <fmt/format.h>

#include "CLI11.hpp"
#include "vaxgame/errors.hpp"

namespace vaxgame {

using nlohmann::json;

namespace {

constexpr std::pair<Command, std::string_view> kCommandNames[] = {
    {Command::kValidate, "validate"},   {Command::kEquilibria, "equilibria"},
    {Command::kTrajectory, "trajectory"}, {Command::kSweepR, "sweep-r"},
    {Command::kSweepEps, "sweep-eps"}, {Command::kTangency, "tangency"},
    {Command::kSurface, "surface"},
};

std::string_view to_string(SweepTable t) {
  switch (t) {
    case SweepTable::kPoints: return "points";
    case SweepTable::kClosedForm: return "closed-form";
    case SweepTable::kEvents: return "events";
  }
  return "points";
}

}  // namespace

std::string_view to_string(Command c) {
  for (const auto& [cmd, name] : kCommandNames) {
    if (cmd == c) return name;
  }
  return "unknown";
}

Command parse_command(std::string_view text) {
  for (const auto& [cmd, name] : kCommandNames) {
    if (name == text) return cmd;
  }
  throw ParameterError("unknown command '" + std::string(text) + "'");
}

std::string format_real(double v) { return fmt::format("{:.17g}", v); }

// ---------------------------------------------------------------------------
// Curve specs

CurveFamilySpec parse_curve_spec(std::string_view json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ParameterError(std::string("$: invalid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ParameterError("$: expected a JSON object");
  if (!j.contains("family")) throw ParameterError("$.family: required");
  if (!j["family"].is_string()) throw ParameterError("$.family: expected a string");

  CurveFamilySpec spec;
  try {
    spec = CurveFamilySpec::defaults(parse_curve_family(j["family"].get<std::string>()));
  } catch (const ParameterError& e) {
    throw ParameterError(std::string("$.family: ") + e.what());
  }

  static const std::set<std::string> known = {"family", "R0", "transition_lo", "transition_hi",
                                              "p_star", "exponent"};
  std::set<std::string> allowed = {"family"};
  switch (spec.family) {
    case CurveFamily::kExample1:
    case CurveFamily::kRationalGlue:
      allowed.insert({"R0", "transition_lo", "transition_hi"});
      break;
    case CurveFamily::kConvexTest:
      allowed.insert({"p_star", "exponent"});
      break;
    case CurveFamily::kExample2:
      break;
  }
  for (const auto& [key, value] : j.items()) {
    if (!known.count(key)) throw ParameterError("$." + key + ": unknown key");
    if (!allowed.count(key)) {
      throw ParameterError("$." + key + ": not used by family " + std::string(to_string(spec.family)));
    }
    if (key == "family") continue;
    if (key == "exponent") {
      if (!value.is_number_integer()) throw ParameterError("$.exponent: expected an integer");
    } else if (!value.is_number()) {
      throw ParameterError("$." + key + ": expected a number");
    }
  }

  if (spec.family == CurveFamily::kRationalGlue && !j.contains("R0")) {
    throw ParameterError("$.R0: required for family rational_glue");
  }
  if (j.contains("R0")) {
    spec.R0 = j["R0"].get<double>();
    if (spec.family == CurveFamily::kRationalGlue && spec.R0 > 1.0) {
      spec.transition_hi = 1.0 - 1.0 / spec.R0;
      spec.transition_lo = std::max(0.0, spec.transition_hi - 0.1);
    }
  }
  if (j.contains("transition_lo")) spec.transition_lo = j["transition_lo"].get<double>();
  if (j.contains("transition_hi")) spec.transition_hi = j["transition_hi"].get<double>();
  if (j.contains("p_star")) spec.p_star = j["p_star"].get<double>();
  if (j.contains("exponent")) spec.exponent = j["exponent"].get<int>();
  spec.check();
  return spec;
}

json curve_spec_to_json(const CurveFamilySpec& spec) {
  json j = {{"family", to_string(spec.family)}};
  switch (spec.family) {
    case CurveFamily::kExample1:
    case CurveFamily::kRationalGlue:
      j["R0"] = spec.R0;
      j["transition_lo"] = spec.transition_lo;
      j["transition_hi"] = spec.transition_hi;
      break;
    case CurveFamily::kConvexTest:
      j["p_star"] = spec.p_star;
      j["exponent"] = spec.exponent;
      break;
    case CurveFamily::kExample2:
      break;
  }
  return j;
}

// ---------------------------------------------------------------------------
// Writers and readers

void write_validation_csv(std::ostream& os, const ValidationReport& report) {
  os << "assumption,name,passed,worst_violation,worst_at\n";
  for (const auto& c : report.checks) {
    os << c.index << ',' << c.name << ',' << (c.passed ? "true" : "false") << ','
       << format_real(c.worst_violation) << ',' << format_real(c.worst_at) << '\n';
  }
}

json validation_to_json(const ValidationReport& report) {
  json checks = json::array();
  for (const auto& c : report.checks) {
    checks.push_back({{"index", c.index},
                      {"name", c.name},
                      {"passed", c.passed},
                      {"worst_violation", c.worst_violation},
                      {"worst_at", c.worst_at}});
  }
  return {{"curve", report.curve_label},
          {"grid_n", report.grid_n},
          {"all_passed", report.all_passed()},
          {"assumptions", checks}};
}

void write_trajectory_csv(std::ostream& os, const Trajectory& traj) {
  os << "t,P\n";
  for (std::size_t i = 0; i < traj.times.size(); ++i) {
    os << format_real(traj.times[i]) << ',' << format_real(traj.states[i]) << '\n';
  }
}

json trajectory_to_json(const Trajectory& traj) {
  json samples = json::array();
  for (std::size_t i = 0; i < traj.times.size(); ++i) {
    samples.push_back({{"t", traj.times[i]}, {"P", traj.states[i]}});
  }
  return {{"curve", traj.curve_label},
          {"r", traj.params.r},
          {"eps", traj.params.eps},
          {"max_clamp", traj.max_clamp},
          {"samples", samples}};
}

void write_equilibria_csv(std::ostream& os, const EquilibriumSet& set) {
  os << "r,eps,P,f_prime,class\n";
  for (const auto& e : set.equilibria) {
    os << format_real(set.params.r) << ',' << format_real(set.params.eps) << ',' << format_real(e.P)
       << ',' << format_real(e.f_prime) << ',' << to_string(e.classification) << '\n';
  }
}

json equilibria_to_json(const EquilibriumSet& set) {
  json list = json::array();
  for (const auto& e : set.equilibria) {
    list.push_back({{"P", e.P}, {"f_prime", e.f_prime}, {"class", to_string(e.classification)}});
  }
  json j = {{"curve", set.curve_label}, {"r", set.params.r}, {"eps", set.params.eps}, {"equilibria", list}};
  if (set.continuum_beyond_cutoff) j["continuum_beyond_cutoff"] = true;
  return j;
}

EquilibriumSet equilibria_from_json(const json& j) {
  EquilibriumSet set;
  set.curve_label = j.at("curve").get<std::string>();
  set.params = {j.at("r").get<double>(), j.at("eps").get<double>()};
  for (const auto& e : j.at("equilibria")) {
    set.equilibria.push_back(
        {e.at("P").get<double>(), e.at("f_prime").get<double>(), parse_stability(e.at("class").get<std::string>())});
  }
  set.continuum_beyond_cutoff = j.value("continuum_beyond_cutoff", false);
  return set;
}

void write_diagram_csv(std::ostream& os, const Diagram& d, SweepTable table) {
  const std::string prefix = std::string(to_string(d.axis)) + ',' + format_real(d.fixed_value) + ',';
  if (table == SweepTable::kEvents) {
    os << "axis,fixed_value,param,P\n";
    for (const auto& e : d.events) os << prefix << format_real(e.param) << ',' << format_real(e.P) << '\n';
    return;
  }
  os << "axis,fixed_value,param,P,class\n";
  const auto& pts = table == SweepTable::kPoints ? d.points : d.closed_form;
  for (const auto& p : pts) {
    os << prefix << format_real(p.param) << ',' << format_real(p.P) << ',' << to_string(p.classification) << '\n';
  }
}

namespace {

json branch_points_to_json(const std::vector<BranchPoint>& pts, bool with_branch) {
  json a = json::array();
  for (const auto& p : pts) {
    json o = {{"param", p.param}, {"P", p.P}, {"class", to_string(p.classification)}};
    if (with_branch) o["branch"] = p.branch;
    if (p.on_boundary) o["on_boundary"] = true;
    a.push_back(std::move(o));
  }
  return a;
}

std::vector<BranchPoint> branch_points_from_json(const json& a) {
  std::vector<BranchPoint> out;
  for (const auto& o : a) {
    out.push_back({o.at("param").get<double>(), o.at("P").get<double>(),
                   parse_stability(o.at("class").get<std::string>()), o.value("branch", -1),
                   o.value("on_boundary", false)});
  }
  return out;
}

}  // namespace

json diagram_to_json(const Diagram& d) {
  json events = json::array();
  for (const auto& e : d.events) events.push_back({{"param", e.param}, {"P", e.P}, {"pair_gap", e.pair_gap}});
  return {{"axis", to_string(d.axis)},
          {"fixed_value", d.fixed_value},
          {"curve", d.curve_label},
          {"grid", d.grid},
          {"counts", d.counts},
          {"points", branch_points_to_json(d.points, true)},
          {"closed_form", branch_points_to_json(d.closed_form, false)},
          {"events", events}};
}

Diagram diagram_from_json(const json& j) {
  Diagram d;
  d.axis = parse_sweep_axis(j.at("axis").get<std::string>());
  d.fixed_value = j.at("fixed_value").get<double>();
  d.curve_label = j.at("curve").get<std::string>();
  d.grid = j.at("grid").get<std::vector<double>>();
  d.counts = j.at("counts").get<std::vector<int>>();
  d.points = branch_points_from_json(j.at("points"));
  d.closed_form = branch_points_from_json(j.at("closed_form"));
  for (const auto& e : j.at("events")) d.events.push_back(
        {e.at("param").get<double>(), e.at("P").get<double>(), e.at("pair_gap").get<double>()});
  return d;
}

void write_tangency_csv(std::ostream& os, const TangencyCurve& t) {
  os << "P,eps,r,feasible\n";
  for (const auto& p : t.points) {
    os << format_real(p.P) << ',' << format_real(p.eps) << ',' << format_real(p.r) << ','
       << (p.feasible ? "true" : "false") << '\n';
  }
}

json tangency_to_json(const TangencyCurve& t, std::string_view curve_label) {
  json pts = json::array();
  for (const auto& p : t.points) pts.push_back({{"P", p.P}, {"eps", p.eps}, {"r", p.r}, {"feasible", p.feasible}});
  return {{"curve", curve_label}, {"skipped", t.skipped}, {"points", pts}};
}

TangencyCurve tangency_from_json(const json& j) {
  TangencyCurve t;
  t.skipped = j.at("skipped").get<int>();
  for (const auto& p : j.at("points")) {
    t.points.push_back({p.at("P").get<double>(), p.at("eps").get<double>(), p.at("r").get<double>(),
                        p.at("feasible").get<bool>()});
  }
  return t;
}

void write_surface_csv(std::ostream& os, const std::vector<SurfaceSample>& s) {
  os << "P,eps,r\n";
  for (const auto& x : s) os << format_real(x.P) << ',' << format_real(x.eps) << ',' << format_real(x.r) << '\n';
}

json surface_to_json(const std::vector<SurfaceSample>& s, std::string_view curve_label) {
  json a = json::array();
  for (const auto& x : s) a.push_back({{"P", x.P}, {"eps", x.eps}, {"r", x.r}});
  return {{"curve", curve_label}, {"samples", a}};
}

std::vector<SurfaceSample> surface_from_json(const json& j) {
  std::vector<SurfaceSample> out;
  for (const auto& x : j.at("samples")) {
    out.push_back({x.at("P").get<double>(), x.at("eps").get<double>(), x.at("r").get<double>()});
  }
  return out;
}

// ---------------------------------------------------------------------------
// RunConfig

void RunConfig::check() const {
  curve.check();
  if (!(quadrature_tol > 0.0)) throw ParameterError("--quad-tol must be positive");
  if (!(eps >= 0.0 && eps <= 1.0)) throw ParameterError("--eps must lie in [0, 1]");
  switch (command) {
    case Command::kEquilibria:
      if (!(r >= 0.0 && r < 1.0)) throw ParameterError("--r must lie in [0, 1)");
      break;
    case Command::kTrajectory:
    case Command::kSweepEps:
      if (!(r > 0.0 && r < 1.0)) throw ParameterError("--r must lie in (0, 1)");
      break;
    default:
      break;
  }
  const int min_grid = command == Command::kValidate ? 16 : 64;
  if (grid_n && *grid_n < min_grid) {
    throw ParameterError("--grid-n must be >= " + std::to_string(min_grid));
  }
  if (!(tol > 0.0)) throw ParameterError("--tol must be positive");
  if (!(degeneracy_tol > 0.0)) throw ParameterError("--degeneracy-tol must be positive");
  if (command == Command::kTrajectory) {
    if (!(p0 >= 0.0 && p0 <= 1.0)) throw ParameterError("--p0 must lie in [0, 1]");
    if (!(t_end > 0.0)) throw ParameterError("--t-end must be positive");
    if (!(dt > 0.0)) throw ParameterError("--dt must be positive");
  }
  if (samples < 2) throw ParameterError("--samples must be >= 2");
  if (p_samples < 1) throw ParameterError("--p-samples must be >= 1");
  if (eps_samples < 2) throw ParameterError("--eps-samples must be >= 2");
  if (threads < 1) throw ParameterError("--threads must be >= 1");
  const double lo = range_min.value_or(0.0), hi = range_max.value_or(1.0);
  if (!(lo < hi)) throw ParameterError("--min must be below --max");
  if (command == Command::kSweepR && (lo < 0.0 || hi > 1.0 || (range_min && lo == 0.0) || (range_max && hi == 1.0))) {
    throw ParameterError("sweep-r range must lie inside (0, 1)");
  }
  if (command == Command::kSweepEps && (lo < 0.0 || hi > 1.0)) {
    throw ParameterError("sweep-eps range must lie inside [0, 1]");
  }
}

json RunConfig::to_json() const {
  json j = {{"command", to_string(command)},
            {"curve", curve_spec_to_json(curve)},
            {"r", r},
            {"eps", eps},
            {"quad_tol", quadrature_tol},
            {"tol", tol},
            {"degeneracy_tol", degeneracy_tol},
            {"samples", samples},
            {"p_samples", p_samples},
            {"eps_samples", eps_samples},
            {"threads", threads},
            {"format", format == OutputFormat::kCsv ? "csv" : "json"},
            {"table", to_string(table)},
            {"out", out_path}};
  if (grid_n) j["grid_n"] = *grid_n;
  if (range_min) j["min"] = *range_min;
  if (range_max) j["max"] = *range_max;
  if (command == Command::kTrajectory) {
    j["p0"] = p0;
    j["t_end"] = t_end;
    j["dt"] = dt;
  }
  return j;
}

// ---------------------------------------------------------------------------
// run

namespace {

// Writes the command's output to `os`. Returns false when a validate run
// found a failed assumption.
bool execute(const RunConfig& cfg, std::ostream& os) {
  const GlueKernel kernel(cfg.quadrature_tol);
  const PayoffCurve curve = make_curve(cfg.curve, kernel);
  const bool csv = cfg.format == OutputFormat::kCsv;
  const ModelParams params{cfg.r, cfg.eps};

  SolverOptions solver;
  solver.grid_n = cfg.grid_n.value_or(solver.grid_n);
  solver.tol = cfg.tol;
  solver.degeneracy_tol = cfg.degeneracy_tol;
  SweepOptions sweep;
  sweep.solver = solver;
  sweep.p_samples = cfg.p_samples;
  sweep.threads = cfg.threads;

  auto emit_json = [&os](const json& j) { os << j.dump(2) << '\n'; };

  switch (cfg.command) {
    case Command::kValidate: {
      const auto report = validate(curve, cfg.grid_n.value_or(1024));
      if (csv) write_validation_csv(os, report);
      else emit_json(validation_to_json(report));
      return report.all_passed();
    }
    case Command::kEquilibria: {
      const auto set = find_all(curve, params, solver);
      if (csv) write_equilibria_csv(os, set);
      else emit_json(equilibria_to_json(set));
      return true;
    }
    case Command::kTrajectory: {
      const auto traj = integrate(curve, params, cfg.p0, cfg.t_end, cfg.dt);
      if (csv) write_trajectory_csv(os, traj);
      else emit_json(trajectory_to_json(traj));
      return true;
    }
    case Command::kSweepR:
    case Command::kSweepEps: {
      const bool is_r = cfg.command == Command::kSweepR;
      std::vector<double> grid;
      if (cfg.range_min || cfg.range_max) {
        grid = linear_grid(cfg.range_min.value_or(is_r ? 1e-3 : 0.0), cfg.range_max.value_or(is_r ? 1.0 - 1e-3 : 1.0),
                           cfg.samples);
      } else {
        grid = is_r ? interior_grid(0.0, 1.0, cfg.samples) : linear_grid(0.0, 1.0, cfg.samples);
      }
      const Diagram d = is_r ? sweep_r(curve, cfg.eps, grid, sweep) : sweep_eps(curve, cfg.r, grid, sweep);
      if (csv) write_diagram_csv(os, d, cfg.table);
      else emit_json(diagram_to_json(d));
      return true;
    }
    case Command::kTangency: {
      const auto t = tangency_curve(curve, interior_grid(0.0, curve.p_star(), cfg.p_samples));
      if (csv) write_tangency_csv(os, t);
      else emit_json(tangency_to_json(t, curve.label()));
      return true;
    }
    case Command::kSurface: {
      const auto s = surface(curve, interior_grid(0.0, curve.p_star(), cfg.p_samples),
                             linear_grid(0.0, 1.0, cfg.eps_samples));
      if (csv) write_surface_csv(os, s);
      else emit_json(surface_to_json(s, curve.label()));
      return true;
    }
  }
  return true;
}

}  // namespace

int run(const RunConfig& config, std::ostream& out, std::ostream& err) {
  const auto start = std::chrono::steady_clock::now();
  try {
    config.check();
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }

  std::ofstream file;
  if (!config.out_path.empty()) {
    file.open(config.out_path, std::ios::out | std::ios::trunc);
    if (!file) {
      err << "error: cannot write output file '" << config.out_path << "'\n";
      return 1;
    }
  }

  std::ostringstream buffer;
  bool passed = true;
  try {
    passed = execute(config, buffer);
  } catch (const ParameterError& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  } catch (const PreconditionError& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    err << "numerical failure: " << e.what() << '\n';
    return 2;
  }

  if (config.out_path.empty()) {
    out << buffer.str();
  } else {
    file << buffer.str();
    file.close();
    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const json meta = {{"tool", "vaxgame"},
                       {"version", kToolVersion},
                       {"config", config.to_json()},
                       {"wall_time_s", wall}};
    std::ofstream side(config.out_path + ".meta.json");
    if (!side) {
      err << "error: cannot write metadata sidecar for '" << config.out_path << "'\n";
      return 1;
    }
    side << meta.dump(2) << '\n';
  }
  if (!passed) {
    err << "validation failed: curve violates at least one standing assumption\n";
    return 1;
  }
  return 0;
}

// ---------------------------------------------------------------------------
// cli_main

int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Adaptive dynamics of the vaccination game: equilibria, trajectories and bifurcations"};
  app.set_version_flag("--version", std::string(kToolVersion));
  app.require_subcommand(1, 1);

  RunConfig cfg;
  std::string curve_name = "example1";
  std::string curve_json;
  std::optional<double> R0, t_lo, t_hi, p_star;
  std::optional<int> exponent;
  std::string format = "csv";
  std::string table = "points";
  double r = cfg.r, eps = cfg.eps;
  std::optional<int> grid_n;

  const std::map<std::string, std::string> descriptions = {
      {"validate", "check a curve against the standing assumptions"},
      {"equilibria", "locate and classify every equilibrium"},
      {"trajectory", "integrate P(t) with fixed-step RK4"},
      {"sweep-r", "bifurcation diagram in the relative risk r"},
      {"sweep-eps", "bifurcation diagram in the deviating fraction eps"},
      {"tangency", "closed-form saddle-node (tangency) curve"},
      {"surface", "equilibrium surface samples (P, eps, r)"},
  };

  for (const auto& [cmd, name] : kCommandNames) {
    auto* sub = app.add_subcommand(std::string(name), descriptions.at(std::string(name)));
    sub->add_option("--curve", curve_name, "example1 | example2 | convex-test | rational-glue");
    sub->add_option("--curve-json", curve_json, "curve spec as JSON text, or @path to a JSON file");
    sub->add_option("--R0", R0, "basic reproductive ratio");
    sub->add_option("--transition-lo", t_lo, "start of the gluing transition");
    sub->add_option("--transition-hi", t_hi, "end of the gluing transition (the cutoff)");
    sub->add_option("--p-star", p_star, "cutoff of the convex test curve");
    sub->add_option("--exponent", exponent, "exponent of the convex test curve");
    sub->add_option("--quad-tol", cfg.quadrature_tol, "quadrature absolute tolerance");
    sub->add_option("--out,-o", cfg.out_path, "output file (default: stdout, no sidecar)");
    sub->add_option("--format", format, "csv | json")->check(CLI::IsMember({"csv", "json"}));
    sub->add_option("--grid-n", grid_n, "grid intervals (validate: 1024, solver: 2048)");

    if (cmd == Command::kValidate || cmd == Command::kTangency || cmd == Command::kSurface) {
      if (cmd != Command::kValidate) sub->add_option("--p-samples", cfg.p_samples, "P samples on (0, p*)");
      if (cmd == Command::kSurface) sub->add_option("--eps-samples", cfg.eps_samples, "eps samples on [0, 1]");
    } else {
      sub->add_option("--tol", cfg.tol, "root tolerance");
      sub->add_option("--degeneracy-tol", cfg.degeneracy_tol, "|f'| below which a root is degenerate");
      if (cmd != Command::kSweepR) sub->add_option("--r", r, "relative risk");
      if (cmd != Command::kSweepEps) sub->add_option("--eps", eps, "deviating fraction");
    }
    if (cmd == Command::kTrajectory) {
      sub->add_option("--p0", cfg.p0, "initial state");
      sub->add_option("--t-end", cfg.t_end, "horizon");
      sub->add_option("--dt", cfg.dt, "step");
    }
    if (cmd == Command::kSweepR || cmd == Command::kSweepEps) {
      sub->add_option("--min", cfg.range_min, "first parameter value");
      sub->add_option("--max", cfg.range_max, "last parameter value");
      sub->add_option("--samples", cfg.samples, "parameter samples");
      sub->add_option("--p-samples", cfg.p_samples, "closed-form P samples on (0, p*)");
      sub->add_option("--table", table, "CSV table: points | closed-form | events")
          ->check(CLI::IsMember({"points", "closed-form", "events"}));
      sub->add_option("--threads", cfg.threads, "worker threads")->default_val(std::thread::hardware_concurrency());
    }
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 1;
  }

  try {
    for (const auto& [cmd, name] : kCommandNames) {
      if (app.got_subcommand(std::string(name))) cfg.command = cmd;
    }
    if (!curve_json.empty()) {
      std::string text = curve_json;
      if (text.front() == '@') {
        std::ifstream in(text.substr(1));
        if (!in) throw ParameterError("cannot read curve spec file '" + text.substr(1) + "'");
        text.assign(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
      }
      cfg.curve = parse_curve_spec(text);
    } else {
      cfg.curve = CurveFamilySpec::defaults(parse_curve_family(curve_name));
      if (R0) {
        cfg.curve.R0 = *R0;
        if (cfg.curve.family == CurveFamily::kRationalGlue && *R0 > 1.0) {
          cfg.curve.transition_hi = 1.0 - 1.0 / *R0;
          cfg.curve.transition_lo = std::max(0.0, cfg.curve.transition_hi - 0.1);
        }
      }
      if (t_lo) cfg.curve.transition_lo = *t_lo;
      if (t_hi) cfg.curve.transition_hi = *t_hi;
      if (p_star) cfg.curve.p_star = *p_star;
      if (exponent) cfg.curve.exponent = *exponent;
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  cfg.r = r;
  cfg.eps = eps;
  cfg.grid_n = grid_n;
  cfg.format = format == "json" ? OutputFormat::kJson : OutputFormat::kCsv;
  cfg.table = table == "events" ? SweepTable::kEvents
              : table == "closed-form" ? SweepTable::kClosedForm
                                       : SweepTable::kPoints;
  cfg.threads = std::max(1, cfg.threads);
  return run(cfg, out, err);
}

}  // namespace vaxgame
