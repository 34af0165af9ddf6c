#pragma once

// Command-line surface and CSV/JSON serialization.

#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "vaxgame/adaptive_dynamics.hpp"
#include "vaxgame/bifurcation.hpp"
#include "vaxgame/equilibrium_solver.hpp"
#include "vaxgame/payoff_curves.hpp"

namespace vaxgame {

inline constexpr std::string_view kToolVersion = "1.0.0";

enum class Command { kValidate, kEquilibria, kTrajectory, kSweepR, kSweepEps, kTangency, kSurface };
enum class OutputFormat { kCsv, kJson };
// Which table of a sweep goes to a CSV file. JSON always carries all three.
enum class SweepTable { kPoints, kClosedForm, kEvents };

std::string_view to_string(Command c);
Command parse_command(std::string_view text);

struct RunConfig {
  Command command = Command::kEquilibria;
  CurveFamilySpec curve = CurveFamilySpec::defaults(CurveFamily::kExample1);
  double r = 0.5;
  double eps = 0.0;
  double quadrature_tol = GlueKernel::kDefaultTolerance;

  // Unset grid_n means the command's default: 1024 for validate, 2048 for
  // solving.
  std::optional<int> grid_n;
  double tol = 1e-12;
  double degeneracy_tol = 1e-8;

  double p0 = 0.5;
  double t_end = kDefaultHorizon;
  double dt = kDefaultStep;

  // Sweep range; unset means (0, 1) sampled at interior points for r and
  // [0, 1] inclusive for eps.
  std::optional<double> range_min;
  std::optional<double> range_max;
  int samples = 500;
  int p_samples = 2000;
  int eps_samples = 101;  // surface only
  SweepTable table = SweepTable::kPoints;
  int threads = 1;

  std::string out_path;  // empty: write to the given stream, no sidecar
  OutputFormat format = OutputFormat::kCsv;

  // Throws ParameterError describing the first invalid field.
  void check() const;
  nlohmann::json to_json() const;
};

/// Strict JSON parsing of a curve selection. Unknown keys and keys that the
/// family does not use are rejected; messages carry the field path ("$.R0").
/// Family defaults fill omitted fields.
CurveFamilySpec parse_curve_spec(std::string_view json_text);
nlohmann::json curve_spec_to_json(const CurveFamilySpec& spec);

// %.17g
std::string format_real(double v);

void write_validation_csv(std::ostream& os, const ValidationReport& report);
nlohmann::json validation_to_json(const ValidationReport& report);

void write_trajectory_csv(std::ostream& os, const Trajectory& traj);
nlohmann::json trajectory_to_json(const Trajectory& traj);

void write_equilibria_csv(std::ostream& os, const EquilibriumSet& set);
nlohmann::json equilibria_to_json(const EquilibriumSet& set);
EquilibriumSet equilibria_from_json(const nlohmann::json& j);

void write_diagram_csv(std::ostream& os, const Diagram& d, SweepTable table);
nlohmann::json diagram_to_json(const Diagram& d);
// Restores axis, fixed_value, points, closed_form and events; the curve and
// solver settings are not serialized.
Diagram diagram_from_json(const nlohmann::json& j);

void write_tangency_csv(std::ostream& os, const TangencyCurve& t);
nlohmann::json tangency_to_json(const TangencyCurve& t, std::string_view curve_label);
TangencyCurve tangency_from_json(const nlohmann::json& j);

void write_surface_csv(std::ostream& os, const std::vector<SurfaceSample>& s);
nlohmann::json surface_to_json(const std::vector<SurfaceSample>& s, std::string_view curve_label);
std::vector<SurfaceSample> surface_from_json(const nlohmann::json& j);

/// Executes one command. Output goes to config.out_path (plus a sidecar
/// "<out_path>.meta.json"), or to `out` when out_path is empty. Errors are
/// written to `err`. Returns 0 on success, 1 on invalid input or a failed
/// validation, 2 on numerical failure.
int run(const RunConfig& config, std::ostream& out, std::ostream& err);

// Parses argv with CLI11 and calls run(). Returns the process exit status.
int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace vaxgame
