#pragma once

// Smooth infection-probability curves π(p) and the bump-kernel gluing
// machinery used to cut them off at the herd-immunity coverage p*.

#include <array>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

namespace vaxgame {

// exp(1/(t^2 - 1)) on (-1, 1), zero elsewhere.
double bump(double t);

// Analytic derivative of bump: bump(t) * (-2t) / (t^2 - 1)^2.
double bump_derivative(double t);

/// Primitive of the bump kernel, H(x) = ∫_{-1}^{x} bump(t) dt, and the
/// normalized switch g(x) = H(2x - 1) / H(1).
///
/// H is evaluated by adaptive Simpson quadrature. The constructor integrates
/// the kernel once over a fixed partition of [-1, 0] and caches the partial
/// sums; each later call integrates only the last partial cell. Values on
/// (0, 1) use the even symmetry H(x) = H(1) - H(-x). The object is immutable
/// after construction and can be shared across threads.
class GlueKernel {
 public:
  static constexpr double kDefaultTolerance = 1e-12;
  static constexpr int kMaxDepth = 60;

  explicit GlueKernel(double quadrature_abs_tol = kDefaultTolerance);

  // H(x). Returns 0 for x <= -1 and H(1) for x >= 1.
  double primitive(double x) const;

  // g(x) = H(2x - 1) / H(1): 0 for x <= 0, 1 for x >= 1.
  double glue(double x) const;
  double glue_derivative(double x) const;
  double glue_second_derivative(double x) const;

  double full_integral() const { return h1_; }
  double quadrature_abs_tol() const { return tol_; }

 private:
  static constexpr int kCells = 32;

  double integrate(double a, double b) const;

  double tol_;
  double h1_ = 0.0;
  // cumulative_[k] = H(-1 + k / kCells), k = 0..kCells.
  std::array<double, kCells + 1> cumulative_{};
};

// Value, first and second derivative of a curve at one point.
struct CurveJet {
  double value = 0.0;
  double slope = 0.0;
  double curvature = 0.0;
};

/// Infection probability π(p) with analytic π' and π''. The curve is
/// identically zero for p >= p_star; evaluation there returns an exact zero
/// jet. `breakpoints` lists coverages where the construction switches pieces
/// (transition endpoints, cutoff); finite-difference checks stay clear of
/// them.
class PayoffCurve {
 public:
  using Evaluator = std::function<CurveJet(double)>;

  PayoffCurve(std::string label, double p_star, Evaluator evaluator,
              std::vector<double> breakpoints = {});

  CurveJet jet(double p) const;
  double pi(double p) const { return jet(p).value; }
  double dpi(double p) const { return jet(p).slope; }
  double d2pi(double p) const { return jet(p).curvature; }

  double p_star() const { return p_star_; }
  const std::string& label() const { return label_; }
  const std::vector<double>& breakpoints() const { return breakpoints_; }

 private:
  std::string label_;
  double p_star_;
  Evaluator evaluator_;
  std::vector<double> breakpoints_;
};

enum class CurveFamily { kExample1, kExample2, kConvexTest, kRationalGlue };

std::string_view to_string(CurveFamily family);
// Accepts the snake_case names and their dashed spellings ("convex-test").
CurveFamily parse_curve_family(std::string_view name);

/// Selects and parameterizes a curve family. Fields that do not apply to the
/// chosen family are ignored by make_curve.
struct CurveFamilySpec {
  CurveFamily family = CurveFamily::kExample1;
  double R0 = 5.0;
  double transition_lo = 0.7;
  double transition_hi = 0.8;
  double p_star = 0.8;  // convex_test only
  int exponent = 3;     // convex_test only

  // Default spec for a family: example1 uses R0 = 5 on [0.7, 0.8];
  // example2 glues on [7/16, 9/16]; rational_glue puts the transition on
  // [1 - 1/R0 - 0.1, 1 - 1/R0]; convex_test uses p_star 0.8, exponent 3.
  static CurveFamilySpec defaults(CurveFamily family);

  // Throws ParameterError naming the offending field.
  void check() const;
};

// Normalized rational factor (R0(1-p) - 1) / ((R0 - 1)(1 - p)) glued to zero
// over [0.7, 0.8]. Equals 1 at p = 0 and vanishes from p* = 4/5 on.
PayoffCurve make_example1(const GlueKernel& kernel);

// (1/3) ((1 - 2p)^3 + 2) glued to zero over [7/16, 9/16], p* = 9/16.
PayoffCurve make_example2(const GlueKernel& kernel);

// ((1 - p/p_star)_+)^exponent. Convex, C^{exponent-1}.
PayoffCurve make_convex_test(double p_star, int exponent);

// Normalized rational factor with reproductive ratio R0, glued over
// [transition_lo, transition_hi]; requires transition_hi <= 1 - 1/R0.
PayoffCurve make_rational_glue(const GlueKernel& kernel, double R0,
                               double transition_lo, double transition_hi);

PayoffCurve make_curve(const CurveFamilySpec& spec, const GlueKernel& kernel);

struct AssumptionCheck {
  int index = 0;  // 1..5
  std::string name;
  bool passed = false;
  double worst_violation = 0.0;
  double worst_at = 0.0;  // coverage where the worst violation occurred
};

struct ValidationReport {
  std::string curve_label;
  int grid_n = 0;
  std::array<AssumptionCheck, 5> checks;

  bool all_passed() const;
  const AssumptionCheck& assumption(int index) const { return checks.at(index - 1); }
};

/// Checks the standing assumptions on a uniform grid of grid_n + 1 points:
///   1 smooth: supplied π' matches a central difference of π, and π'' a
///     central difference of π', to relative error 1e-5, at points at least
///     1e-3 away from every breakpoint;
///   2 range: 0 <= π <= 1;
///   3 monotone: π' <= 1e-12 and π(p_{i+1}) <= π(p_i);
///   4 π(0) = 1;
///   5 π = 0 exactly for p >= p_star, with p_star in (0, 1).
/// Failures are reported, never thrown. grid_n must be >= 16.
ValidationReport validate(const PayoffCurve& curve, int grid_n = 1024);

// Grid test d2pi >= -1e-12 on [0, p_star].
bool is_convex(const PayoffCurve& curve, int grid_n = 2048);

}  // namespace vaxgame
