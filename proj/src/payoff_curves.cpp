#include "vaxgame/payoff_curves.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <utility>

#include "vaxgame/errors.hpp"

namespace vaxgame {

double bump(double t) {
  if (!(std::abs(t) < 1.0)) return 0.0;
  return std::exp(1.0 / (t * t - 1.0));
}

double bump_derivative(double t) {
  const double b = bump(t);
  if (b == 0.0) return 0.0;
  const double q = t * t - 1.0;
  return b * (-2.0 * t) / (q * q);
}

namespace {

struct SimpsonPanel {
  double a, b;
  double fa, fm, fb;
  double whole;
};

// Caps the work of one adaptive call; an unreachable tolerance would otherwise
// split every panel down to max_depth.
constexpr long kEvalBudget = 1'000'000;

double adaptive_simpson(const SimpsonPanel& p, double tol, int depth, int max_depth, long& evals) {
  const double m = 0.5 * (p.a + p.b);
  const double lm = 0.5 * (p.a + m);
  const double rm = 0.5 * (m + p.b);
  const double flm = bump(lm);
  const double frm = bump(rm);
  const double left = (m - p.a) / 6.0 * (p.fa + 4.0 * flm + p.fm);
  const double right = (p.b - m) / 6.0 * (p.fm + 4.0 * frm + p.fb);
  evals += 2;
  const double delta = left + right - p.whole;
  if (std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
  if (depth >= max_depth || evals >= kEvalBudget) {
    throw QuadratureError("adaptive Simpson: tolerance " + std::to_string(tol) +
                          " not met on [" + std::to_string(p.a) + ", " +
                          std::to_string(p.b) + "] at depth " + std::to_string(depth));
  }
  const double lhs = adaptive_simpson({p.a, m, p.fa, flm, p.fm, left}, 0.5 * tol, depth + 1, max_depth, evals);
  return lhs + adaptive_simpson({m, p.b, p.fm, frm, p.fb, right}, 0.5 * tol, depth + 1, max_depth, evals);
}

}  // namespace

GlueKernel::GlueKernel(double quadrature_abs_tol) : tol_(quadrature_abs_tol) {
  if (!(tol_ > 0.0) || !std::isfinite(tol_)) {
    throw ParameterError("quadrature_abs_tol must be positive, got " + std::to_string(tol_));
  }
  const double cell_tol = 0.5 * tol_ / kCells;
  cumulative_[0] = 0.0;
  for (int k = 0; k < kCells; ++k) {
    const double a = -1.0 + static_cast<double>(k) / kCells;
    const double b = -1.0 + static_cast<double>(k + 1) / kCells;
    const double fa = bump(a), fb = bump(b), fm = bump(0.5 * (a + b));
    const double coarse = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    long evals = 0;
    cumulative_[k + 1] =
        cumulative_[k] + adaptive_simpson({a, b, fa, fm, fb, coarse}, cell_tol, 0, kMaxDepth, evals);
  }
  h1_ = 2.0 * cumulative_[kCells];
}

double GlueKernel::integrate(double a, double b) const {
  if (b <= a) return 0.0;
  const double fa = bump(a), fb = bump(b), fm = bump(0.5 * (a + b));
  const double coarse = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  long evals = 0;
  return adaptive_simpson({a, b, fa, fm, fb, coarse}, 0.5 * tol_, 0, kMaxDepth, evals);
}

double GlueKernel::primitive(double x) const {
  if (x <= -1.0) return 0.0;
  if (x >= 1.0) return h1_;
  if (x > 0.0) return h1_ - primitive(-x);
  const double s = (x + 1.0) * kCells;
  const int k = std::min(static_cast<int>(s), kCells);
  const double node = -1.0 + static_cast<double>(k) / kCells;
  return cumulative_[k] + integrate(node, x);
}

double GlueKernel::glue(double x) const {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  return primitive(2.0 * x - 1.0) / h1_;
}

double GlueKernel::glue_derivative(double x) const {
  return 2.0 * bump(2.0 * x - 1.0) / h1_;
}

double GlueKernel::glue_second_derivative(double x) const {
  return 4.0 * bump_derivative(2.0 * x - 1.0) / h1_;
}

PayoffCurve::PayoffCurve(std::string label, double p_star, Evaluator evaluator,
                         std::vector<double> breakpoints)
    : label_(std::move(label)),
      p_star_(p_star),
      evaluator_(std::move(evaluator)),
      breakpoints_(std::move(breakpoints)) {
  if (!(p_star_ > 0.0 && p_star_ < 1.0)) {
    throw ParameterError("p_star must lie in (0, 1), got " + std::to_string(p_star_));
  }
  if (!evaluator_) throw ParameterError("payoff curve needs an evaluator");
}

CurveJet PayoffCurve::jet(double p) const {
  if (p >= p_star_) return {};
  return evaluator_(p);
}

namespace {

// base(p) * (1 - g((p - lo) / (hi - lo))), product and chain rule.
template <class Base>
PayoffCurve glued(std::string label, const GlueKernel& kernel, double lo, double hi, Base base) {
  const double scale = 1.0 / (hi - lo);
  auto eval = [kernel, lo, scale, base](double p) {
    const CurveJet b = base(p);
    const double s = (p - lo) * scale;
    if (s <= 0.0) return b;
    const double cut = 1.0 - kernel.glue(s);
    const double dcut = -kernel.glue_derivative(s) * scale;
    const double d2cut = -kernel.glue_second_derivative(s) * scale * scale;
    return CurveJet{b.value * cut,
                    b.slope * cut + b.value * dcut,
                    b.curvature * cut + 2.0 * b.slope * dcut + b.value * d2cut};
  };
  return PayoffCurve(std::move(label), hi, std::move(eval), {lo, hi});
}

auto normalized_rational(double R0) {
  return [R0](double p) {
    const double q = 1.0 - p;
    const double c = 1.0 / (R0 - 1.0);
    return CurveJet{(R0 * q - 1.0) * c / q, -c / (q * q), -2.0 * c / (q * q * q)};
  };
}

}  // namespace

PayoffCurve make_example1(const GlueKernel& kernel) {
  return glued("example1", kernel, 0.7, 0.8, normalized_rational(5.0));
}

PayoffCurve make_example2(const GlueKernel& kernel) {
  auto cubic = [](double p) {
    const double u = 1.0 - 2.0 * p;
    return CurveJet{(u * u * u + 2.0) / 3.0, -2.0 * u * u, 8.0 * u};
  };
  return glued("example2", kernel, 7.0 / 16.0, 9.0 / 16.0, cubic);
}

PayoffCurve make_convex_test(double p_star, int exponent) {
  if (!(p_star > 0.0 && p_star < 1.0)) {
    throw ParameterError("convex_test: p_star must lie in (0, 1), got " + std::to_string(p_star));
  }
  if (exponent < 2) {
    throw ParameterError("convex_test: exponent must be >= 2, got " + std::to_string(exponent));
  }
  const double k = exponent;
  auto eval = [p_star, exponent, k](double p) {
    const double u = 1.0 - p / p_star;
    const double u_k2 = std::pow(u, exponent - 2);
    return CurveJet{u_k2 * u * u, -k / p_star * u_k2 * u, k * (k - 1.0) / (p_star * p_star) * u_k2};
  };
  return PayoffCurve("convex_test", p_star, std::move(eval), {p_star});
}

PayoffCurve make_rational_glue(const GlueKernel& kernel, double R0, double transition_lo,
                               double transition_hi) {
  CurveFamilySpec spec{CurveFamily::kRationalGlue, R0, transition_lo, transition_hi};
  spec.check();
  return glued("rational_glue", kernel, transition_lo, transition_hi, normalized_rational(R0));
}

std::string_view to_string(CurveFamily family) {
  switch (family) {
    case CurveFamily::kExample1: return "example1";
    case CurveFamily::kExample2: return "example2";
    case CurveFamily::kConvexTest: return "convex_test";
    case CurveFamily::kRationalGlue: return "rational_glue";
  }
  return "unknown";
}

CurveFamily parse_curve_family(std::string_view name) {
  std::string key(name);
  std::replace(key.begin(), key.end(), '-', '_');
  for (auto f : {CurveFamily::kExample1, CurveFamily::kExample2, CurveFamily::kConvexTest,
                 CurveFamily::kRationalGlue}) {
    if (key == to_string(f)) return f;
  }
  throw ParameterError("unknown curve family '" + std::string(name) +
                       "' (expected example1, example2, convex_test or rational_glue)");
}

CurveFamilySpec CurveFamilySpec::defaults(CurveFamily family) {
  CurveFamilySpec spec;
  spec.family = family;
  switch (family) {
    case CurveFamily::kExample1:
      break;
    case CurveFamily::kExample2:
      spec.transition_lo = 7.0 / 16.0;
      spec.transition_hi = 9.0 / 16.0;
      break;
    case CurveFamily::kConvexTest:
      break;
    case CurveFamily::kRationalGlue:
      spec.transition_hi = 1.0 - 1.0 / spec.R0;
      spec.transition_lo = spec.transition_hi - 0.1;
      break;
  }
  return spec;
}

void CurveFamilySpec::check() const {
  auto fail = [](const std::string& field, const std::string& what) {
    throw ParameterError("$." + field + ": " + what);
  };
  if (family == CurveFamily::kConvexTest) {
    if (!(p_star > 0.0 && p_star < 1.0)) fail("p_star", "must lie in (0, 1)");
    if (exponent < 2) fail("exponent", "must be an integer >= 2");
    return;
  }
  if (!(transition_lo >= 0.0 && transition_lo < transition_hi && transition_hi <= 1.0)) {
    fail("transition_lo", "need 0 <= transition_lo < transition_hi <= 1");
  }
  if (!(transition_hi < 1.0)) fail("transition_hi", "the cutoff must lie below 1");
  if (family == CurveFamily::kExample2) return;
  if (!(R0 > 1.0) || !std::isfinite(R0)) fail("R0", "must be > 1");
  // The rational factor turns negative past 1 - 1/R0.
  if (transition_hi > 1.0 - 1.0 / R0 + 1e-12) {
    fail("transition_hi", "must not exceed 1 - 1/R0 = " + std::to_string(1.0 - 1.0 / R0));
  }
}

PayoffCurve make_curve(const CurveFamilySpec& spec, const GlueKernel& kernel) {
  spec.check();
  switch (spec.family) {
    case CurveFamily::kExample1:
      if (spec.R0 == 5.0 && spec.transition_lo == 0.7 && spec.transition_hi == 0.8) {
        return make_example1(kernel);
      }
      return glued("example1", kernel, spec.transition_lo, spec.transition_hi,
                   normalized_rational(spec.R0));
    case CurveFamily::kExample2:
      return make_example2(kernel);
    case CurveFamily::kConvexTest:
      return make_convex_test(spec.p_star, spec.exponent);
    case CurveFamily::kRationalGlue:
      return make_rational_glue(kernel, spec.R0, spec.transition_lo, spec.transition_hi);
  }
  throw ParameterError("unhandled curve family");
}

bool ValidationReport::all_passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.passed; });
}

ValidationReport validate(const PayoffCurve& curve, int grid_n) {
  if (grid_n < 16) throw ParameterError("validate: grid_n must be >= 16");
  constexpr double kRelTol = 1e-5;
  constexpr double kClearance = 1e-3;
  constexpr double kStep = 1e-6;
  constexpr double kSlopeTol = 1e-12;

  ValidationReport report;
  report.curve_label = curve.label();
  report.grid_n = grid_n;
  const char* names[] = {"smooth", "range", "monotone", "pi(0)=1", "cutoff"};
  for (int i = 0; i < 5; ++i) {
    report.checks[i].index = i + 1;
    report.checks[i].name = names[i];
  }
  auto record = [&](int index, double violation, double at) {
    auto& c = report.checks[index - 1];
    if (violation > c.worst_violation) {
      c.worst_violation = violation;
      c.worst_at = at;
    }
  };

  const auto& bps = curve.breakpoints();
  auto clear_of_breakpoints = [&](double p) {
    return std::none_of(bps.begin(), bps.end(), [p](double b) { return std::abs(p - b) < kClearance; });
  };

  double prev_value = 0.0;
  for (int i = 0; i <= grid_n; ++i) {
    const double p = static_cast<double>(i) / grid_n;
    const CurveJet j = curve.jet(p);

    if (clear_of_breakpoints(p)) {
      const double fd1 = (curve.pi(p + kStep) - curve.pi(p - kStep)) / (2.0 * kStep);
      const double fd2 = (curve.dpi(p + kStep) - curve.dpi(p - kStep)) / (2.0 * kStep);
      record(1, std::abs(fd1 - j.slope) / std::max(1.0, std::abs(j.slope)) / kRelTol, p);
      record(1, std::abs(fd2 - j.curvature) / std::max(1.0, std::abs(j.curvature)) / kRelTol, p);
    }
    if (!std::isfinite(j.value)) record(2, std::numeric_limits<double>::infinity(), p);
    record(2, std::max(-j.value, j.value - 1.0), p);
    record(3, j.slope - kSlopeTol, p);
    if (i > 0) record(3, j.value - prev_value, p);
    if (p >= curve.p_star()) record(5, std::abs(j.value), p);
    prev_value = j.value;
  }
  record(4, std::abs(curve.pi(0.0) - 1.0), 0.0);

  // Smoothness violations were scaled to units of the tolerance.
  report.checks[0].passed = report.checks[0].worst_violation <= 1.0;
  report.checks[0].worst_violation *= kRelTol;
  report.checks[1].passed = report.checks[1].worst_violation <= 0.0;
  report.checks[2].passed = report.checks[2].worst_violation <= 0.0;
  report.checks[3].passed = report.checks[3].worst_violation <= 1e-12;
  report.checks[4].passed =
      report.checks[4].worst_violation == 0.0 && curve.p_star() > 0.0 && curve.p_star() < 1.0;
  return report;
}

bool is_convex(const PayoffCurve& curve, int grid_n) {
  for (int i = 0; i <= grid_n; ++i) {
    const double p = curve.p_star() * i / grid_n;
    if (curve.d2pi(p) < -1e-12) return false;
  }
  return true;
}

}  // namespace vaxgame
