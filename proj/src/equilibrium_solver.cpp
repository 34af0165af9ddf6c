#include "vaxgame/equilibrium_solver.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "vaxgame/errors.hpp"

namespace vaxgame {

std::string_view to_string(Stability s) {
  switch (s) {
    case Stability::kStable: return "stable";
    case Stability::kUnstable: return "unstable";
    case Stability::kDegenerate: return "degenerate";
  }
  return "degenerate";
}

Stability parse_stability(std::string_view text) {
  if (text == "stable") return Stability::kStable;
  if (text == "unstable") return Stability::kUnstable;
  if (text == "degenerate") return Stability::kDegenerate;
  throw ParameterError("unknown stability class '" + std::string(text) + "'");
}

Stability classify(double f_prime, double degeneracy_tol) {
  if (f_prime < -degeneracy_tol) return Stability::kStable;
  if (f_prime > degeneracy_tol) return Stability::kUnstable;
  return Stability::kDegenerate;
}

bool EquilibriumSet::all_nondegenerate() const {
  return std::none_of(equilibria.begin(), equilibria.end(),
                      [](const Equilibrium& e) { return e.classification == Stability::kDegenerate; });
}

bool EquilibriumSet::alternates() const {
  if (equilibria.size() % 2 == 0) return false;
  for (std::size_t i = 0; i < equilibria.size(); ++i) {
    const Stability want = (i % 2 == 0) ? Stability::kStable : Stability::kUnstable;
    if (equilibria[i].classification != want) return false;
  }
  return true;
}

namespace {

template <class F>
double refine_bracket(F&& f, double a, double b, double fa, double fb, double tol) {
  // Illinois false position, falling back to bisection whenever two
  // consecutive steps fail to halve the bracket.
  int side = 0;
  double width = b - a;
  int slow = 0;
  for (int it = 0; it < 400; ++it) {
    if (b - a <= tol) break;
    double c;
    if (slow >= 2) {
      c = 0.5 * (a + b);
      slow = 0;
    } else {
      c = (a * fb - b * fa) / (fb - fa);
      if (!(c > a && c < b)) c = 0.5 * (a + b);
    }
    const double fc = f(c);
    if (fc == 0.0) return c;
    if ((fc < 0.0) == (fa < 0.0)) {
      a = c;
      fa = fc;
      if (side == -1) fb *= 0.5;
      side = -1;
    } else {
      b = c;
      fb = fc;
      if (side == +1) fa *= 0.5;
      side = +1;
    }
    const double w = b - a;
    slow = (w > 0.5 * width) ? slow + 1 : 0;
    width = w;
    if (std::nextafter(a, b) >= b) break;
  }
  // fa, fb may have been halved; compare true residuals.
  return std::abs(f(a)) <= std::abs(f(b)) ? a : b;
}

// Minimizes s * f over [a, b] by golden section; returns the argmin.
template <class F>
double golden_min(F&& g, double a, double b) {
  constexpr double kInvPhi = 0.6180339887498949;
  double c = b - kInvPhi * (b - a);
  double d = a + kInvPhi * (b - a);
  double gc = g(c), gd = g(d);
  for (int it = 0; it < 200 && (b - a) > 1e-15; ++it) {
    if (gc < gd) {
      b = d;
      d = c;
      gd = gc;
      c = b - kInvPhi * (b - a);
      gc = g(c);
    } else {
      a = c;
      c = d;
      gc = gd;
      d = a + kInvPhi * (b - a);
      gd = g(d);
    }
  }
  return 0.5 * (a + b);
}

}  // namespace

EquilibriumSet find_all(const PayoffCurve& curve, const ModelParams& params,
                        const SolverOptions& options) {
  if (options.grid_n < 64) throw ParameterError("find_all: grid_n must be >= 64");
  if (!(options.tol > 0.0)) throw ParameterError("find_all: tol must be positive");
  params.check(/*allow_r_boundary=*/true);
  if (params.r == 1.0) throw ParameterError("find_all: r must be < 1");

  EquilibriumSet out;
  out.params = params;
  out.curve_label = curve.label();
  if (params.r == 0.0) {
    out.continuum_beyond_cutoff = true;
    return out;
  }

  auto f = [&](double P) { return rhs_from_jet(curve.jet(P), params, P); };
  auto fp = [&](double P) { return rhs_dP_from_jet(curve.jet(P), params, P); };
  auto add = [&](double P) {
    const double d = fp(P);
    out.equilibria.push_back({P, d, classify(d, options.degeneracy_tol)});
  };

  const int n = options.grid_n;
  const double ps = curve.p_star();
  std::vector<double> xs(n + 1), fs(n + 1);
  for (int i = 0; i <= n; ++i) {
    xs[i] = ps * i / n;
    fs[i] = f(xs[i]);
  }

  for (int i = 0; i <= n; ++i) {
    if (fs[i] == 0.0) add(xs[i]);
    if (i < n && fs[i] * fs[i + 1] < 0.0) {
      add(refine_bracket(f, xs[i], xs[i + 1], fs[i], fs[i + 1], options.tol));
    }
  }

  // Extrema of f that the grid sees only as a dip of |f|: either a root pair
  // closer than the grid spacing, or a near-tangency.
  const double degenerate_cut = std::sqrt(options.tol);
  for (int i = 1; i < n; ++i) {
    const double l = fs[i - 1], m = fs[i], r = fs[i + 1];
    if (l == 0.0 || m == 0.0 || r == 0.0) continue;
    if ((l < 0.0) != (m < 0.0) || (m < 0.0) != (r < 0.0)) continue;
    if (!(std::abs(m) < std::abs(l) && std::abs(m) <= std::abs(r))) continue;
    const double s = m > 0.0 ? 1.0 : -1.0;
    const double ext = golden_min([&](double P) { return s * f(P); }, xs[i - 1], xs[i + 1]);
    const double fe = f(ext);
    if (fe == 0.0 || (fe < 0.0) != (m < 0.0)) {
      if (fe == 0.0) {
        add(ext);
      } else {
        add(refine_bracket(f, xs[i - 1], ext, l, fe, options.tol));
        add(refine_bracket(f, ext, xs[i + 1], fe, r, options.tol));
      }
    } else if (std::abs(fe) <= degenerate_cut) {
      out.equilibria.push_back({ext, fp(ext), Stability::kDegenerate});
    }
  }

  std::sort(out.equilibria.begin(), out.equilibria.end(),
            [](const Equilibrium& a, const Equilibrium& b) { return a.P < b.P; });
  auto dup = std::unique(out.equilibria.begin(), out.equilibria.end(),
                         [&](const Equilibrium& a, const Equilibrium& b) {
                           return std::abs(a.P - b.P) <= options.tol;
                         });
  out.equilibria.erase(dup, out.equilibria.end());

  if (out.equilibria.empty()) {
    throw NumericalError("find_all: no equilibrium found for r=" + std::to_string(params.r) +
                         ", eps=" + std::to_string(params.eps) + " on curve " + curve.label());
  }
  return out;
}

int count_sign_changes(const PayoffCurve& curve, const ModelParams& params, int grid_n) {
  const double ps = curve.p_star();
  int count = 0;
  double prev = rhs_from_jet(curve.jet(0.0), params, 0.0);
  for (int i = 1; i <= grid_n; ++i) {
    const double P = ps * i / grid_n;
    const double cur = rhs_from_jet(curve.jet(P), params, P);
    if (prev * cur < 0.0 || cur == 0.0) ++count;
    prev = cur;
  }
  return count;
}

OracleTable::OracleTable(const PayoffCurve& curve, int n)
    : curve_(curve), n_(n), value_(static_cast<std::size_t>(n) + 1), slope_(value_.size()) {
  if (n < 100'000) throw ParameterError("oracle: n must be >= 1e5");
  for (int i = 0; i <= n; ++i) {
    const CurveJet j = curve_.jet(static_cast<double>(i) / n);
    value_[i] = j.value;
    slope_[i] = j.slope;
  }
}

std::vector<double> OracleTable::scan(const ModelParams& params) const {
  auto f = [&](double P) {
    const CurveJet j = curve_.jet(P);
    return -params.r - params.eps * j.slope * (1.0 - P) + j.value;
  };
  std::vector<double> roots;
  double prev = 0.0;
  for (int i = 0; i <= n_; ++i) {
    const double x = static_cast<double>(i) / n_;
    const double cur = -params.r - params.eps * slope_[i] * (1.0 - x) + value_[i];
    if (cur == 0.0) {
      roots.push_back(x);
    } else if (i > 0 && prev != 0.0 && (prev < 0.0) != (cur < 0.0)) {
      double a = static_cast<double>(i - 1) / n_, b = x;
      double fa = prev;
      while (b - a > 1e-12) {
        const double m = 0.5 * (a + b);
        const double fm = f(m);
        if (fm == 0.0) {
          a = b = m;
          break;
        }
        if ((fm < 0.0) == (fa < 0.0)) {
          a = m;
          fa = fm;
        } else {
          b = m;
        }
      }
      roots.push_back(0.5 * (a + b));
    }
    prev = cur;
  }
  return roots;
}

std::vector<double> oracle_scan(const PayoffCurve& curve, const ModelParams& params, int n) {
  return OracleTable(curve, n).scan(params);
}

namespace {

double checked_denominator(const PayoffCurve& curve, const ModelParams& params,
                           const Equilibrium& eq, double degeneracy_tol) {
  const double d = rhs_dP(curve, params, eq.P);
  if (std::abs(d) <= degeneracy_tol) {
    throw NumericalError("sensitivity undefined at degenerate equilibrium P=" + std::to_string(eq.P) +
                         " (|f'| = " + std::to_string(std::abs(d)) + ")");
  }
  return d;
}

}  // namespace

double sensitivity_r(const PayoffCurve& curve, const ModelParams& params, const Equilibrium& eq,
                     double degeneracy_tol) {
  return 1.0 / checked_denominator(curve, params, eq, degeneracy_tol);
}

double sensitivity_eps(const PayoffCurve& curve, const ModelParams& params, const Equilibrium& eq,
                       double degeneracy_tol) {
  const double d = checked_denominator(curve, params, eq, degeneracy_tol);
  const double slope = curve.dpi(eq.P);
  if (slope == 0.0) return 0.0;
  return slope * (1.0 - eq.P) / d;
}

double inverse_pi(const PayoffCurve& curve, double target) {
  if (!(target >= 0.0 && target <= 1.0)) {
    throw ParameterError("inverse_pi: target must lie in [0, 1], got " + std::to_string(target));
  }
  double a = 0.0, b = curve.p_star();
  if (curve.pi(a) <= target) return a;
  for (int it = 0; it < 200 && b - a > 1e-15; ++it) {
    const double m = 0.5 * (a + b);
    if (curve.pi(m) > target) a = m;
    else b = m;
  }
  return 0.5 * (a + b);
}

ConvexBounds convex_bounds(const PayoffCurve& curve, const ModelParams& params) {
  if (!is_convex(curve)) {
    throw PreconditionError("convex_bounds: curve " + curve.label() + " is not convex");
  }
  params.check();
  ConvexBounds out;
  const double ps = curve.p_star();
  out.lower = inverse_pi(curve, params.r);
  out.upper = ps;

  // Chord bound: h(P) = 1 - P/p* - r - eps pi'(P)(1 - P) decreases from
  // 1 - r - eps pi'(0) > 0 to -r at p*.
  auto h = [&](double P) { return 1.0 - P / ps - params.r - params.eps * curve.dpi(P) * (1.0 - P); };
  double a = 0.0, b = ps;
  for (int it = 0; it < 200 && b - a > 1e-15; ++it) {
    const double m = 0.5 * (a + b);
    if (h(m) > 0.0) a = m;
    else b = m;
  }
  out.chord_upper = std::min(ps, 0.5 * (a + b));

  if (params.eps > 0.0) {
    const double target = (1.0 - params.r) / params.eps;
    double lo = curve.dpi(0.0), hi = curve.dpi(ps);  // pi' increases on a convex curve
    if (target >= lo && target <= hi) {
      double x0 = 0.0, x1 = ps;
      for (int it = 0; it < 200 && x1 - x0 > 1e-15; ++it) {
        const double m = 0.5 * (x0 + x1);
        if (curve.dpi(m) < target) x0 = m;
        else x1 = m;
      }
      out.inverse_slope_upper = 0.5 * (x0 + x1);
      out.upper = std::min(ps, *out.inverse_slope_upper);
    }
  }
  return out;
}

}  // namespace vaxgame
