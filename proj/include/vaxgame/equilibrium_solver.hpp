#pragma once

// Equilibria of the strategy dynamics: location, stability, comparative
// statics, and a dense brute-force oracle used for cross-checking.

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "vaxgame/adaptive_dynamics.hpp"
#include "vaxgame/payoff_curves.hpp"

namespace vaxgame {

enum class Stability { kStable, kUnstable, kDegenerate };

std::string_view to_string(Stability s);
Stability parse_stability(std::string_view text);

struct Equilibrium {
  double P = 0.0;
  double f_prime = 0.0;
  Stability classification = Stability::kDegenerate;
};

struct EquilibriumSet {
  std::vector<Equilibrium> equilibria;  // ascending in P
  ModelParams params;
  std::string curve_label;
  // r == 0: every P in [p_star, 1] is a rest point, so no list is produced.
  bool continuum_beyond_cutoff = false;

  std::size_t size() const { return equilibria.size(); }
  bool all_nondegenerate() const;
  // Odd count, alternating stable / unstable starting with stable. Only
  // meaningful when all_nondegenerate().
  bool alternates() const;
};

struct SolverOptions {
  int grid_n = 2048;
  double tol = 1e-12;
  double degeneracy_tol = 1e-8;
};

Stability classify(double f_prime, double degeneracy_tol);

/// Scans grid_n + 1 uniform points on [0, p_star] for sign changes of f and
/// refines each bracket with a bisection/secant hybrid until the bracket is
/// narrower than tol (or |f| <= tol). Every interior grid minimum of |f|
/// without a sign change is refined to the nearby extremum of f: a sign flip
/// there yields two roots closer than the grid spacing, otherwise the
/// extremum is reported as degenerate when |f| stays below sqrt(tol).
/// Requires r > 0 except r == 0 exactly, which yields an empty list with
/// continuum_beyond_cutoff set. Throws NumericalError if nothing is found.
EquilibriumSet find_all(const PayoffCurve& curve, const ModelParams& params,
                        const SolverOptions& options = {});

// Number of sign-change roots on the find_all grid, without refinement.
int count_sign_changes(const PayoffCurve& curve, const ModelParams& params, int grid_n = 2048);

/// Dense tabulation of (pi, pi') on n + 1 uniform points of [0, 1]. The
/// table depends only on the curve, so one table serves any number of
/// parameter settings.
class OracleTable {
 public:
  OracleTable(const PayoffCurve& curve, int n);

  // Roots of f on [0, 1]: every sign-change cell (and exact grid zero) is
  // bisected on the exact f to width 1e-12.
  std::vector<double> scan(const ModelParams& params) const;

  int n() const { return n_; }

 private:
  PayoffCurve curve_;
  int n_;
  std::vector<double> value_;
  std::vector<double> slope_;
};

// One-shot oracle. n must be >= 1e5.
std::vector<double> oracle_scan(const PayoffCurve& curve, const ModelParams& params, int n = 1'000'000);

// dP0/dr = 1 / f'(P0). Throws NumericalError if |f'(P0)| <= degeneracy_tol.
double sensitivity_r(const PayoffCurve& curve, const ModelParams& params, const Equilibrium& eq,
                     double degeneracy_tol = 1e-8);

// dP0/deps = pi'(P0)(1 - P0) / f'(P0).
double sensitivity_eps(const PayoffCurve& curve, const ModelParams& params, const Equilibrium& eq,
                       double degeneracy_tol = 1e-8);

struct ConvexBounds {
  double lower = 0.0;  // pi^{-1}(r)
  double upper = 1.0;  // p_star, tightened by the inverse-slope term when defined
  // Root of 1 - P/p_star - r - eps pi'(P)(1 - P), from the chord bound
  // pi(P) <= 1 - P/p_star of a convex curve; min'd with p_star.
  double chord_upper = 1.0;
  // pi'^{-1}((1 - r)/eps); present only if (1 - r)/eps lies in the range of
  // pi', which cannot happen for a non-increasing curve.
  std::optional<double> inverse_slope_upper;
};

// Requires is_convex(curve); throws PreconditionError otherwise.
ConvexBounds convex_bounds(const PayoffCurve& curve, const ModelParams& params);

// P in [0, p_star] with pi(P) = target, by bisection. target in [0, 1].
double inverse_pi(const PayoffCurve& curve, double target);

}  // namespace vaxgame
