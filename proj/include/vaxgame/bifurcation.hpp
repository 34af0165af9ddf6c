#pragma once

// One-parameter bifurcation diagrams in r and eps, saddle-node detection,
// the closed-form tangency (fold) curve, and samples of the equilibrium
// surface in (P, eps, r).

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "vaxgame/equilibrium_solver.hpp"
#include "vaxgame/payoff_curves.hpp"

namespace vaxgame {

enum class SweepAxis { kR, kEps };

std::string_view to_string(SweepAxis axis);
SweepAxis parse_sweep_axis(std::string_view text);

struct BranchPoint {
  double param = 0.0;
  double P = 0.0;
  Stability classification = Stability::kDegenerate;
  // Solver points: branch identity carried between neighbouring parameter
  // samples by rank; when the count changes, the adjacent pair that moved
  // least gets dropped or added. Closed-form points: -1.
  int branch = -1;
  // Closed-form points sitting on the parameter-box boundary (param 0 or 1).
  bool on_boundary = false;
};

struct SaddleNodeEvent {
  double param = 0.0;
  double P = 0.0;
  // Distance between the two colliding roots at the end of the count
  // bisection.
  double pair_gap = 0.0;
};

struct SweepOptions {
  SolverOptions solver;
  int p_samples = 2000;      // closed-form P grid on (0, p_star)
  double event_width = 1e-8; // bracket width for count-transition bisection
  int threads = 1;
};

struct Diagram {
  SweepAxis axis = SweepAxis::kR;
  double fixed_value = 0.0;
  std::vector<double> grid;
  // Solver-based equilibria at every grid value, sorted by (param, P).
  std::vector<BranchPoint> points;
  // Closed-form branch sampled on a P grid and clipped to the unit box,
  // sorted by (param, P).
  std::vector<BranchPoint> closed_form;
  std::vector<SaddleNodeEvent> events;
  // Non-degenerate root counts per grid value, parallel to grid.
  std::vector<int> counts;
  std::string curve_label;

  // Curve and solver settings used to build the diagram; needed to refine
  // events after the fact.
  std::optional<PayoffCurve> curve;
  SweepOptions options;

  // (eps, r) of a parameter value on this diagram's axis.
  ModelParams params_at(double param) const;
};

/// Diagram in r at fixed eps. r_grid must be strictly increasing inside
/// (0, 1). Closed-form branch: r(P) = pi(P) - eps pi'(P)(1 - P).
Diagram sweep_r(const PayoffCurve& curve, double eps, const std::vector<double>& r_grid,
                const SweepOptions& options = {});

/// Diagram in eps at fixed r in (0, 1). eps_grid increasing inside [0, 1].
/// Closed-form branch: eps(P) = (pi(P) - r) / (pi'(P)(1 - P)), P < p_star.
Diagram sweep_eps(const PayoffCurve& curve, double r, const std::vector<double>& eps_grid,
                  const SweepOptions& options = {});

/// Finds grid intervals where the non-degenerate root count changes by 2,
/// bisects each to event_width, then locates the fold itself: the zero of
/// f' between the two colliding roots, with the parameter taken from the
/// closed-form branch there. Throws NumericalError on an odd count change.
std::vector<SaddleNodeEvent> detect_saddle_nodes(const Diagram& diagram);

struct TangencyPoint {
  double P = 0.0;
  double eps = 0.0;
  double r = 0.0;
  bool feasible = false;  // eps in [0, 1] and r in (0, 1)
};

struct TangencyCurve {
  std::vector<TangencyPoint> points;
  int skipped = 0;  // |pi''(P)(1 - P) - pi'(P)| < 1e-12
};

// Solves the two linear tangency conditions for (eps, r) at every P of
// P_grid, which must lie inside (0, p_star).
TangencyCurve tangency_curve(const PayoffCurve& curve, const std::vector<double>& P_grid);

/// Points of the tangency curve on the line where the non-swept parameter
/// equals `fixed_value` (eps for axis r, r for axis eps). Each sign change of
/// eps(P) - fixed (or r(P) - fixed) between neighbouring P_grid samples is
/// bisected on the closed form; intervals across a pole of the closed form
/// are skipped.
std::vector<TangencyPoint> tangency_crossings(const PayoffCurve& curve, SweepAxis axis,
                                              double fixed_value, const std::vector<double>& P_grid);

struct SurfaceSample {
  double P = 0.0;
  double eps = 0.0;
  double r = 0.0;
};

// r = pi(P) - eps pi'(P)(1 - P) for every (P, eps) with P < p_star and r in
// (0, 1). Ordered by P, then eps.
std::vector<SurfaceSample> surface(const PayoffCurve& curve, const std::vector<double>& P_grid,
                                   const std::vector<double>& eps_grid);

// n points evenly spaced strictly inside (lo, hi): lo + (k + 1/2)(hi - lo)/n.
std::vector<double> interior_grid(double lo, double hi, int n);
// n >= 2 points from lo to hi inclusive.
std::vector<double> linear_grid(double lo, double hi, int n);

}  // namespace vaxgame
