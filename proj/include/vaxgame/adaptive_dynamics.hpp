#pragma once

// Strategy dynamics dP/dt = f(P) = -r - eps * pi'(P) * (1 - P) + pi(P).

#include <string>
#include <vector>

#include "vaxgame/payoff_curves.hpp"

namespace vaxgame {

// Relative risk r and deviating fraction eps.
struct ModelParams {
  double r = 0.5;
  double eps = 0.0;

  // Throws ParameterError unless 0 < r < 1 (0 <= r <= 1 when allow_r_boundary)
  // and 0 <= eps <= 1.
  void check(bool allow_r_boundary = false) const;
};

// f(P). Throws DomainError for P outside [0, 1].
double rhs(const PayoffCurve& curve, const ModelParams& params, double P);

// f'(P) = pi'(P)(1 + eps) - eps (1 - P) pi''(P).
double rhs_dP(const PayoffCurve& curve, const ModelParams& params, double P);

// Unchecked forms for inner loops that already hold a jet.
inline double rhs_from_jet(const CurveJet& j, const ModelParams& params, double P) {
  return -params.r - params.eps * j.slope * (1.0 - P) + j.value;
}
inline double rhs_dP_from_jet(const CurveJet& j, const ModelParams& params, double P) {
  return j.slope * (1.0 + params.eps) - params.eps * (1.0 - P) * j.curvature;
}

struct Trajectory {
  std::vector<double> times;
  std::vector<double> states;
  ModelParams params;
  std::string curve_label;
  // Largest distance by which the [0, 1] guard moved any state or stage.
  double max_clamp = 0.0;

  double final_state() const { return states.back(); }
};

inline constexpr double kDefaultStep = 1e-3;
inline constexpr double kDefaultHorizon = 50.0;

/// Classical fixed-step RK4 from P0 over [0, t_end]. The last step is
/// shortened so the path ends exactly at t_end. Stage arguments and states
/// are clamped to [0, 1]; Trajectory::max_clamp records how far.
Trajectory integrate(const PayoffCurve& curve, const ModelParams& params, double P0,
                     double t_end = kDefaultHorizon, double dt = kDefaultStep);

}  // namespace vaxgame
