#include "vaxgame/adaptive_dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "vaxgame/errors.hpp"

namespace vaxgame {

void ModelParams::check(bool allow_r_boundary) const {
  const bool r_ok = allow_r_boundary ? (r >= 0.0 && r <= 1.0) : (r > 0.0 && r < 1.0);
  if (!r_ok) {
    throw ParameterError("relative risk r must lie in " +
                         std::string(allow_r_boundary ? "[0, 1]" : "(0, 1)") + ", got " +
                         std::to_string(r));
  }
  if (!(eps >= 0.0 && eps <= 1.0)) {
    throw ParameterError("deviating fraction eps must lie in [0, 1], got " + std::to_string(eps));
  }
}

namespace {

void check_state(double P) {
  if (!(P >= 0.0 && P <= 1.0)) {
    throw DomainError("state P must lie in [0, 1], got " + std::to_string(P));
  }
}

}  // namespace

double rhs(const PayoffCurve& curve, const ModelParams& params, double P) {
  check_state(P);
  return rhs_from_jet(curve.jet(P), params, P);
}

double rhs_dP(const PayoffCurve& curve, const ModelParams& params, double P) {
  check_state(P);
  return rhs_dP_from_jet(curve.jet(P), params, P);
}

Trajectory integrate(const PayoffCurve& curve, const ModelParams& params, double P0, double t_end,
                     double dt) {
  params.check(true);
  check_state(P0);
  if (!(t_end > 0.0) || !std::isfinite(t_end)) {
    throw ParameterError("t_end must be positive, got " + std::to_string(t_end));
  }
  if (!(dt > 0.0) || !std::isfinite(dt)) {
    throw ParameterError("dt must be positive, got " + std::to_string(dt));
  }

  Trajectory traj;
  traj.params = params;
  traj.curve_label = curve.label();
  const auto steps = static_cast<std::size_t>(std::ceil(t_end / dt - 1e-9));
  traj.times.reserve(steps + 1);
  traj.states.reserve(steps + 1);

  auto guard = [&traj](double P) {
    const double c = std::clamp(P, 0.0, 1.0);
    traj.max_clamp = std::max(traj.max_clamp, std::abs(c - P));
    return c;
  };
  auto f = [&](double P) { return rhs_from_jet(curve.jet(P), params, P); };

  double P = P0;
  traj.times.push_back(0.0);
  traj.states.push_back(P);
  for (std::size_t k = 0; k < steps; ++k) {
    const double t = static_cast<double>(k) * dt;
    const double h = (k + 1 == steps) ? t_end - t : dt;
    const double k1 = f(P);
    const double k2 = f(guard(P + 0.5 * h * k1));
    const double k3 = f(guard(P + 0.5 * h * k2));
    const double k4 = f(guard(P + h * k3));
    P = guard(P + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4));
    traj.times.push_back(k + 1 == steps ? t_end : static_cast<double>(k + 1) * dt);
    traj.states.push_back(P);
  }
  return traj;
}

}  // namespace vaxgame
