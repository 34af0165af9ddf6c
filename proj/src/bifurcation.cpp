#include "vaxgame/bifurcation.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <string>
#include <thread>

#include "vaxgame/adaptive_dynamics.hpp"
#include "vaxgame/errors.hpp"

namespace vaxgame {

std::string_view to_string(SweepAxis axis) { return axis == SweepAxis::kR ? "r" : "eps"; }

SweepAxis parse_sweep_axis(std::string_view text) {
  if (text == "r") return SweepAxis::kR;
  if (text == "eps") return SweepAxis::kEps;
  throw ParameterError("unknown sweep axis '" + std::string(text) + "'");
}

ModelParams Diagram::params_at(double param) const {
  return axis == SweepAxis::kR ? ModelParams{param, fixed_value} : ModelParams{fixed_value, param};
}

std::vector<double> interior_grid(double lo, double hi, int n) {
  if (n < 1 || !(hi > lo)) throw ParameterError("interior_grid: need n >= 1 and hi > lo");
  std::vector<double> g(n);
  for (int k = 0; k < n; ++k) g[k] = lo + (k + 0.5) * (hi - lo) / n;
  return g;
}

std::vector<double> linear_grid(double lo, double hi, int n) {
  if (n < 2 || !(hi > lo)) throw ParameterError("linear_grid: need n >= 2 and hi > lo");
  std::vector<double> g(n);
  for (int k = 0; k < n; ++k) g[k] = lo + (hi - lo) * k / (n - 1);
  g.back() = hi;
  return g;
}

namespace {

// Runs body(i) for i in [0, n) on up to `threads` workers. Each index is
// written by exactly one worker, so output order is independent of threads.
template <class Body>
void parallel_for(std::size_t n, int threads, Body&& body) {
  const std::size_t workers = std::clamp<std::size_t>(threads < 1 ? 1 : threads, 1, std::max<std::size_t>(n, 1));
  if (workers == 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::vector<std::exception_ptr> errors(workers);
  {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        try {
          for (std::size_t i = w; i < n; i += workers) body(i);
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

int nondegenerate_count(const EquilibriumSet& set) {
  return static_cast<int>(std::count_if(set.equilibria.begin(), set.equilibria.end(), [](const Equilibrium& e) {
    return e.classification != Stability::kDegenerate;
  }));
}

std::vector<double> nondegenerate_roots(const EquilibriumSet& set) {
  std::vector<double> out;
  for (const auto& e : set.equilibria) {
    if (e.classification != Stability::kDegenerate) out.push_back(e.P);
  }
  return out;
}

void sort_points(std::vector<BranchPoint>& pts) {
  std::sort(pts.begin(), pts.end(), [](const BranchPoint& a, const BranchPoint& b) {
    return a.param != b.param ? a.param < b.param : a.P < b.P;
  });
}

// Greedy nearest-neighbour matching of each sample's roots to the branches
// alive at the previous sample.
// Indices of `rich` kept after deleting `pairs` adjacent pairs, chosen so the
// survivors rank-match `poor` with the least total displacement.
std::vector<std::size_t> best_survivors(const std::vector<double>& rich, const std::vector<double>& poor) {
  std::vector<std::size_t> best, cur;
  double best_cost = std::numeric_limits<double>::infinity();
  const std::size_t drop = rich.size() - poor.size();
  // cur holds survivors so far; i walks rich, dropped counts removed elements.
  auto rec = [&](auto&& self, std::size_t i, std::size_t dropped, double cost) -> void {
    if (cost >= best_cost) return;
    if (i == rich.size()) {
      if (dropped == drop) {
        best_cost = cost;
        best = cur;
      }
      return;
    }
    if (dropped + 2 <= drop && i + 1 < rich.size()) self(self, i + 2, dropped + 2, cost);
    if (cur.size() < poor.size()) {
      cur.push_back(i);
      self(self, i + 1, dropped, cost + std::abs(rich[i] - poor[cur.size() - 1]));
      cur.pop_back();
    }
  };
  rec(rec, 0, 0, 0.0);
  return best;
}

void assign_branches(std::vector<BranchPoint>& pts) {
  std::vector<double> prev_P;
  std::vector<int> prev_id;
  int next_id = 0;
  std::size_t i = 0;
  while (i < pts.size()) {
    std::size_t j = i;
    while (j < pts.size() && pts[j].param == pts[i].param) ++j;
    std::vector<double> now_P;
    for (std::size_t k = i; k < j; ++k) now_P.push_back(pts[k].P);
    const std::size_t n = now_P.size(), m = prev_P.size();
    std::vector<int> ids(n, -1);
    if (n == m) {
      ids = prev_id;
    } else if ((n > m ? n - m : m - n) % 2 == 0) {
      if (n > m) {
        const auto keep = best_survivors(now_P, prev_P);
        for (std::size_t q = 0; q < keep.size(); ++q) ids[keep[q]] = prev_id[q];
      } else {
        const auto keep = best_survivors(prev_P, now_P);
        for (std::size_t q = 0; q < keep.size(); ++q) ids[q] = prev_id[keep[q]];
      }
    } else {
      std::vector<bool> taken(m, false);
      for (std::size_t k = 0; k < n; ++k) {
        int best = -1;
        for (std::size_t a = 0; a < m; ++a) {
          if (taken[a]) continue;
          if (best < 0 || std::abs(prev_P[a] - now_P[k]) < std::abs(prev_P[best] - now_P[k]))
            best = static_cast<int>(a);
        }
        if (best >= 0) {
          taken[best] = true;
          ids[k] = prev_id[best];
        }
      }
    }
    for (std::size_t k = 0; k < n; ++k) {
      if (ids[k] < 0) ids[k] = next_id++;
      pts[i + k].branch = ids[k];
    }
    prev_P = std::move(now_P);
    prev_id = std::move(ids);
    i = j;
  }
}

Diagram run_sweep(const PayoffCurve& curve, SweepAxis axis, double fixed,
                  const std::vector<double>& grid, const SweepOptions& options) {
  Diagram d;
  d.axis = axis;
  d.fixed_value = fixed;
  d.grid = grid;
  d.curve = curve;
  d.curve_label = curve.label();
  d.options = options;

  std::vector<EquilibriumSet> sets(grid.size());
  parallel_for(grid.size(), options.threads,
               [&](std::size_t i) { sets[i] = find_all(curve, d.params_at(grid[i]), options.solver); });

  for (std::size_t i = 0; i < grid.size(); ++i) {
    d.counts.push_back(nondegenerate_count(sets[i]));
    for (const auto& e : sets[i].equilibria) d.points.push_back({grid[i], e.P, e.classification});
  }
  sort_points(d.points);
  assign_branches(d.points);

  const double ps = curve.p_star();
  for (double P : interior_grid(0.0, ps, options.p_samples)) {
    const CurveJet j = curve.jet(P);
    double param;
    if (axis == SweepAxis::kR) {
      param = j.value - fixed * j.slope * (1.0 - P);
    } else {
      if (j.slope == 0.0) continue;
      param = (j.value - fixed) / (j.slope * (1.0 - P));
    }
    if (!(param >= 0.0 && param <= 1.0)) continue;
    const double fprime = rhs_dP_from_jet(j, d.params_at(param), P);
    d.closed_form.push_back({param, P, classify(fprime, options.solver.degeneracy_tol), -1,
                             param == 0.0 || param == 1.0});
  }
  sort_points(d.closed_form);

  d.events = detect_saddle_nodes(d);
  return d;
}

void check_grid(const std::vector<double>& grid, double lo, double hi, bool open_lo, bool open_hi,
                const char* name) {
  if (grid.empty()) throw ParameterError(std::string(name) + " grid is empty");
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double v = grid[i];
    const bool ok_lo = open_lo ? v > lo : v >= lo;
    const bool ok_hi = open_hi ? v < hi : v <= hi;
    if (!ok_lo || !ok_hi || !std::isfinite(v)) {
      throw ParameterError(std::string(name) + " grid value " + std::to_string(v) + " out of range");
    }
    if (i > 0 && !(v > grid[i - 1])) {
      throw ParameterError(std::string(name) + " grid must be strictly increasing");
    }
  }
}

}  // namespace

Diagram sweep_r(const PayoffCurve& curve, double eps, const std::vector<double>& r_grid,
                const SweepOptions& options) {
  if (!(eps >= 0.0 && eps <= 1.0)) throw ParameterError("sweep_r: eps must lie in [0, 1]");
  check_grid(r_grid, 0.0, 1.0, true, true, "r");
  return run_sweep(curve, SweepAxis::kR, eps, r_grid, options);
}

Diagram sweep_eps(const PayoffCurve& curve, double r, const std::vector<double>& eps_grid,
                  const SweepOptions& options) {
  if (r == 0.0) throw PreconditionError("sweep_eps: r = 0 has a continuum of equilibria");
  if (!(r > 0.0 && r < 1.0)) throw ParameterError("sweep_eps: r must lie in (0, 1)");
  check_grid(eps_grid, 0.0, 1.0, false, false, "eps");
  return run_sweep(curve, SweepAxis::kEps, r, eps_grid, options);
}

std::vector<SaddleNodeEvent> detect_saddle_nodes(const Diagram& diagram) {
  if (!diagram.curve) throw ParameterError("detect_saddle_nodes: diagram carries no curve");
  const PayoffCurve& curve = *diagram.curve;
  const auto& opt = diagram.options;

  auto solve = [&](double param) { return find_all(curve, diagram.params_at(param), opt.solver); };

  // Fold location between two colliding roots. On the r axis f' does not
  // depend on r; on the eps axis eps follows the closed-form branch in P.
  auto fold_between = [&](double Pa, double Pb) {
    auto params_on_branch = [&](double P) {
      if (diagram.axis == SweepAxis::kR) return diagram.params_at(0.5);
      const CurveJet j = curve.jet(P);
      return ModelParams{diagram.fixed_value, (j.value - diagram.fixed_value) / (j.slope * (1.0 - P))};
    };
    auto g = [&](double P) { return rhs_dP_from_jet(curve.jet(P), params_on_branch(P), P); };
    double a = Pa, b = Pb, ga = g(a);
    for (int it = 0; it < 200 && b - a > 1e-15; ++it) {
      const double m = 0.5 * (a + b);
      const double gm = g(m);
      if (gm == 0.0) {
        a = b = m;
        break;
      }
      if ((gm < 0.0) == (ga < 0.0)) {
        a = m;
        ga = gm;
      } else {
        b = m;
      }
    }
    const double P = 0.5 * (a + b);
    const CurveJet j = curve.jet(P);
    const double param = diagram.axis == SweepAxis::kR
                             ? j.value - diagram.fixed_value * j.slope * (1.0 - P)
                             : (j.value - diagram.fixed_value) / (j.slope * (1.0 - P));
    return SaddleNodeEvent{param, P, Pb - Pa};
  };

  std::vector<SaddleNodeEvent> events;

  // Bisects [a, b] (counts ca != cb) down to event_width; a bracket whose
  // midpoint differs from both ends is split into two.
  auto refine = [&](auto&& self, double a, double b, const EquilibriumSet& sa,
                    const EquilibriumSet& sb) -> void {
    const int ca = nondegenerate_count(sa), cb = nondegenerate_count(sb);
    if (ca == cb) return;
    if ((ca - cb) % 2 != 0) {
      throw NumericalError("detect_saddle_nodes: equilibrium count jumps from " + std::to_string(ca) +
                           " to " + std::to_string(cb) + " between " + std::to_string(a) + " and " +
                           std::to_string(b));
    }
    if (b - a > opt.event_width) {
      const double m = 0.5 * (a + b);
      const EquilibriumSet sm = solve(m);
      self(self, a, m, sa, sm);
      self(self, m, b, sm, sb);
      return;
    }
    const auto rich = nondegenerate_roots(ca > cb ? sa : sb);
    const auto poor = nondegenerate_roots(ca > cb ? sb : sa);
    // Remove adjacent pairs from the richer side one at a time, each time
    // picking the pair whose removal best matches the poorer side.
    auto remaining = rich;
    while (remaining.size() > poor.size()) {
      std::size_t best = 0;
      double best_err = std::numeric_limits<double>::infinity();
      for (std::size_t k = 0; k + 1 < remaining.size(); ++k) {
        std::vector<double> trial;
        for (std::size_t q = 0; q < remaining.size(); ++q) {
          if (q != k && q != k + 1) trial.push_back(remaining[q]);
        }
        double err = 0.0;
        const std::size_t n = std::min(trial.size(), poor.size());
        for (std::size_t q = 0; q < n; ++q) err = std::max(err, std::abs(trial[q] - poor[q]));
        if (err < best_err) {
          best_err = err;
          best = k;
        }
      }
      events.push_back(fold_between(remaining[best], remaining[best + 1]));
      remaining.erase(remaining.begin() + static_cast<std::ptrdiff_t>(best),
                      remaining.begin() + static_cast<std::ptrdiff_t>(best) + 2);
    }
  };

  const auto& grid = diagram.grid;
  for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
    if (diagram.counts[i] == diagram.counts[i + 1]) continue;
    refine(refine, grid[i], grid[i + 1], solve(grid[i]), solve(grid[i + 1]));
  }
  std::sort(events.begin(), events.end(), [](const SaddleNodeEvent& a, const SaddleNodeEvent& b) {
    return a.param != b.param ? a.param < b.param : a.P < b.P;
  });
  return events;
}

TangencyCurve tangency_curve(const PayoffCurve& curve, const std::vector<double>& P_grid) {
  TangencyCurve out;
  for (double P : P_grid) {
    if (!(P > 0.0 && P < curve.p_star())) {
      throw ParameterError("tangency_curve: P = " + std::to_string(P) + " outside (0, p_star)");
    }
    const CurveJet j = curve.jet(P);
    const double denom = j.curvature * (1.0 - P) - j.slope;
    if (std::abs(denom) < 1e-12) {
      ++out.skipped;
      continue;
    }
    TangencyPoint t;
    t.P = P;
    t.eps = j.slope / denom;
    t.r = j.value - j.slope * j.slope * (1.0 - P) / denom;
    t.feasible = t.eps >= 0.0 && t.eps <= 1.0 && t.r > 0.0 && t.r < 1.0;
    out.points.push_back(t);
  }
  return out;
}

namespace {

struct TangencyEval {
  double denom, eps, r;
};

TangencyEval tangency_at(const PayoffCurve& curve, double P) {
  const CurveJet j = curve.jet(P);
  const double denom = j.curvature * (1.0 - P) - j.slope;
  return {denom, j.slope / denom, j.value - j.slope * j.slope * (1.0 - P) / denom};
}

}  // namespace

std::vector<TangencyPoint> tangency_crossings(const PayoffCurve& curve, SweepAxis axis,
                                              double fixed_value, const std::vector<double>& P_grid) {
  auto level = [&](const TangencyEval& t) { return (axis == SweepAxis::kR ? t.eps : t.r) - fixed_value; };
  std::vector<TangencyPoint> out;
  for (std::size_t i = 0; i + 1 < P_grid.size(); ++i) {
    double a = P_grid[i], b = P_grid[i + 1];
    if (!(a > 0.0 && b < curve.p_star())) continue;
    const TangencyEval ta = tangency_at(curve, a), tb = tangency_at(curve, b);
    if (std::abs(ta.denom) < 1e-12 || std::abs(tb.denom) < 1e-12) continue;
    if ((ta.denom < 0.0) != (tb.denom < 0.0)) continue;
    double ga = level(ta);
    const double gb = level(tb);
    if (ga == 0.0 || (ga < 0.0) == (gb < 0.0)) continue;
    for (int it = 0; it < 200 && b - a > 1e-15; ++it) {
      const double m = 0.5 * (a + b);
      const double gm = level(tangency_at(curve, m));
      if ((gm < 0.0) == (ga < 0.0)) {
        a = m;
        ga = gm;
      } else {
        b = m;
      }
    }
    const double P = 0.5 * (a + b);
    const TangencyEval t = tangency_at(curve, P);
    out.push_back({P, t.eps, t.r, t.eps >= 0.0 && t.eps <= 1.0 && t.r > 0.0 && t.r < 1.0});
  }
  return out;
}

std::vector<SurfaceSample> surface(const PayoffCurve& curve, const std::vector<double>& P_grid,
                                   const std::vector<double>& eps_grid) {
  for (double e : eps_grid) {
    if (!(e >= 0.0 && e <= 1.0)) throw ParameterError("surface: eps grid value outside [0, 1]");
  }
  std::vector<SurfaceSample> out;
  for (double P : P_grid) {
    if (!(P >= 0.0 && P < curve.p_star())) continue;
    const CurveJet j = curve.jet(P);
    for (double e : eps_grid) {
      const double r = j.value - e * j.slope * (1.0 - P);
      if (r > 0.0 && r < 1.0) out.push_back({P, e, r});
    }
  }
  return out;
}

}  // namespace vaxgame
