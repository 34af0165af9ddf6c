#include <algorithm>
#include <cmath>
#include <vector>

#include "doctest.h"
#include "oracles.hpp"
#include "vaxgame/bifurcation.hpp"
#include "vaxgame/equilibrium_solver.hpp"
#include "vaxgame/errors.hpp"
#include "vaxgame/payoff_curves.hpp"

using namespace vaxgame;

namespace {

const GlueKernel& kernel() {
  static const GlueKernel k;
  return k;
}

const PayoffCurve& ex2() {
  static const PayoffCurve c = make_example2(kernel());
  return c;
}

std::vector<double> fine_P(const PayoffCurve& c) { return interior_grid(0.0, c.p_star(), 20000); }

}  // namespace

TEST_CASE("grids") {
  const auto g = interior_grid(0.0, 1.0, 4);
  CHECK(g == std::vector<double>{0.125, 0.375, 0.625, 0.875});
  const auto l = linear_grid(0.0, 1.0, 5);
  CHECK(l == std::vector<double>{0.0, 0.25, 0.5, 0.75, 1.0});
  CHECK_THROWS_AS(interior_grid(0.0, 1.0, 0), ParameterError);
  CHECK_THROWS_AS(linear_grid(1.0, 0.0, 5), ParameterError);
  CHECK(parse_sweep_axis(to_string(SweepAxis::kEps)) == SweepAxis::kEps);
  CHECK_THROWS_AS(parse_sweep_axis("x"), ParameterError);
}

TEST_CASE("sweep_r at eps = 0: closed form is pi itself") {
  const auto c = make_example1(kernel());
  const auto d = sweep_r(c, 0.0, interior_grid(0.0, 1.0, 50));
  REQUIRE_FALSE(d.closed_form.empty());
  for (const auto& b : d.closed_form) CHECK(b.param == doctest::Approx(c.pi(b.P)).epsilon(1e-15));
  CHECK(d.events.empty());
  for (int n : d.counts) CHECK(n == 1);
}

TEST_CASE("every sweep point satisfies f = 0 within 1e-8") {
  auto g = oracle::rng(31);
  for (int k = 0; k < 5; ++k) {
    const double eps = oracle::uniform(g, 0.0, 1.0);
    const auto d = sweep_r(ex2(), eps, interior_grid(0.0, 1.0, 60));
    for (const auto& b : d.points) CHECK(std::abs(rhs(ex2(), d.params_at(b.param), b.P)) <= 1e-8);
    for (const auto& b : d.closed_form)
      if (!b.on_boundary) CHECK(std::abs(rhs(ex2(), d.params_at(b.param), b.P)) <= 1e-8);
    const double r = oracle::uniform(g, 0.05, 0.95);
    const auto e = sweep_eps(ex2(), r, linear_grid(0.0, 1.0, 60));
    for (const auto& b : e.points) CHECK(std::abs(rhs(ex2(), e.params_at(b.param), b.P)) <= 1e-8);
    for (const auto& b : e.closed_form)
      if (!b.on_boundary) CHECK(std::abs(rhs(ex2(), e.params_at(b.param), b.P)) <= 1e-8);
  }
}

TEST_CASE("sweep_eps closed form vanishes where pi(P) = r") {
  const auto c = make_convex_test(0.8, 3);
  const double r = 0.125;  // pi(0.4) = 0.125
  const auto d = sweep_eps(c, r, linear_grid(0.0, 1.0, 21));
  const double P0 = 0.4;
  // eps(P) = (pi - r) / (pi' (1 - P)) evaluated independently
  auto eps_of = [&](double P) { return (c.pi(P) - r) / (c.dpi(P) * (1.0 - P)); };
  CHECK(std::abs(eps_of(P0)) <= 1e-15);
  for (const auto& b : d.closed_form) {
    CHECK(b.param == doctest::Approx(eps_of(b.P)).epsilon(1e-13));
    CHECK(b.param >= 0.0);
    CHECK(b.param <= 1.0);
  }
  // the eps = 0 end of the branch sits at P = 0.4
  CHECK(std::abs(find_all(c, {r, 0.0}).equilibria[0].P - P0) <= 1e-12);
  for (const auto& b : d.points) CHECK(b.P >= P0 - 1e-12);
}

TEST_CASE("sweep argument checks") {
  const auto c = make_convex_test(0.8, 3);
  CHECK_THROWS_AS((sweep_r(c, 0.5, {0.0, 0.5})), ParameterError);
  CHECK_THROWS_AS((sweep_r(c, 0.5, {0.5, 1.0})), ParameterError);
  CHECK_THROWS_AS((sweep_r(c, 0.5, {0.5, 0.4})), ParameterError);
  CHECK_THROWS_AS((sweep_r(c, 0.5, {})), ParameterError);
  CHECK_THROWS_AS((sweep_r(c, 1.5, {0.5})), ParameterError);
  CHECK_THROWS_AS((sweep_eps(c, 0.0, {0.5})), PreconditionError);
  CHECK_THROWS_AS((sweep_eps(c, 1.0, {0.5})), ParameterError);
  CHECK_THROWS_AS((sweep_eps(c, 0.5, {-0.1, 0.5})), ParameterError);
}

TEST_CASE("convex curve: one branch, no saddle-nodes") {
  const auto c = make_convex_test(0.8, 3);
  for (double eps : {0.0, 0.3, 1.0}) {
    const auto d = sweep_r(c, eps, interior_grid(0.0, 1.0, 100));
    CHECK(d.events.empty());
    for (const auto& b : d.points) {
      CHECK(b.branch == 0);
      CHECK(b.classification == Stability::kStable);
    }
  }
  for (double r : {0.1, 0.5, 0.9}) CHECK(sweep_eps(c, r, linear_grid(0.0, 1.0, 100)).events.empty());
}

TEST_CASE("example2 eps-sweep at r = 0.909 has a three-root window around eps = 0.188") {
  auto grid = linear_grid(0.0, 1.0, 101);
  grid.push_back(0.188);
  std::sort(grid.begin(), grid.end());
  const auto d = sweep_eps(ex2(), 0.909, grid);
  const auto at = std::find(d.grid.begin(), d.grid.end(), 0.188) - d.grid.begin();
  CHECK(d.counts[at] == 3);
  CHECK(d.counts.front() == 1);
  REQUIRE(d.events.size() >= 1);
  // the window opens below 0.188
  CHECK(d.events.front().param < 0.188);
}

TEST_CASE("saddle-node events are folds") {
  for (double eps : {0.05, 0.188, 0.5}) {
    const auto d = sweep_r(ex2(), eps, interior_grid(0.0, 1.0, 80));
    for (const auto& e : d.events) {
      const auto p = d.params_at(e.param);
      CHECK(std::abs(rhs(ex2(), p, e.P)) <= 1e-6);
      CHECK(std::abs(rhs_dP(ex2(), p, e.P)) <= 1e-6);
      CHECK(e.pair_gap < 1e-3);
    }
  }
  for (double r : {0.67, 0.909}) {
    const auto d = sweep_eps(ex2(), r, linear_grid(0.0, 1.0, 81));
    REQUIRE_FALSE(d.events.empty());
    for (const auto& e : d.events) {
      const auto p = d.params_at(e.param);
      CHECK(std::abs(rhs(ex2(), p, e.P)) <= 1e-6);
      CHECK(std::abs(rhs_dP(ex2(), p, e.P)) <= 1e-6);
      CHECK(e.pair_gap < 1e-3);
    }
  }
}

TEST_CASE("events coincide with tangency crossings") {
  const auto Pg = fine_P(ex2());
  for (double r : {0.67, 0.7, 0.909}) {
    CAPTURE(r);
    const auto d = sweep_eps(ex2(), r, linear_grid(0.0, 1.0, 101));
    std::vector<TangencyPoint> feasible;
    for (const auto& t : tangency_crossings(ex2(), SweepAxis::kEps, r, Pg))
      if (t.eps >= 0.0 && t.eps <= 1.0) feasible.push_back(t);
    std::sort(feasible.begin(), feasible.end(), [](const auto& a, const auto& b) { return a.eps < b.eps; });
    REQUIRE(feasible.size() == d.events.size());
    for (std::size_t i = 0; i < feasible.size(); ++i) {
      CHECK(std::abs(feasible[i].eps - d.events[i].param) <= 1e-6);
      CHECK(std::abs(feasible[i].P - d.events[i].P) <= 1e-3);
    }
  }
}

TEST_CASE("equilibria move apart from an r-fold the right way") {
  // dP/dr = 1 / f'(P): the stable member of a new pair decreases with r, the
  // unstable one increases.
  const double eps = 0.188;
  const auto d = sweep_r(ex2(), eps, interior_grid(0.0, 1.0, 80));
  REQUIRE_FALSE(d.events.empty());
  for (const auto& e : d.events) {
    // find the side with more roots
    const auto lo = find_all(ex2(), {e.param - 1e-4, eps});
    const auto hi = find_all(ex2(), {e.param + 1e-4, eps});
    const double side = hi.size() > lo.size() ? 1.0 : -1.0;
    auto pair_near = [&](double r) {
      std::vector<Equilibrium> near;
      for (const auto& q : find_all(ex2(), {r, eps}).equilibria)
        if (std::abs(q.P - e.P) < 0.05) near.push_back(q);
      return near;
    };
    const auto a = pair_near(e.param + side * 1e-3);
    const auto b = pair_near(e.param + side * 2e-3);
    REQUIRE(a.size() == 2);
    REQUIRE(b.size() == 2);
    for (int i = 0; i < 2; ++i) {
      const double dPdr = (b[i].P - a[i].P) / (side * 1e-3);
      if (a[i].classification == Stability::kStable) CHECK(dPdr < 0.0);
      else CHECK(dPdr > 0.0);
    }
  }
}

TEST_CASE("tangency curve solves both fold conditions") {
  const std::vector<PayoffCurve> curves{ex2(), make_example1(kernel())};
  for (const auto& c : curves) {
    const auto tc = tangency_curve(c, interior_grid(0.0, c.p_star(), 2000));
    CHECK(tc.points.size() + tc.skipped == 2000);
    for (const auto& t : tc.points) {
      const ModelParams p{t.r, t.eps};
      // f and f' written out from pi directly
      const double f = -t.r - t.eps * c.dpi(t.P) * (1.0 - t.P) + c.pi(t.P);
      const double fp = c.dpi(t.P) * (1.0 + t.eps) - t.eps * (1.0 - t.P) * c.d2pi(t.P);
      CHECK(std::abs(f) <= 1e-9 * std::max(1.0, std::abs(t.eps)));
      CHECK(std::abs(fp) <= 1e-9 * std::max(1.0, std::abs(t.eps)));
      CHECK(t.feasible == (t.eps >= 0.0 && t.eps <= 1.0 && t.r > 0.0 && t.r < 1.0));
      (void)p;
    }
  }
  CHECK_THROWS_AS((tangency_curve(ex2(), {0.6})), ParameterError);
  CHECK_THROWS_AS((tangency_curve(ex2(), {0.0})), ParameterError);
}

TEST_CASE("convex curve: no feasible fold") {
  const auto c = make_convex_test(0.8, 3);
  const auto tc = tangency_curve(c, interior_grid(0.0, 0.8, 1000));
  for (const auto& t : tc.points) CHECK_FALSE(t.feasible);
}

TEST_CASE("surface level set in r matches the eps closed form") {
  const auto c = ex2();
  const auto Pg = interior_grid(0.0, c.p_star(), 400);
  const auto eg = linear_grid(0.0, 1.0, 401);
  const auto s = surface(c, Pg, eg);
  REQUIRE_FALSE(s.empty());
  for (const auto& x : s) {
    CHECK(x.P < c.p_star());
    CHECK(x.r > 0.0);
    CHECK(x.r < 1.0);
    CHECK(x.r == doctest::Approx(c.pi(x.P) - x.eps * c.dpi(x.P) * (1.0 - x.P)).epsilon(1e-14));
  }
  // For a fixed r, the surface contour is the sweep_eps closed form:
  // along each P fibre, eps where r(P, eps) = r0 by linear interpolation on an
  // exactly linear fibre.
  const double r0 = 0.8;
  const auto d = sweep_eps(c, r0, linear_grid(0.0, 1.0, 11), {{}, 400});
  for (const auto& b : d.closed_form) {
    if (b.on_boundary) continue;
    const double r_at0 = c.pi(b.P), slope = -c.dpi(b.P) * (1.0 - b.P);
    CHECK(std::abs((r0 - r_at0) / slope - b.param) <= 1e-8);
  }
  CHECK_THROWS_AS((surface(c, Pg, {1.5})), ParameterError);
}

TEST_CASE("stability alternates on each parameter fibre") {
  auto g = oracle::rng(32);
  for (int k = 0; k < 5; ++k) {
    const double eps = oracle::uniform(g, 0.0, 1.0);
    const auto d = sweep_r(ex2(), eps, interior_grid(0.0, 1.0, 50));
    std::size_t i = 0;
    while (i < d.points.size()) {
      std::size_t j = i;
      while (j < d.points.size() && d.points[j].param == d.points[i].param) ++j;
      bool nondeg = true;
      for (std::size_t q = i; q < j; ++q) nondeg = nondeg && d.points[q].classification != Stability::kDegenerate;
      if (nondeg) {
        CHECK((j - i) % 2 == 1);
        for (std::size_t q = i; q < j; ++q)
          CHECK(d.points[q].classification == ((q - i) % 2 == 0 ? Stability::kStable : Stability::kUnstable));
      }
      i = j;
    }
  }
}

TEST_CASE("thread count does not change results") {
  const auto grid = interior_grid(0.0, 1.0, 64);
  SweepOptions one, four;
  four.threads = 4;
  const auto a = sweep_r(ex2(), 0.188, grid, one);
  const auto b = sweep_r(ex2(), 0.188, grid, four);
  REQUIRE(a.points.size() == b.points.size());
  for (std::size_t i = 0; i < a.points.size(); ++i) {
    CHECK(a.points[i].P == b.points[i].P);
    CHECK(a.points[i].param == b.points[i].param);
    CHECK(a.points[i].branch == b.points[i].branch);
  }
  REQUIRE(a.events.size() == b.events.size());
  for (std::size_t i = 0; i < a.events.size(); ++i) CHECK(a.events[i].param == b.events[i].param);
  CHECK(a.counts == b.counts);
}

TEST_CASE("branch ids survive a fold") {
  const auto d = sweep_r(ex2(), 0.188, interior_grid(0.0, 1.0, 80));
  REQUIRE(d.events.size() == 1);
  std::vector<int> ids;
  for (const auto& b : d.points) ids.push_back(b.branch);
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  CHECK(ids == std::vector<int>{0, 1, 2});
  // the branch alive at small r is still alive at the right end
  CHECK(d.points.front().branch == 0);
  bool last_has_0 = false;
  for (const auto& b : d.points)
    if (b.param == d.grid.back() && b.branch == 0) last_has_0 = true;
  CHECK(last_has_0);
}
