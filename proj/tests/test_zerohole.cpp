#include <cmath>

#include "doctest.h"
#include "odyn/open_system.hpp"
#include "odyn/zerohole.hpp"

using namespace odyn;

TEST_CASE("predicted zero-hole limits") {
  auto log4 = IntervalMap::logistic(4.0);
  PeriodicOrbit fix{0.75, 1, -2.0, std::log(2.0)};
  CHECK(predicted_limit(log4, 1.0, 0.75, fix, 0.0) == doctest::Approx(0.5));

  auto dbl = IntervalMap::doubling();
  PeriodicOrbit two{1.0 / 3.0, 2, 4.0, std::log(2.0)};
  CHECK(predicted_limit(dbl, 1.0, 1.0 / 3.0, two, 0.0) == doctest::Approx(0.75));

  // aperiodic center: limit 1
  CHECK(predicted_limit(dbl, 1.0, 0.123, std::nullopt, 0.0) == 1.0);

  // predicted_limit(periodic) < 1 always
  for (double t : {0.8, 1.0, 1.2})
    CHECK(predicted_limit(dbl, t, 1.0 / 3.0, two, (1 - t) * std::log(2.0)) < 1.0);

  PeriodicOrbit tame{0.5, 1, 0.9, -0.1};
  CHECK_THROWS_AS(predicted_limit(dbl, 1.0, 0.5, tame, 0.0), DomainError);
}

TEST_CASE("slow approach check") {
  auto log4 = IntervalMap::logistic(4.0);
  auto rep = slow_approach_check(log4, 0.75, 0.2, 60);
  CHECK(rep.pass);
  CHECK(rep.delta_z == doctest::Approx(0.25));  // critical orbit {1/2, 1, 0, 0, ...}

  auto bad = slow_approach_check(log4, 0.0, 0.2, 60);
  CHECK(!bad.pass);  // f^2(c) = 0 = z

  auto vac = slow_approach_check(IntervalMap::doubling(), 0.3, 0.2, 60);
  CHECK(vac.vacuous);
  CHECK(vac.pass);
}

TEST_CASE("scaling exponent s_t") {
  // doubling: p_t = (1-t) log 2 and lambda = log 2, so s_t = 1 for every t
  auto dbl = IntervalMap::doubling();
  Grid g = Grid::uniform(4096);
  PeriodicOrbit two{1.0 / 3.0, 2, 4.0, std::log(2.0)};
  for (double t : {0.8, 1.0, 1.2}) {
    auto bundle = solve_closed(dbl, t, g);
    auto rep = scaling_exponent(dbl, t, 1.0 / 3.0, two, g, bundle);
    CHECK(rep.s_t == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(rep.empirical_slope == doctest::Approx(1.0).epsilon(0.05));
  }

  // tripling at t = 0.8, z = 1/2: s_t = 0.8 + 0.2 log3/log3 = 1
  auto tri = IntervalMap::tripling();
  Grid g3 = Grid::uniform(2187);
  auto b3 = solve_closed(tri, 0.8, g3);
  PeriodicOrbit half{0.5, 1, 3.0, std::log(3.0)};
  auto rep3 = scaling_exponent(tri, 0.8, 0.5, half, g3, b3);
  CHECK(rep3.s_t == doctest::Approx(1.0).epsilon(1e-10));

  // logistic(4), t = 1, z = 3/4: p_1 = 0 so s_1 = 1
  auto log4 = IntervalMap::logistic(4.0);
  Grid gl = make_grid(log4, Hole{}, 4096);
  auto bl = solve_closed(log4, 1.0, gl);
  PeriodicOrbit fix{0.75, 1, -2.0, std::log(2.0)};
  auto repl = scaling_exponent(log4, 1.0, 0.75, fix, gl, bl);
  CHECK(repl.s_t == doctest::Approx(1.0).epsilon(1e-3));
  CHECK(repl.empirical_slope == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("ratio curve for doubling at the period-2 center z = 1/3") {
  auto dbl = IntervalMap::doubling();
  PeriodicOrbit two{1.0 / 3.0, 2, 4.0, std::log(2.0)};
  std::vector<double> eps;
  for (int k = 6; k <= 9; ++k) eps.push_back(std::pow(2.0, -k));
  GridPolicy policy;
  policy.base_cells = 2048;
  auto curve = ratio_curve(dbl, 1.0, 1.0 / 3.0, eps, two, policy);
  CHECK(curve.predicted == doctest::Approx(0.75));
  CHECK(std::abs(curve.extrapolated - 0.75) <= 0.05);
  for (const auto& row : curve.rows) {
    CHECK(row.ok);
    CHECK(row.escape > 0.0);
    CHECK(row.mu_hole > 0.0);
  }
}

TEST_CASE("hole-intersection mechanism: m(H cap f^{-2}H) = m(H)/4 at dyadic radii") {
  // the quarter comes from the multiplier of the 2-cycle through 1/3 and
  // feeds the 0.75 limit
  auto dbl = IntervalMap::doubling();
  for (int k : {6, 8, 10}) {
    const Rat eps = Rat(1, 1 << k);
    const Rat zlo = Rat(1, 3) - eps, zhi = Rat(1, 3) + eps;
    std::vector<std::pair<Rat, Rat>> h{{zlo, zhi}};
    auto pre = preimage_intervals_exact(dbl, h, 2);
    Rat inter(0);
    for (const auto& [lo, hi] : pre) {
      const Rat a = std::max(lo, zlo), b = std::min(hi, zhi);
      if (a < b) inter += b - a;
    }
    CHECK(inter == Rat(2) * eps / 4);
  }
}

TEST_CASE("ratio curve precondition wiring rejects bad centers on logistic maps") {
  auto log4 = IntervalMap::logistic(4.0);
  std::vector<double> eps{0.01};
  // z = 0 violates slow approach (f^2(c) = 0)
  CHECK_THROWS_AS(ratio_curve(log4, 1.0, 0.0, eps, std::nullopt), DomainError);
}

TEST_CASE("hyperbolic continuation of the logistic fixed point") {
  auto family = [](double lam) { return IntervalMap::logistic(lam); };
  PeriodicOrbit fix{0.75, 1, -2.0, std::log(2.0)};
  auto res = continue_periodic(family, 4.0, 3.9, fix, 10);
  CHECK(res.complete);
  CHECK(res.reached == doctest::Approx(3.9));
  for (const auto& [lam, o] : res.path)
    CHECK(o.point == doctest::Approx((lam - 1.0) / lam).epsilon(1e-9));
}

TEST_CASE("continuation of the 2-cycle matches independent recomputation") {
  auto family = [](double lam) { return IntervalMap::logistic(lam); };
  auto cycle4 = periodic_points(IntervalMap::logistic(4.0), 2, 1e-12);
  REQUIRE(!cycle4.empty());
  auto res = continue_periodic(family, 4.0, 3.9, cycle4.front(), 20);
  CHECK(res.complete);
  auto direct = periodic_points(IntervalMap::logistic(3.9), 2, 1e-12);
  bool matched = false;
  for (const auto& o : direct)
    if (std::abs(o.point - res.path.back().second.point) <= 1e-9) matched = true;
  CHECK(matched);
}

TEST_CASE("zero-length continuation is the identity") {
  auto family = [](double lam) { return IntervalMap::logistic(lam); };
  PeriodicOrbit fix{0.75, 1, -2.0, std::log(2.0)};
  auto res = continue_periodic(family, 4.0, 4.0, fix, 5);
  CHECK(res.complete);
  REQUIRE(res.path.size() == 1);
  CHECK(res.path[0].second.point == 0.75);
}

TEST_CASE("continuation stops at the multiplier margin") {
  // the logistic fixed point (lam-1)/lam has multiplier 2 - lam, which
  // crosses magnitude 1 at lam = 3
  auto family = [](double lam) { return IntervalMap::logistic(lam); };
  PeriodicOrbit fix{0.75, 1, -2.0, std::log(2.0)};
  auto res = continue_periodic(family, 4.0, 3.01, fix, 50, 0.2);
  CHECK(!res.complete);
  CHECK(res.reached > 3.01);
  CHECK(std::abs(res.path.back().second.multiplier) >= 1.2 - 1e-6);
}
