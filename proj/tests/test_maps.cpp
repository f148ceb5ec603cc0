#include <cmath>

#include "doctest.h"
#include "odyn/maps.hpp"
#include "odyn/rng.hpp"

using namespace odyn;

TEST_CASE("eval and deriv closed forms") {
  auto log4 = IntervalMap::logistic(4.0);
  CHECK(log4.eval(0.5) == 1.0);  // critical value
  CHECK(log4.deriv(0.75) == -2.0);
  CHECK(log4.deriv(0.5) == 0.0);

  auto dbl = IntervalMap::doubling();
  CHECK(dbl.deriv(0.1) == 2.0);
  CHECK(dbl.deriv(0.9) == 2.0);
  CHECK(dbl.eval(0.25) == 0.5);
  CHECK(dbl.eval(0.75) == 0.5);

  CHECK_THROWS_AS(log4.eval(1.5), DomainError);
  CHECK_THROWS_AS(IntervalMap::logistic(5.0), DomainError);
}

TEST_CASE("chebyshev degree 2 equals logistic(4)") {
  auto cheb = IntervalMap::chebyshev(2);
  auto log4 = IntervalMap::logistic(4.0);
  for (double x : {0.0, 0.1, 0.37, 0.5, 0.62, 0.99, 1.0}) {
    CHECK(cheb.eval(x) == doctest::Approx(log4.eval(x)).epsilon(1e-13));
    CHECK(cheb.deriv(x) == doctest::Approx(log4.deriv(x)).epsilon(1e-13));
  }
  CHECK(IntervalMap::chebyshev(3).critical_points().size() == 2);
}

TEST_CASE("orbit") {
  auto log4 = IntervalMap::logistic(4.0);
  auto o = orbit(log4, 0.5, 3);
  CHECK(o == std::vector<double>{0.5, 1.0, 0.0, 0.0});

  auto dbl = IntervalMap::doubling();
  auto o2 = orbit(dbl, 1.0 / 3.0, 2);
  CHECK(o2[0] == doctest::Approx(1.0 / 3.0));
  CHECK(o2[1] == doctest::Approx(2.0 / 3.0));
  CHECK(o2[2] == doctest::Approx(1.0 / 3.0));

  CHECK(orbit(dbl, 0.7, 0) == std::vector<double>{0.7});
}

TEST_CASE("birkhoff sums of log|Df|") {
  auto dbl = IntervalMap::doubling();
  CHECK(birkhoff_log_deriv(dbl, 1.0 / 3.0, 2) ==
        doctest::Approx(2 * std::log(2.0)).epsilon(1e-14));
  auto log4 = IntervalMap::logistic(4.0);
  CHECK(birkhoff_log_deriv(log4, 0.75, 1) == doctest::Approx(std::log(2.0)).epsilon(1e-14));
  auto tri = IntervalMap::tripling();
  CHECK(birkhoff_log_deriv(tri, 0.123, 3) ==
        doctest::Approx(3 * std::log(3.0)).epsilon(1e-14));
  // orbit through the critical point is rejected
  CHECK_THROWS_AS(birkhoff_log_deriv(log4, 0.5, 1), NumericError);
}

TEST_CASE("piecewise-linear birkhoff sums are branch log-slope sums exactly") {
  auto tent = IntervalMap::tent(2.0);
  SplitMix64 rng(11);
  for (int i = 0; i < 50; ++i) {
    const double x = rng.uniform();
    const int n = 1 + static_cast<int>(rng.next() % 6);
    CHECK(birkhoff_log_deriv(tent, x, n) ==
          doctest::Approx(n * std::log(2.0)).epsilon(1e-12));
  }
}

TEST_CASE("periodic points of doubling, logistic, tripling") {
  auto dbl = IntervalMap::doubling();
  auto p2 = periodic_points(dbl, 2, 1e-12);
  REQUIRE(p2.size() == 2);
  CHECK(p2[0].point == doctest::Approx(1.0 / 3.0).epsilon(1e-10));
  CHECK(p2[1].point == doctest::Approx(2.0 / 3.0).epsilon(1e-10));
  CHECK(p2[0].multiplier == doctest::Approx(4.0).epsilon(1e-9));
  CHECK(p2[0].lyapunov == doctest::Approx(std::log(2.0)).epsilon(1e-9));

  auto log4 = IntervalMap::logistic(4.0);
  auto p1 = periodic_points(log4, 1, 1e-12);
  REQUIRE(p1.size() == 2);
  CHECK(p1[0].point == doctest::Approx(0.0));
  CHECK(p1[1].point == doctest::Approx(0.75).epsilon(1e-10));
  CHECK(p1[1].multiplier == doctest::Approx(-2.0).epsilon(1e-9));

  auto tri = IntervalMap::tripling();
  auto t1 = periodic_points(tri, 1, 1e-12);
  REQUIRE(t1.size() == 3);  // {0, 1/2, 1} up to mod-1 identification
  CHECK(t1[0].point == doctest::Approx(0.0));
  CHECK(t1[1].point == doctest::Approx(0.5).epsilon(1e-10));
  CHECK(t1[2].point == doctest::Approx(1.0));
}

TEST_CASE("doubling period-p counts match 2^p - 1 after mod-1 identification") {
  auto dbl = IntervalMap::doubling();
  for (int p = 1; p <= 5; ++p) {
    int count = 0;
    for (int q = 1; q <= p; ++q) {
      if (p % q != 0) continue;
      auto pts = periodic_points(dbl, q, 1e-12);
      for (const auto& o : pts)
        if (o.point < 1.0 - 1e-9) ++count;  // identify 1 with 0
    }
    CHECK(count == (1 << p) - 1);
  }
}

TEST_CASE("non-hyperbolic periodic points are excluded with a note") {
  // logistic(3): fixed point 2/3 has multiplier exactly -1
  auto m = IntervalMap::logistic(3.0);
  std::vector<double> excluded;
  auto pts = periodic_points(m, 1, 1e-9, &excluded);
  REQUIRE(pts.size() == 1);
  CHECK(pts[0].point == doctest::Approx(0.0));
  REQUIRE(excluded.size() == 1);
  CHECK(excluded[0] == doctest::Approx(2.0 / 3.0).epsilon(1e-6));
}

TEST_CASE("lyapunov at periodic orbits") {
  auto dbl = IntervalMap::doubling();
  PeriodicOrbit o{1.0 / 3.0, 2, 4.0, 0.0};
  CHECK(lyapunov_at_periodic(dbl, o) == doctest::Approx(std::log(2.0)).epsilon(1e-12));
  auto log4 = IntervalMap::logistic(4.0);
  PeriodicOrbit fix{0.75, 1, -2.0, 0.0};
  CHECK(lyapunov_at_periodic(log4, fix) == doctest::Approx(std::log(2.0)).epsilon(1e-12));
  auto tri = IntervalMap::tripling();
  PeriodicOrbit half{0.5, 1, 3.0, 0.0};
  CHECK(lyapunov_at_periodic(tri, half) == doctest::Approx(std::log(3.0)).epsilon(1e-12));
}

TEST_CASE("Collet-Eckmann check on logistic(4)") {
  auto log4 = IntervalMap::logistic(4.0);
  ConditionParams p;
  p.Lambda = std::log(4.0) - 0.01;
  p.delta0 = 0.1;
  p.horizon = 50;
  auto rep = check_collet_eckmann(log4, p);
  CHECK(rep.pass);
  // growth margin: |Df^k(1)| = 4^k exactly, so the rate is log 4 at every k
  CHECK(rep.rows[0].margin == doctest::Approx(0.01).epsilon(1e-9));
  // recurrence: dist(f^k(1/2), 1/2) = 1/2 for all k >= 1
  CHECK(rep.rows[1].pass);

  auto dbl = IntervalMap::doubling();
  auto vac = check_collet_eckmann(dbl, p);
  CHECK(vac.vacuous);
  CHECK(vac.pass);
}

TEST_CASE("Collet-Eckmann failure is monotone in the horizon") {
  // logistic(3.5) has an attracting 4-cycle; derivative growth fails
  auto m = IntervalMap::logistic(3.5);
  ConditionParams p;
  p.Lambda = 0.05;
  int first_fail = -1;
  bool failed_stays = true;
  for (int n = 5; n <= 120; n += 5) {
    p.horizon = n;
    const bool pass = check_collet_eckmann(m, p).pass;
    if (!pass && first_fail < 0) first_fail = n;
    if (first_fail >= 0 && pass) failed_stays = false;
  }
  CHECK(first_fail > 0);
  CHECK(failed_stays);
}

TEST_CASE("deriv matches centered finite differences away from critical points") {
  SplitMix64 rng(5);
  for (auto map : {IntervalMap::logistic(3.7), IntervalMap::chebyshev(3)}) {
    int checked = 0;
    for (int i = 0; i < 5000 && checked < 1000; ++i) {
      const double x = rng.uniform();
      if (map.critical_distance(x) < 1e-2 || x < 1e-3 || x > 1 - 1e-3) continue;
      const double h = 1e-6;
      const double fd = (map.eval(x + h) - map.eval(x - h)) / (2 * h);
      CHECK(map.deriv(x) == doctest::Approx(fd).epsilon(1e-6));
      ++checked;
    }
    CHECK(checked == 1000);
  }
}

TEST_CASE("piecewise-linear construction rejects bad branch tables") {
  // slope magnitude 1 is rejected
  AffineBranch flat{0.0, 0.5, 0.0, 0.5, Rat(0), Rat(1, 2), Rat(0), Rat(1, 2)};
  AffineBranch second{0.5, 1.0, 0.0, 1.0, Rat(1, 2), Rat(1), Rat(0), Rat(1)};
  CHECK_THROWS_AS(IntervalMap::piecewise_linear({flat, second}), DomainError);
  // gap between branch domains is rejected
  AffineBranch left{0.0, 0.4, 0.0, 1.0, Rat(0), Rat(2, 5), Rat(0), Rat(1)};
  AffineBranch right{0.5, 1.0, 0.0, 1.0, Rat(1, 2), Rat(1), Rat(0), Rat(1)};
  CHECK_THROWS_AS(IntervalMap::piecewise_linear({left, right}), DomainError);
}

TEST_CASE("sampled expansion diagnostic runs") {
  ConditionParams p;
  p.kappa = 0.5;
  p.gamma = 0.1;
  p.horizon = 30;
  auto rep = check_expansion(IntervalMap::doubling(), p);
  CHECK(rep.pass);  // |Df^n| = 2^n beats 0.5 e^{0.1 n}
}
