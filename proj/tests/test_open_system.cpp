#include <cmath>

#include "doctest.h"
#include "odyn/open_system.hpp"
#include "odyn/rng.hpp"

using namespace odyn;

TEST_CASE("hole parsing and invariants") {
  auto h = Hole::parse("(0.1,0.2);(0.4,0.5,center=0.45)");
  REQUIRE(h.components().size() == 2);
  CHECK(h.components()[1].center == doctest::Approx(0.45));
  CHECK(h.total_length() == doctest::Approx(0.2));
  CHECK(h.contains(0.15));
  CHECK(!h.contains(0.1));  // open
  CHECK(h.contains_closure(0.1));

  auto frac = Hole::parse("(1/3,2/3)");
  CHECK(frac.components()[0].rlo == Rat(1, 3));

  CHECK(Hole::parse("none").empty());
  CHECK_THROWS_AS(Hole::parse("(0.5,0.4)"), DomainError);
  CHECK_THROWS_AS(Hole::parse("(0.1,0.2);(0.2,0.3)"), DomainError);  // touching closures
  CHECK_THROWS_AS(Hole::parse("junk"), ConfigError);
}

TEST_CASE("open system rejects holes near the critical set") {
  auto log4 = IntervalMap::logistic(4.0);
  CHECK_THROWS_AS(OpenSystem(log4, Hole::interval(0.45, 0.55)), DomainError);
  OpenSystem ok(log4, Hole::interval(0.7, 0.8));
  CHECK(ok.hole().total_length() == doctest::Approx(0.1));
}

TEST_CASE("survives") {
  OpenSystem sys(IntervalMap::doubling(), Hole::interval(Rat(0), Rat(1, 4)));
  CHECK(survives(sys, 1.0 / 3.0, 100));  // orbit {1/3, 2/3} avoids (0, 1/4)
  CHECK(!survives(sys, 0.125, 0));       // starts inside the hole

  OpenSystem tri(IntervalMap::tripling(), Hole::interval(Rat(1, 3), Rat(2, 3)));
  // 1/4 = 0.020202... in base 3: digits avoid 1, orbit stays out of the middle third
  CHECK(survives(tri, 0.25, 10));
  CHECK(!survives(tri, 0.4, 0));
  CHECK(!survives(tri, 0.2, 2));  // 0.2 -> 0.6 enters the hole
}

TEST_CASE("survivor refinement: tripling middle thirds is exact") {
  OpenSystem sys(IntervalMap::tripling(), Hole::interval(Rat(1, 3), Rat(2, 3)));
  for (int n = 0; n <= 8; ++n) {
    auto ref = refine_survivor(sys, n);
    CHECK(ref.complete);
    CHECK(ref.intervals.size() == (std::size_t{2} << n));  // 2^(n+1) pieces
    REQUIRE(ref.exact_mass.has_value());
    Rat expect = 1;
    for (int k = 0; k <= n; ++k) expect *= Rat(2, 3);
    CHECK(*ref.exact_mass == expect);  // (2/3)^(n+1), exactly
  }
}

TEST_CASE("survivor refinement: doubling with hole (0,1/4)") {
  OpenSystem sys(IntervalMap::doubling(), Hole::interval(Rat(0), Rat(1, 4)));
  auto r0 = refine_survivor(sys, 0);
  CHECK(r0.lebesgue_mass == doctest::Approx(0.75));
  // 1 - 1/4 - m(f^{-1}H minus H) with f^{-1}H = (0,1/8) u (1/2,5/8)
  auto r1 = refine_survivor(sys, 1);
  REQUIRE(r1.exact_mass.has_value());
  CHECK(*r1.exact_mass == Rat(5, 8));
}

TEST_CASE("survivor refinement nesting") {
  OpenSystem sys(IntervalMap::doubling(), Hole::interval(Rat(1, 8), Rat(1, 4)));
  auto deep = refine_survivor(sys, 6);
  auto shallow = refine_survivor(sys, 5);
  CHECK(deep.lebesgue_mass <= shallow.lebesgue_mass + 1e-15);
  for (const auto& iv : deep.intervals) {
    bool inside = false;
    for (const auto& big : shallow.intervals)
      if (iv.lo >= big.lo - 1e-12 && iv.hi <= big.hi + 1e-12) {
        inside = true;
        break;
      }
    CHECK(inside);
  }
}

TEST_CASE("refinement mass agrees with Monte Carlo survivor fraction") {
  SplitMix64 rng(99);
  auto check_sys = [&](OpenSystem sys, int depth) {
    auto ref = refine_survivor(sys, depth);
    const int n_samples = 1000000;
    int alive = 0;
    for (int s = 0; s < n_samples; ++s)
      if (survives(sys, rng.uniform(), depth)) ++alive;
    const double p = ref.lebesgue_mass;
    const double se = std::sqrt(p * (1 - p) / n_samples);
    CHECK(std::abs(static_cast<double>(alive) / n_samples - p) <= 4.0 * se + 1e-9);
  };
  check_sys(OpenSystem(IntervalMap::tripling(), Hole::interval(Rat(1, 3), Rat(2, 3))), 6);
  check_sys(OpenSystem(IntervalMap::doubling(), Hole::interval(Rat(0), Rat(1, 4))), 8);
  check_sys(OpenSystem(IntervalMap::logistic(4.0), Hole::interval(0.7, 0.8)), 6);
}

TEST_CASE("refinement budget produces a flagged partial result") {
  OpenSystem sys(IntervalMap::tripling(), Hole::interval(Rat(1, 3), Rat(2, 3)));
  auto ref = refine_survivor(sys, 12, 100);
  CHECK(!ref.complete);
  CHECK(ref.depth < 12);
}

TEST_CASE("H1 check") {
  auto log4 = IntervalMap::logistic(4.0);
  ConditionParams params;
  params.delta0 = 0.05;
  params.horizon = 50;

  // hole around the fixed point 3/4: critical orbit {1/2, 1, 0, 0, ...} stays away
  OpenSystem ok(log4, Hole::interval(0.74, 0.76));
  auto rep = check_H1(ok, params);
  CHECK(rep.pass);

  // hole with 0 on its closure: f^2(c) = 0 lands on the boundary
  OpenSystem bad(log4, Hole::interval(0.0, 0.1));
  auto rep2 = check_H1(bad, params);
  CHECK(!rep2.pass);
  CHECK(rep2.rows[0].witness == 2);

  OpenSystem vac(IntervalMap::doubling(), Hole::interval(0.1, 0.2));
  CHECK(check_H1(vac, params).vacuous);
}

TEST_CASE("H2 orbit separation and derivative witness") {
  ConditionParams params;
  // doubling with center 1/3: |Df| = 2 < 4 at r = 1, |Df^2| = 4 at r = 2
  {
    HoleComponent c;
    c.lo = 0.3;
    c.hi = 0.4;
    c.rlo = rat_from_double(0.3);
    c.rhi = rat_from_double(0.4);
    c.center = 1.0 / 3.0;
    OpenSystem sys(IntervalMap::doubling(), Hole::from_components({c}));
    auto rep = check_H2_orbit_separation(sys, params);
    CHECK(rep.pass);
    CHECK(rep.rows[1].witness == 2);
  }
  // logistic(4) with center 3/4: the center orbit is the fixed point 3/4
  {
    HoleComponent c;
    c.lo = 0.73;
    c.hi = 0.77;
    c.rlo = rat_from_double(0.73);
    c.rhi = rat_from_double(0.77);
    c.center = 0.75;
    OpenSystem sys(IntervalMap::logistic(4.0), Hole::from_components({c}));
    auto rep = check_H2_orbit_separation(sys, params);
    CHECK(rep.rows[0].pass);  // orbit {3/4} never meets c = 1/2
  }
  // a center placed on a critical point violates a constructor invariant
  {
    HoleComponent c;
    c.lo = 0.45;
    c.hi = 0.55;
    c.rlo = rat_from_double(0.45);
    c.rhi = rat_from_double(0.55);
    c.center = 0.5;
    CHECK_THROWS_AS(OpenSystem(IntervalMap::logistic(4.0), Hole::from_components({c})),
                    DomainError);
  }
}

TEST_CASE("exact preimages through affine branches") {
  auto dbl = IntervalMap::doubling();
  std::vector<std::pair<Rat, Rat>> target{{Rat(1, 3), Rat(2, 3)}};
  auto pre = preimage_intervals_exact(dbl, target, 1);
  REQUIRE(pre.size() == 2);
  CHECK(pre[0].first == Rat(1, 6));
  CHECK(pre[0].second == Rat(1, 3));
  CHECK(pre[1].first == Rat(2, 3));
  CHECK(pre[1].second == Rat(5, 6));
}

TEST_CASE("covering time diagnostic") {
  // doubling expands an interval of length delta/3 to the full circle in
  // about log2(3/delta) steps
  const int n = covering_time(IntervalMap::doubling(), 0.1);
  CHECK(n >= 4);
  CHECK(n <= 10);
}
