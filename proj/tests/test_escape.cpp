#include <omp.h>

#include <cmath>

#include "doctest.h"
#include "odyn/escape.hpp"
#include "test_util.hpp"

using namespace odyn;

namespace {

const double kLn32 = std::log(1.5);
const double kGolden = 0.5 * (1.0 + std::sqrt(5.0));
const double kGoldenRate = std::log(2.0) - std::log(kGolden);

}  // namespace

TEST_CASE("escape_direct matches the closed forms on Markov systems") {
  auto tri = IntervalMap::tripling();
  Hole mid = Hole::interval(Rat(1, 3), Rat(2, 3));
  Grid g = make_grid(tri, mid, 243);
  auto bundle = solve_closed(tri, 1.0, g);
  auto est = escape_direct(tri, mid, 1.0, g, 30, bundle);
  CHECK(est.rate == doctest::Approx(kLn32).epsilon(1e-10));
  CHECK(est.r2 >= 0.999);

  auto dbl = IntervalMap::doubling();
  Hole quarter = Hole::interval(Rat(0), Rat(1, 4));
  Grid g2 = make_grid(dbl, quarter, 256);
  auto b2 = solve_closed(dbl, 1.0, g2);
  auto e2 = escape_direct(dbl, quarter, 1.0, g2, 40, b2);
  CHECK(e2.rate == doctest::Approx(kGoldenRate).epsilon(1e-3 / kGoldenRate));
}

TEST_CASE("escape_direct with an empty hole reports rate zero") {
  auto dbl = IntervalMap::doubling();
  Grid g = Grid::uniform(64);
  auto bundle = solve_closed(dbl, 1.0, g);
  auto est = escape_direct(dbl, Hole{}, 1.0, g, 20, bundle);
  CHECK(est.rate == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("escape_mc hits the oracles within 4 sigma") {
  auto tri = IntervalMap::tripling();
  auto est = escape_mc(tri, Hole::interval(Rat(1, 3), Rat(2, 3)), 20, 400000, 7);
  CHECK(std::abs(est.rate - kLn32) <= std::max(4.0 * est.stderr_, 1e-3));

  auto dbl = IntervalMap::doubling();
  auto e2 = escape_mc(dbl, Hole::interval(Rat(0), Rat(1, 4)), 30, 400000, 7);
  CHECK(std::abs(e2.rate - kGoldenRate) <= std::max(4.0 * e2.stderr_, 1e-3));

  auto none = escape_mc(dbl, Hole{}, 10, 1000, 7);
  CHECK(none.rate == 0.0);
}

TEST_CASE("escape_mc is deterministic for a fixed seed across thread counts") {
  auto tri = IntervalMap::tripling();
  Hole mid = Hole::interval(Rat(1, 3), Rat(2, 3));
  const int saved = omp_get_max_threads();
  omp_set_num_threads(1);
  auto serial = escape_mc(tri, mid, 15, 300000, 42);
  omp_set_num_threads(std::max(4, saved));
  auto parallel = escape_mc(tri, mid, 15, 300000, 42);
  omp_set_num_threads(saved);
  CHECK(serial.rate == parallel.rate);
  CHECK(serial.stderr_ == parallel.stderr_);
  // and a different seed moves the estimate
  auto other = escape_mc(tri, mid, 15, 300000, 43);
  CHECK(other.rate != serial.rate);
}

TEST_CASE("sft model construction and pressure") {
  auto tri = IntervalMap::tripling();
  auto model = build_sft(tri, Hole::interval(Rat(1, 3), Rat(2, 3)));
  CHECK(model.symbols == 2);
  for (double t : {0.5, 0.8, 1.0}) {
    CHECK(sft_pressure(model, t) ==
          doctest::Approx(std::log(2.0) - t * std::log(3.0)).epsilon(1e-12));
  }
  // root of the pressure sits at the Cantor dimension
  const double t_star = std::log(2.0) / std::log(3.0);
  CHECK(sft_pressure(model, t_star) == doctest::Approx(0.0).epsilon(1e-12));

  auto dbl = IntervalMap::doubling();
  auto gm = build_sft(dbl, Hole::interval(Rat(0), Rat(1, 4)));
  CHECK(sft_pressure(gm, 1.0) ==
        doctest::Approx(std::log(kGolden) - std::log(2.0)).epsilon(1e-10));

  // no hole: full shift, pressure (1-t) log 2
  auto full = build_sft(dbl, Hole{});
  CHECK(sft_pressure(full, 0.3) == doctest::Approx(0.7 * std::log(2.0)).epsilon(1e-12));

  // non-Markov hole is refused
  CHECK_THROWS_AS(build_sft(dbl, Hole::interval(0.1, 0.3)), OracleUnavailable);
  CHECK_THROWS_AS(build_sft(IntervalMap::logistic(4.0), Hole::interval(0.7, 0.8)),
                  OracleUnavailable);
}

TEST_CASE("variational principle: spectral route equals the exact SFT value") {
  auto tri = IntervalMap::tripling();
  Hole mid = Hole::interval(Rat(1, 3), Rat(2, 3));
  Grid g3 = make_grid(tri, mid, 243);
  EigenOptions tight{1e-13, 200000};
  for (double t : {0.7, 0.8, 1.0, 1.15, 1.3}) {
    auto rep = variational_check(tri, mid, t, g3, tight);
    CHECK(rep.status == VariationalReport::Status::Ok);
    CHECK(rep.gap <= 1e-10);
  }
  // closed form: lhs = p_t - ln(3/2), rhs = ln 2 - t ln 3, equal for all t
  auto rep08 = variational_check(tri, mid, 0.8, g3, tight);
  CHECK(rep08.lhs == doctest::Approx(std::log(2.0) - 0.8 * std::log(3.0)).epsilon(1e-10));

  auto dbl = IntervalMap::doubling();
  Hole quarter = Hole::interval(Rat(0), Rat(1, 4));
  Grid g2 = make_grid(dbl, quarter, 256);
  for (double t : {0.7, 1.0, 1.3}) {
    auto rep = variational_check(dbl, quarter, t, g2, tight);
    CHECK(rep.gap <= 1e-10);
  }

  // non-Markov system: oracle unavailable but the spectral value is reported
  auto log4 = IntervalMap::logistic(4.0);
  Hole h = Hole::interval(0.7, 0.8);
  Grid gl = make_grid(log4, h, 512);
  auto rep = variational_check(log4, h, 1.0, gl);
  CHECK(rep.status == VariationalReport::Status::OracleUnavailable);
  CHECK(rep.lhs < 0.0);
}

TEST_CASE("survivor equilibrium on the tripling Cantor core") {
  auto tri = IntervalMap::tripling();
  Hole mid = Hole::interval(Rat(1, 3), Rat(2, 3));
  const int k = 5;  // grid 3^5
  Grid g = make_grid(tri, mid, 243);
  auto bundle = solve_closed(tri, 1.0, g);
  auto sm = survivor_equilibrium(tri, mid, 1.0, g, bundle);

  // depth-k survivor cylinders carry mass 2^{-k} each
  int support = 0;
  for (int i = 0; i < g.cells(); ++i) {
    if (sm.nu.masses[i] > 1e-14) {
      ++support;
      CHECK(sm.nu.masses[i] == doctest::Approx(std::pow(2.0, -k)).epsilon(1e-8));
    }
  }
  CHECK(support == (1 << k));
}

TEST_CASE("survivor equilibrium matches the Parry measure on the golden-mean shift") {
  auto dbl = doubling_quarters();
  Hole quarter = Hole::interval(Rat(0), Rat(1, 4));
  Grid g = Grid::uniform(4);
  auto bundle = solve_closed(dbl, 1.0, g);
  auto sm = survivor_equilibrium(dbl, quarter, 1.0, g, bundle);

  auto model = build_sft(dbl, quarter);
  auto eq = sft_equilibrium(model, 1.0);
  REQUIRE(model.symbols == 3);
  for (int s = 0; s < 3; ++s)
    CHECK(sm.nu.masses[1 + s] == doctest::Approx(eq.stationary[s]).epsilon(1e-9));
  // spot value: nu[cell [1/2,3/4]] is the middle symbol's stationary mass
  CHECK(sm.nu.masses[2] == doctest::Approx(eq.stationary[1]).epsilon(1e-9));
}

TEST_CASE("survivor equilibrium without a hole is Lebesgue for doubling") {
  auto dbl = IntervalMap::doubling();
  Grid g = Grid::uniform(64);
  auto bundle = solve_closed(dbl, 1.0, g);
  auto sm = survivor_equilibrium(dbl, Hole{}, 1.0, g, bundle);
  for (int i = 0; i < 64; ++i)
    CHECK(sm.nu.masses[i] == doctest::Approx(1.0 / 64).epsilon(1e-10));
}

TEST_CASE("survivor measure is invariant under one punctured-renormalized step") {
  auto tri = IntervalMap::tripling();
  Hole mid = Hole::interval(Rat(1, 3), Rat(2, 3));
  Grid g = make_grid(tri, mid, 243);
  auto bundle = solve_closed(tri, 0.9, g);
  auto sm = survivor_equilibrium(tri, mid, 0.9, g, bundle);
  auto es = escape_spectral(tri, mid, 0.9, g, bundle);
  auto op = WeightedUlamOperator::build(tri, 0.9, g, &mid);

  // transport nu through the conditioned survivor kernel: the step i -> j
  // has probability u_j M[j][i] / (rho u_i), the h-transform by the left
  // eigenvector u of the punctured operator
  const auto& m = op.matrix();
  const auto& u = es.punctured.left;
  std::vector<double> out(g.cells(), 0.0);
  for (int j = 0; j < m.n; ++j) {
    if (u[j] <= 0.0) continue;
    for (std::int64_t kk = m.rowptr[j]; kk < m.rowptr[j + 1]; ++kk) {
      const int i = m.col[kk];
      if (u[i] <= 0.0 || sm.nu.masses[i] <= 0.0) continue;
      out[j] += sm.nu.masses[i] * m.val[kk] * u[j] / (es.punctured.rho * u[i]);
    }
  }
  double err = 0.0;
  for (int i = 0; i < g.cells(); ++i) err += std::abs(out[i] - sm.nu.masses[i]);
  CHECK(err <= 1e-9);
}

TEST_CASE("finite-n limit evaluation converges to the eigenvector product") {
  auto tri = IntervalMap::tripling();
  Hole mid = Hole::interval(Rat(1, 3), Rat(2, 3));
  Grid g = make_grid(tri, mid, 81);
  auto bundle = solve_closed(tri, 1.0, g);
  auto sm = survivor_equilibrium(tri, mid, 1.0, g, bundle);

  // psi = indicator of [0, 1/3]
  std::vector<double> psi(g.cells(), 0.0);
  for (int i = 0; i < g.cells(); ++i)
    if (g.hi(i) <= 1.0 / 3.0 + 1e-12) psi[i] = 1.0;
  double nu_psi = 0.0;
  for (int i = 0; i < g.cells(); ++i) nu_psi += psi[i] * sm.nu.masses[i];

  const double lim = survivor_limit_eval(tri, mid, 1.0, g, psi, 50, bundle);
  CHECK(lim == doctest::Approx(nu_psi).epsilon(1e-6));
}

TEST_CASE("Gibbs property of survivor cylinder masses on Markov instances") {
  // golden-mean shift at t = 1: nu(Z_n) / exp(S_n Phi - n P) bounded by a
  // single constant across cylinder depths
  auto dbl = IntervalMap::doubling();
  auto model = build_sft(dbl, Hole::interval(Rat(0), Rat(1, 4)));
  auto eq = sft_equilibrium(model, 1.0);
  double cmin = 1e300, cmax = 0.0;
  // enumerate admissible words up to length 12
  std::vector<std::vector<int>> words;
  for (int s = 0; s < model.symbols; ++s) words.push_back({s});
  for (int len = 1; len <= 12; ++len) {
    std::vector<std::vector<int>> next;
    for (const auto& w : words) {
      const double mass = sft_cylinder_mass(model, eq, w);
      if (mass > 0.0) {
        double s_phi = 0.0;
        for (std::size_t i = 0; i + 1 < w.size(); ++i)
          s_phi += -eq.t * model.log_slopes[w[i]];
        const double gibbs = mass / std::exp(s_phi - (w.size() - 1) * eq.pressure);
        cmin = std::min(cmin, gibbs);
        cmax = std::max(cmax, gibbs);
      }
      if (len < 12)
        for (int s = 0; s < model.symbols; ++s)
          if (model.allowed[w.back()][s]) {
            auto w2 = w;
            w2.push_back(s);
            next.push_back(std::move(w2));
          }
    }
    if (len < 12) words = std::move(next);
  }
  CHECK(cmin > 0.0);
  CHECK(cmax / cmin <= 10.0);  // single constant across depths
}

TEST_CASE("sft entropy identity h = P + t chi") {
  auto tri = IntervalMap::tripling();
  auto model = build_sft(tri, Hole::interval(Rat(1, 3), Rat(2, 3)));
  auto eq = sft_equilibrium(model, 1.0);
  // measure of maximal entropy on the 2-shift: h = log 2
  CHECK(sft_entropy(model, eq, 1.0) == doctest::Approx(std::log(2.0)).epsilon(1e-10));
}

TEST_CASE("estimator agreement across the three routes") {
  auto tri = IntervalMap::tripling();
  Hole mid = Hole::interval(Rat(1, 3), Rat(2, 3));
  Grid g = make_grid(tri, mid, 243);
  auto bundle = solve_closed(tri, 1.0, g);
  auto spec = escape_spectral(tri, mid, 1.0, g, bundle);
  auto direct = escape_direct(tri, mid, 1.0, g, 30, bundle);
  auto mc = escape_mc(tri, mid, 20, 500000, 3);
  CHECK(std::abs(spec.rate - direct.rate) <= 1e-3);
  CHECK(std::abs(spec.rate - mc.rate) <= std::max(1e-3, 4.0 * mc.stderr_));
}
