#include "odyn/zerohole.hpp"

#include <algorithm>
#include <cmath>

#include "odyn/fit.hpp"

namespace odyn {

double predicted_limit(const IntervalMap& map, double t, double z,
                       const std::optional<PeriodicOrbit>& orbit, double p_t) {
  (void)map;
  (void)z;
  if (!orbit) return 1.0;
  if (std::abs(orbit->multiplier) <= 1.0)
    throw DomainError("predicted_limit needs a repelling periodic orbit");
  return 1.0 - std::pow(std::abs(orbit->multiplier), -t) *
                   std::exp(-orbit->period * p_t);
}

SlowApproachReport slow_approach_check(const IntervalMap& map, double z, double varsigma,
                                       int horizon) {
  SlowApproachReport rep;
  rep.varsigma = varsigma;
  if (map.critical_points().empty()) {
    rep.vacuous = true;
    rep.delta_z = std::numeric_limits<double>::infinity();
    return rep;
  }
  rep.delta_z = std::numeric_limits<double>::infinity();
  for (const auto& c : map.critical_points()) {
    double y = c.location;
    for (int n = 0; n <= horizon; ++n) {
      const double v = std::exp(varsigma * n) * std::abs(y - z);
      if (v < rep.delta_z) {
        rep.delta_z = v;
        rep.witness_n = n;
      }
      y = map.eval(y);
    }
  }
  rep.pass = rep.delta_z > 1e-12;
  return rep;
}

namespace {

int next_pow2(int n) {
  int p = 1;
  while (p < n) p <<= 1;
  return p;
}

}  // namespace

RatioCurve ratio_curve(const IntervalMap& map, double t, double z,
                       std::span<const double> eps_list,
                       const std::optional<PeriodicOrbit>& orbit,
                       const GridPolicy& policy, const EigenOptions& opt) {
  if (!map.critical_points().empty()) {
    auto slow = slow_approach_check(map, z, 0.1, 64);
    if (!slow.pass)
      throw DomainError("slow-approach condition fails at z=" + std::to_string(z) +
                        "; ratio curve not run");
  }

  RatioCurve curve;
  {
    // density boundedness at z, checked on the base grid
    Grid g0grid = make_grid(map, Hole{}, policy.base_cells);
    auto bundle = solve_closed(map, t, g0grid, opt);
    curve.predicted = predicted_limit(map, t, z, orbit, *bundle.potential.p_t);
    std::vector<double> g0 = bundle.g0;
    const int iz = g0grid.locate(z);
    double local_max = 0.0;
    for (int i = std::max(0, iz - 4); i < std::min(g0grid.cells(), iz + 4); ++i)
      local_max = std::max(local_max, g0[i]);
    std::vector<double> sorted = g0;
    std::sort(sorted.begin(), sorted.end());
    const double median = sorted[sorted.size() / 2];
    if (local_max >= 10.0 * median)
      throw DomainError("equilibrium density not bounded near z (max/median >= 10)");
  }

  for (double eps : eps_list) {
    RatioRow row;
    row.eps = eps;
    const int n_cells =
        std::max(policy.base_cells,
                 next_pow2(static_cast<int>(std::ceil(policy.min_cells_in_hole / (2.0 * eps)))));
    row.grid_cells = n_cells;
    Hole hole = Hole::interval(std::max(0.0, z - eps), std::min(1.0, z + eps));
    Grid grid = make_grid(map, hole, n_cells);
    auto bundle = solve_closed(map, t, grid, opt);
    auto es = escape_spectral(map, hole, t, grid, bundle, opt);
    row.escape = es.rate;
    row.mu_hole = bundle.mu_t.mass_between(hole.components()[0].lo, hole.components()[0].hi);
    if (!(row.escape > 50.0 * opt.tol) || row.mu_hole <= 0.0) {
      row.ok = false;  // below eigen resolution for this grid
      curve.rows.push_back(row);
      continue;
    }
    row.ratio = row.escape / row.mu_hole;
    curve.rows.push_back(row);
  }

  // extrapolate ratio -> 0 radius by OLS over the last rows
  std::vector<double> xs, ys;
  for (const auto& row : curve.rows) {
    if (!row.ok) continue;
    xs.push_back(row.eps);
    ys.push_back(row.ratio);
  }
  const std::size_t keep = 4;
  if (xs.size() > keep) {
    xs.erase(xs.begin(), xs.end() - keep);
    ys.erase(ys.begin(), ys.end() - keep);
  }
  if (ys.empty()) throw NumericError("ratio_curve: no usable rows");
  if (xs.size() >= 2) {
    auto fit = fit_line(xs, ys);
    curve.extrapolated = fit.intercept;
  } else {
    curve.extrapolated = ys.back();
  }
  double mean = 0.0;
  for (double y : ys) mean += y;
  curve.mean_tail = mean / ys.size();
  return curve;
}

ScalingReport scaling_exponent(const IntervalMap& map, double t, double z,
                               const std::optional<PeriodicOrbit>& orbit, const Grid& grid,
                               const SpectralBundle& closed) {
  ScalingReport rep;
  double lambda;
  if (orbit) {
    lambda = orbit->lyapunov;
  } else {
    lambda = 0.0;  // typical-point rate: Int log|Df| dmu_t on the grid
    for (int i = 0; i < grid.cells(); ++i)
      lambda += closed.mu_t.masses[i] * std::log(std::abs(map.deriv(grid.mid(i))));
  }
  if (!(lambda > 0.0)) throw NumericError("scaling_exponent needs lambda > 0");
  rep.lambda_used = lambda;
  rep.s_t = t + *closed.potential.p_t / lambda;

  double min_width = 0.0;
  for (int i = 0; i < grid.cells(); ++i) min_width = std::max(min_width, grid.width(i));
  std::vector<double> xs, ys;
  for (double delta = 0.125; delta >= 8.0 * min_width; delta *= 0.5) {
    const double mass = closed.m_t.mass_of_ball(z, delta);
    if (mass <= 0.0) break;
    xs.push_back(std::log(delta));
    ys.push_back(std::log(mass));
  }
  if (xs.size() >= 3) {
    auto fit = fit_line(xs, ys);
    rep.empirical_slope = fit.slope;
  }
  rep.gap = std::abs(rep.empirical_slope - rep.s_t);
  return rep;
}

ContinuationResult continue_periodic(const std::function<IntervalMap(double)>& family,
                                     double lambda_from, double lambda_to,
                                     const PeriodicOrbit& start, int steps, double margin,
                                     double tol) {
  ContinuationResult res;
  res.reached = lambda_from;
  PeriodicOrbit cur = start;
  res.path.emplace_back(lambda_from, cur);
  if (steps < 1 || lambda_from == lambda_to) return res;

  for (int s = 1; s <= steps; ++s) {
    const double lam = lambda_from + (lambda_to - lambda_from) * s / steps;
    IntervalMap m = family(lam);
    // damped Newton on f^p(x) - x
    double x = cur.point;
    bool converged = false;
    for (int it = 0; it < 100; ++it) {
      double fx = x, dfx = 1.0;
      for (int k = 0; k < cur.period; ++k) {
        dfx *= m.deriv(fx);
        fx = m.eval(fx);
      }
      const double g = fx - x;
      const double dg = dfx - 1.0;
      if (std::abs(g) <= tol) {
        converged = true;
        cur.multiplier = dfx;
        break;
      }
      if (dg == 0.0) break;
      double step = g / dg;
      step = std::clamp(step, -0.05, 0.05);
      double xn = std::clamp(x - step, 0.0, 1.0);
      if (xn == x) {
        converged = std::abs(g) <= 1e3 * tol;
        cur.multiplier = dfx;
        break;
      }
      x = xn;
    }
    if (!converged) {
      res.complete = false;
      return res;
    }
    cur.point = x;
    cur.lyapunov = std::log(std::abs(cur.multiplier)) / cur.period;
    if (std::abs(cur.multiplier) < 1.0 + margin) {
      res.complete = false;  // multiplier margin violated: stop at last safe parameter
      return res;
    }
    res.path.emplace_back(lam, cur);
    res.reached = lam;
  }
  return res;
}

}  // namespace odyn
