#include "odyn/dimension.hpp"

#include <algorithm>
#include <cmath>

#include "odyn/fit.hpp"

namespace odyn {

double punctured_pressure(const IntervalMap& map, const Hole& hole, double t,
                          const Grid& grid, const EigenOptions& opt) {
  const Hole* h = hole.empty() ? nullptr : &hole;
  auto op = WeightedUlamOperator::build(map, t, grid, h);
  auto eig = leading_eigen(op, opt);
  if (eig.rho <= 0.0) return -std::numeric_limits<double>::infinity();
  return std::log(eig.rho);
}

BowenResult bowen_root(const IntervalMap& map, const Hole& hole, const Grid& grid,
                       double t_lo, double t_hi, double tol, const EigenOptions& opt) {
  BowenResult res;
  res.grid_cells = grid.cells();
  auto P = [&](double t) {
    const double v = punctured_pressure(map, hole, t, grid, opt);
    res.curve.emplace_back(t, v);
    return v;
  };
  double plo = P(t_lo), phi = P(t_hi);
  if (!(plo > 0.0 && phi < 0.0)) {
    std::sort(res.curve.begin(), res.curve.end());
    throw NumericError("bowen_root: no sign change on [" + std::to_string(t_lo) + "," +
                       std::to_string(t_hi) + "]: P=" + std::to_string(plo) + ".." +
                       std::to_string(phi));
  }
  double lo = t_lo, hi = t_hi;
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    const double pm = P(mid);
    if (pm > 0.0)
      lo = mid;
    else
      hi = mid;
  }
  res.t_lo = lo;
  res.t_hi = hi;
  res.t_star = 0.5 * (lo + hi);
  std::sort(res.curve.begin(), res.curve.end());
  if (!hole.empty() && res.t_star >= 1.0 + tol)
    throw NumericError("bowen_root: t* >= 1 for a nonempty hole");
  return res;
}

std::vector<double> default_box_ladder(const IntervalMap& map, int depth) {
  double base = 2.0;
  if (map.piecewise_affine()) {
    // matched ladder removes lacunarity wobble for the exact families
    double s = std::abs(map.branches().front().slope());
    bool uniform = true;
    for (const auto& br : map.branches())
      if (std::abs(std::abs(br.slope()) - s) > 1e-12) uniform = false;
    if (uniform && std::abs(s - std::round(s)) < 1e-12) base = s;
  }
  std::vector<double> ladder;
  for (int j = 2; j <= depth; ++j) ladder.push_back(std::pow(base, -j));
  return ladder;
}

BoxDimension box_dimension(const OpenSystem& sys, int depth,
                           std::span<const double> eps_ladder) {
  if (eps_ladder.size() < 4) throw DomainError("box_dimension needs >= 4 ladder points");
  auto ref = refine_survivor(sys, depth);
  BoxDimension bd;
  bd.depth = depth;
  std::vector<double> xs, ys;
  for (double eps : eps_ladder) {
    // count distinct eps-boxes meeting the refinement intervals
    std::int64_t count = 0;
    std::int64_t last = -1;
    for (const auto& iv : ref.intervals) {
      std::int64_t b0 = static_cast<std::int64_t>(std::floor(iv.lo / eps));
      std::int64_t b1 = static_cast<std::int64_t>(std::floor(iv.hi / eps));
      if (iv.hi == eps * b1) --b1;  // right endpoint on a box boundary
      b0 = std::max(b0, last + 1);
      if (b1 >= b0) {
        count += b1 - b0 + 1;
        last = b1;
      }
    }
    bd.counts.emplace_back(eps, count);
    if (count > 0) {
      xs.push_back(std::log(1.0 / eps));
      ys.push_back(std::log(static_cast<double>(count)));
    }
  }
  if (xs.size() < 4) throw DomainError("box_dimension: fewer than 4 usable ladder points");
  auto fit = fit_line(xs, ys);
  bd.slope = fit.slope;
  bd.r2 = fit.r2;
  return bd;
}

BoundaryMassDiagnostic boundary_mass_diagnostic(const GridMeasure& measure,
                                                const Hole& hole,
                                                std::span<const double> eps_ladder) {
  BoundaryMassDiagnostic d;
  double min_width = std::numeric_limits<double>::infinity();
  for (int i = 0; i < measure.grid.cells(); ++i)
    min_width = std::min(min_width, measure.grid.width(i));
  std::vector<double> xs, ys;
  for (double eps : eps_ladder) {
    if (eps < 2.0 * min_width) {
      d.truncated = true;  // grid too coarse to resolve this scale
      continue;
    }
    double mass = 0.0;
    for (double e : hole.endpoints()) mass += measure.mass_of_ball(e, eps);
    if (mass > 0.0) {
      d.rows.push_back({eps, mass});
      xs.push_back(std::log(eps));
      ys.push_back(std::log(mass));
    }
  }
  if (xs.size() >= 3) {
    auto fit = fit_line(xs, ys);
    d.slope = fit.slope;
    d.r2 = fit.r2;
  }
  return d;
}

}  // namespace odyn
