#ifndef ODYN_DIMENSION_HPP
#define ODYN_DIMENSION_HPP

#include <vector>

#include "odyn/spectral.hpp"

namespace odyn {

// P^H(t) = log rho of the unnormalized punctured operator (= p_t - rate).
double punctured_pressure(const IntervalMap& map, const Hole& hole, double t,
                          const Grid& grid, const EigenOptions& opt = {});

struct BowenResult {
  double t_star = 1.0;
  double t_lo = 0.0, t_hi = 0.0;                  // final bracket
  std::vector<std::pair<double, double>> curve;   // sampled (t, P^H(t))
  int grid_cells = 0;
};

// Bisection for the zero of t -> P^H(t) on [t_lo, t_hi]; every evaluation is
// a fresh operator assembly and eigensolve on the shared grid.
BowenResult bowen_root(const IntervalMap& map, const Hole& hole, const Grid& grid,
                       double t_lo = 0.3, double t_hi = 1.2, double tol = 1e-4,
                       const EigenOptions& opt = {});

struct BoxDimension {
  double slope = 0.0;
  double r2 = 0.0;
  std::vector<std::pair<double, std::int64_t>> counts;  // (eps, N(eps))
  int depth = 0;
};

// Box-counting slope over the survivor refinement at the given depth;
// independent of the spectral route.
BoxDimension box_dimension(const OpenSystem& sys, int depth,
                           std::span<const double> eps_ladder);

// Geometric default ladder matched to the map (powers of the branch
// expansion for the exact families, powers of 2 otherwise).
std::vector<double> default_box_ladder(const IntervalMap& map, int depth);

struct BoundaryMassRow {
  double eps;
  double mass;
};

struct BoundaryMassDiagnostic {
  std::vector<BoundaryMassRow> rows;
  double slope = 0.0;  // empirical beta of the boundary-regularity bound
  double r2 = 0.0;
  bool truncated = false;
};

BoundaryMassDiagnostic boundary_mass_diagnostic(const GridMeasure& measure,
                                                const Hole& hole,
                                                std::span<const double> eps_ladder);

}  // namespace odyn

#endif
