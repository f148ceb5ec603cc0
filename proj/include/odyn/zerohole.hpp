#ifndef ODYN_ZEROHOLE_HPP
#define ODYN_ZEROHOLE_HPP

#include <functional>
#include <optional>
#include <vector>

#include "odyn/spectral.hpp"

namespace odyn {

// Limit of escape-rate / hole-mass as the hole shrinks to z: 1 at a generic
// center, 1 - |Df^p(z)|^{-t} e^{-p p_t} at a repelling periodic center.
double predicted_limit(const IntervalMap& map, double t, double z,
                       const std::optional<PeriodicOrbit>& orbit, double p_t);

struct RatioRow {
  double eps = 0.0;
  double escape = 0.0;
  double mu_hole = 0.0;
  double ratio = 0.0;
  int grid_cells = 0;
  bool ok = true;
};

struct RatioCurve {
  std::vector<RatioRow> rows;
  double predicted = 1.0;
  double extrapolated = 0.0;  // OLS intercept of ratio vs eps over the last rows
  double mean_tail = 0.0;     // plain mean of the same rows
};

struct GridPolicy {
  int base_cells = 4096;
  int min_cells_in_hole = 32;
};

// One eigenproblem pair per radius on a per-eps grid that resolves the hole;
// rows where the escape rate falls below eigen resolution are dropped.
RatioCurve ratio_curve(const IntervalMap& map, double t, double z,
                       std::span<const double> eps_list,
                       const std::optional<PeriodicOrbit>& orbit,
                       const GridPolicy& policy = {}, const EigenOptions& opt = {});

struct SlowApproachReport {
  double delta_z = 0.0;  // min over n,c of e^{n varsigma} |f^n(c) - z|
  bool pass = true;
  bool vacuous = false;
  int witness_n = 0;
  double varsigma = 0.1;
};

SlowApproachReport slow_approach_check(const IntervalMap& map, double z, double varsigma,
                                       int horizon);

struct ScalingReport {
  double s_t = 0.0;            // t + p_t / lambda(z)
  double empirical_slope = 0.0;
  double gap = 0.0;
  double lambda_used = 0.0;
};

// Scaling exponent of m_t at z, with the measured log-log slope of
// m_t(B_delta(z)) alongside.
ScalingReport scaling_exponent(const IntervalMap& map, double t, double z,
                               const std::optional<PeriodicOrbit>& orbit, const Grid& grid,
                               const SpectralBundle& closed);

struct ContinuationResult {
  std::vector<std::pair<double, PeriodicOrbit>> path;  // (parameter, orbit)
  bool complete = true;
  double reached = 0.0;
};

// Hyperbolic continuation of a repelling orbit along a one-parameter family;
// stops at the last safe parameter when the multiplier margin is violated.
ContinuationResult continue_periodic(const std::function<IntervalMap(double)>& family,
                                     double lambda_from, double lambda_to,
                                     const PeriodicOrbit& start, int steps,
                                     double margin = 0.05, double tol = 1e-12);

}  // namespace odyn

#endif
