#ifndef ODYN_OPEN_SYSTEM_HPP
#define ODYN_OPEN_SYSTEM_HPP

#include <optional>
#include <string>
#include <vector>

#include "odyn/maps.hpp"

namespace odyn {

// One open component (lo,hi) of a hole with a marked interior point.
struct HoleComponent {
  double lo, hi;
  double center;
  Rat rlo, rhi;
};

class Hole {
 public:
  Hole() = default;
  static Hole from_components(std::vector<HoleComponent> comps);
  static Hole interval(double lo, double hi);
  static Hole interval(const Rat& lo, const Rat& hi);
  // grammar: (a,b)[;(a,b)]* with optional third field center=z, values
  // decimal or p/q
  static Hole parse(const std::string& spec);

  bool empty() const { return comps_.empty(); }
  const std::vector<HoleComponent>& components() const { return comps_; }
  double total_length() const;
  bool contains(double x) const;           // open membership
  bool contains_closure(double x) const;   // closed membership
  double boundary_distance(double x) const;
  std::vector<double> endpoints() const;
  std::string to_string() const;

 private:
  std::vector<HoleComponent> comps_;
};

class OpenSystem {
 public:
  OpenSystem(IntervalMap map, Hole hole);

  const IntervalMap& map() const { return map_; }
  const Hole& hole() const { return hole_; }

 private:
  IntervalMap map_;
  Hole hole_;
};

struct Interval {
  double lo, hi;
  double width() const { return hi - lo; }
};

struct SurvivorRefinement {
  int depth = 0;
  std::vector<Interval> intervals;  // closures of the connected components
  double lebesgue_mass = 0.0;
  bool complete = true;  // false when the interval budget was hit
  // exact masses are available for piecewise-affine maps
  std::optional<Rat> exact_mass;
};

// true iff f^k(x) stays out of the hole for all 0 <= k <= n
bool survives(const OpenSystem& sys, double x, int n);

// Exact interval decomposition of the n-step survivor set (its closure),
// obtained by pulling hole endpoints back through monotone branches.
SurvivorRefinement refine_survivor(const OpenSystem& sys, int n,
                                   std::size_t budget = 10'000'000);

// Preimage f^{-steps}(intervals) as a sorted disjoint union, double path.
std::vector<Interval> preimage_intervals(const IntervalMap& map,
                                         std::vector<Interval> intervals, int steps);

// Exact preimage for piecewise-affine maps.
std::vector<std::pair<Rat, Rat>> preimage_intervals_exact(
    const IntervalMap& map, std::vector<std::pair<Rat, Rat>> intervals, int steps);

// (H1): critical orbits stay away from the hole boundary at rate
// delta0 e^(-theta k) up to the horizon.
ConditionReport check_H1(const OpenSystem& sys, const ConditionParams& params);

// (H2)(a)+(c): center orbits avoid the critical set, and the derivative along
// each center reaches max(kappa e^(gamma r), 4) at some r <= horizon.
// (H2)(b) is out of scope for the checker and flagged in the notes.
ConditionReport check_H2_orbit_separation(const OpenSystem& sys,
                                          const ConditionParams& params);

// Empirical covering time: smallest n at which every interval of length
// delta/3 on a scan grid has f^n(omega) = [0,1].  A stand-in diagnostic, not
// the n(delta) of the mixing statement.
int covering_time(const IntervalMap& map, double delta, int horizon = 64);

}  // namespace odyn

#endif
