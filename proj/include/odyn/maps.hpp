#ifndef ODYN_MAPS_HPP
#define ODYN_MAPS_HPP

#include <optional>
#include <string>
#include <vector>

#include "odyn/rational.hpp"

namespace odyn {

struct CriticalPoint {
  double location;  // strictly interior to [0,1]
  double order;     // non-flat: 2 <= order < infinity
};

enum class MapFamily {
  Logistic,
  Tent,
  Doubling,
  Tripling,
  PiecewiseLinearMarkov,
  Chebyshev,
};

// Affine branch from [a,b] onto [c,d]; d < c encodes a decreasing branch.
// The rational endpoints are authoritative; the doubles are regenerated from
// them on construction, along with the correctly rounded slope.
struct AffineBranch {
  double a, b, c, d;
  Rat ra, rb, rc, rd;
  double sd = 0.0;  // cached slope, set by IntervalMap

  double slope() const { return sd; }
};

// A multimodal self-map of [0,1] with closed-form derivative.  Instances are
// immutable after construction; all operations on them are pure.
class IntervalMap {
 public:
  static IntervalMap logistic(double lambda);
  static IntervalMap tent(double slope);
  static IntervalMap doubling();
  static IntervalMap tripling();
  static IntervalMap chebyshev(int degree);
  static IntervalMap piecewise_linear(std::vector<AffineBranch> branches,
                                      MapFamily label = MapFamily::PiecewiseLinearMarkov);

  double eval(double x) const;
  double deriv(double x) const;  // signed Df(x)

  const std::vector<CriticalPoint>& critical_points() const { return critical_; }

  // Endpoints of the monotonicity partition, including 0 and 1.  Between
  // consecutive breakpoints the map is strictly monotone.
  const std::vector<double>& monotone_breakpoints() const { return breakpoints_; }

  MapFamily family() const { return family_; }
  std::string name() const;
  double parameter() const { return param_; }

  bool piecewise_affine() const { return !branches_.empty(); }
  const std::vector<AffineBranch>& branches() const { return branches_; }

  // Preimage of y under the monotone piece [lo,hi]; error if y is outside the
  // image of that piece.
  double invert_on(double lo, double hi, double y) const;

  // Value of f at y through the monotone piece containing (lo,hi).  Unlike
  // eval this keeps branch right-endpoints on their own branch, so images of
  // pieces ending at a branch cut stay correct.
  double eval_within(double lo, double hi, double y) const;

  // Smallest |x - c| over critical points; +inf when the critical set is empty.
  double critical_distance(double x) const;

 private:
  IntervalMap() = default;

  MapFamily family_ = MapFamily::Doubling;
  double param_ = 0.0;  // lambda for logistic, slope for tent, degree for chebyshev
  std::vector<AffineBranch> branches_;
  std::vector<CriticalPoint> critical_;
  std::vector<double> breakpoints_;

  void finalize();
};

struct PeriodicOrbit {
  double point;       // z with f^p(z) = z
  int period;         // prime period
  double multiplier;  // Df^p(z)
  double lyapunov;    // (1/p) log |Df^p(z)|
};

struct ConditionParams {
  double gamma = 0.05;       // free expansion rate
  double kappa = 0.5;        // free expansion prefactor
  double Lambda = 0.05;      // Collet-Eckmann rate
  double theta_c = 0.0;      // slow-recurrence rate; 0 means Lambda/(10 l_c)
  double delta0 = 0.05;      // critical neighborhood radius
  int horizon = 50;

  double theta_for(double order) const {
    return theta_c > 0 ? theta_c : Lambda / (10.0 * order);
  }
};

struct ConditionRow {
  double point;      // critical point or hole center the row refers to
  double margin;     // smallest normalized margin observed over the horizon
  bool pass;
  int witness;       // step index of the worst margin
  std::string what;
};

struct ConditionReport {
  bool pass = true;
  bool vacuous = false;
  std::vector<ConditionRow> rows;
  std::string notes;
};

// Orbit [x, f(x), ..., f^n(x)].
std::vector<double> orbit(const IntervalMap& map, double x, int n);

// Birkhoff sum S_n log|Df|(x).  Errors if the orbit comes within `clearance`
// of a critical point before step n.
double birkhoff_log_deriv(const IntervalMap& map, double x, int n,
                          double clearance = 1e-10);

// All repelling periodic points of prime period p, found by sign-change
// bisection on the monotone pieces of f^p(x) - x.  Points with multiplier
// magnitude below 1 + tol are excluded and noted in `excluded` when given.
std::vector<PeriodicOrbit> periodic_points(const IntervalMap& map, int p,
                                           double tol = 1e-12,
                                           std::vector<double>* excluded = nullptr);

double lyapunov_at_periodic(const IntervalMap& map, const PeriodicOrbit& o);

// Finite-horizon check of the Collet-Eckmann growth and slow-recurrence
// conditions along critical orbits.  Vacuous pass for maps without critical
// points.  This is a diagnostic at horizon N, not a proof.
ConditionReport check_collet_eckmann(const IntervalMap& map, const ConditionParams& p);

// Sampled diagnostic for expansion outside the critical neighborhood: orbit
// segments that stay outside B_delta0(Crit) are tested against
// kappa * e^(gamma n).  Reported as a diagnostic only.
ConditionReport check_expansion(const IntervalMap& map, const ConditionParams& p,
                                int n_samples = 200, std::uint64_t seed = 1);

}  // namespace odyn

#endif
