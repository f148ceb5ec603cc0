#ifndef ODYN_INDUCING_HPP
#define ODYN_INDUCING_HPP

#include <string>
#include <vector>

#include "odyn/spectral.hpp"

namespace odyn {

struct InducedBranch {
  double lo, hi;  // domain X_i
  int tau;        // return time; F = f^tau maps [lo,hi] onto X
};

struct InducingScheme {
  double X_lo = 0.0, X_hi = 1.0;
  Hole hole;
  int depth = 0;
  std::vector<InducedBranch> branches;  // sorted by left endpoint
  double escaped_mass = 0.0;            // Lebesgue mass that entered the hole
  double unresolved_mass = 0.0;         // alive but unreturned at the cutoff
  bool budget_hit = false;
  std::string warnings;

  double base_length() const { return X_hi - X_lo; }
};

// Breadth-first full-branch refinement: a piece whose image covers X is cut
// into a full-return branch plus remainders; pieces entering the hole are
// discarded into escaped mass; pieces alive at depth N become unresolved
// mass.  Partial returns keep refining.
InducingScheme build_first_return(const IntervalMap& map, const Hole& hole, double X_lo,
                                  double X_hi, int depth,
                                  std::size_t budget = 1'000'000);

struct TailReport {
  std::vector<double> tail;  // m_t(tau > n)/m_t(X-resolved), n = 0..depth-1
  double C0 = 0.0;           // envelope constant
  double alpha = 0.0;        // fitted exponential rate
  int fit_lo = 0, fit_hi = 0;
  double r2 = 0.0;
  double unresolved_mass = 0.0;
};

// Return-time tail masses under m_t (Lebesgue when mt is null, exact for the
// linear families); branch masses below the grid scale interpolate the
// piecewise-constant density.
TailReport tail_distribution(const InducingScheme& scheme, double t,
                             const GridMeasure* mt = nullptr);

struct DistortionReport {
  double C_d = 0.0;
  std::vector<double> per_branch;
  int pairs_per_branch = 0;
};

// Bounded-distortion constant of the induced potential: max over branches and
// Chebyshev-spaced pairs of |e^{S_tau phi_t(x) - S_tau phi_t(y)} - 1| /
// |F(x) - F(y)|.  Evaluated in log space; exactly 0 for piecewise-linear
// maps and for t = 0.
DistortionReport distortion_check(const IntervalMap& map, const InducingScheme& scheme,
                                  double t, int pairs_per_branch = 8);

void write_scheme_text(const InducingScheme& scheme, const std::string& path);

}  // namespace odyn

#endif
