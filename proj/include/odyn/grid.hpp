#ifndef ODYN_GRID_HPP
#define ODYN_GRID_HPP

#include <span>
#include <vector>

#include "odyn/errors.hpp"

namespace odyn {

// Cell mesh over [0,1].  Built from a uniform N-cell mesh with the nearest
// interior breakpoints snapped onto special points (hole endpoints, critical
// points, inducing-base endpoints) so those never fall inside a cell.
class Grid {
 public:
  static Grid uniform(int n_cells);
  static Grid uniform_snapped(int n_cells, std::span<const double> special);

  int cells() const { return static_cast<int>(bps_.size()) - 1; }
  double lo(int i) const { return bps_[i]; }
  double hi(int i) const { return bps_[i + 1]; }
  double width(int i) const { return bps_[i + 1] - bps_[i]; }
  double mid(int i) const { return 0.5 * (bps_[i] + bps_[i + 1]); }
  const std::vector<double>& breakpoints() const { return bps_; }

  // cell index containing x; the right endpoint belongs to the last cell
  int locate(double x) const;

  bool operator==(const Grid& o) const { return bps_ == o.bps_; }

 private:
  std::vector<double> bps_;
};

}  // namespace odyn

#endif
