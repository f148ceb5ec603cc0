#include "odyn/grid.hpp"

#include <algorithm>
#include <cmath>

namespace odyn {

Grid Grid::uniform(int n_cells) {
  if (n_cells < 1) throw DomainError("grid needs at least one cell");
  Grid g;
  g.bps_.resize(n_cells + 1);
  for (int i = 0; i <= n_cells; ++i) g.bps_[i] = static_cast<double>(i) / n_cells;
  g.bps_.front() = 0.0;
  g.bps_.back() = 1.0;
  return g;
}

Grid Grid::uniform_snapped(int n_cells, std::span<const double> special) {
  Grid g = uniform(n_cells);
  auto& bps = g.bps_;
  std::vector<bool> claimed(bps.size(), false);
  std::vector<double> to_insert;
  for (double s : special) {
    if (!(s > 0.0 && s < 1.0)) continue;
    auto it = std::lower_bound(bps.begin(), bps.end(), s);
    std::size_t j = static_cast<std::size_t>(it - bps.begin());
    if (j < bps.size() && bps[j] == s) {
      claimed[j] = true;
      continue;
    }
    // nearest interior breakpoint, snapped only if free and order-preserving
    std::size_t cand = j;
    if (j > 0 && (j == bps.size() || s - bps[j - 1] < bps[j] - s)) cand = j - 1;
    if (cand > 0 && cand + 1 < bps.size() && !claimed[cand] && bps[cand - 1] < s &&
        s < bps[cand + 1]) {
      bps[cand] = s;
      claimed[cand] = true;
    } else {
      to_insert.push_back(s);
    }
  }
  for (double s : to_insert) bps.push_back(s);
  std::sort(bps.begin(), bps.end());
  bps.erase(std::unique(bps.begin(), bps.end()), bps.end());
  return g;
}

int Grid::locate(double x) const {
  if (x < 0.0 || x > 1.0) throw DomainError("locate: point outside [0,1]");
  auto it = std::upper_bound(bps_.begin(), bps_.end(), x);
  int i = static_cast<int>(it - bps_.begin()) - 1;
  return std::min(std::max(i, 0), cells() - 1);
}

}  // namespace odyn
