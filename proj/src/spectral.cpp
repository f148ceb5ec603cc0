#include "odyn/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numeric>

#include "odyn/fit.hpp"

namespace odyn {

namespace {

// 8-point Gauss-Legendre on [-1,1]
constexpr double kGlNode[8] = {-0.9602898564975363, -0.7966664774136267,
                               -0.5255324099163290, -0.1834346424956498,
                               0.1834346424956498,  0.5255324099163290,
                               0.7966664774136267,  0.9602898564975363};
constexpr double kGlWeight[8] = {0.1012285362903763, 0.2223810344533745,
                                 0.3137066458778873, 0.3626837833783620,
                                 0.3626837833783620, 0.3137066458778873,
                                 0.2223810344533745, 0.1012285362903763};

double integrate_weight(const IntervalMap& map, double t, double a, double b) {
  if (t == 1.0) return b - a;  // |Df|^0, exact
  const double half = 0.5 * (b - a), mid = 0.5 * (a + b);
  double acc = 0.0;
  for (int q = 0; q < 8; ++q) {
    const double x = mid + half * kGlNode[q];
    acc += kGlWeight[q] * std::pow(std::abs(map.deriv(x)), 1.0 - t);
  }
  return acc * half;
}

double max_critical_order(const IntervalMap& map) {
  double m = 2.0;
  for (const auto& c : map.critical_points()) m = std::max(m, c.order);
  return m;
}

// interval inside the closure of some hole component
bool hull_in_hole(const Hole& hole, double lo, double hi) {
  for (const auto& c : hole.components())
    if (lo >= c.lo && hi <= c.hi) return true;
  return false;
}

// cell maps entirely into the hole closure
bool cell_in_preimage(const IntervalMap& map, const Hole& hole, double lo, double hi) {
  const auto& bps = map.monotone_breakpoints();
  for (std::size_t p = 0; p + 1 < bps.size(); ++p) {
    const double a = std::max(lo, bps[p]), b = std::min(hi, bps[p + 1]);
    if (!(a < b)) continue;
    double u = map.eval(a), v = map.eval(b);
    if (u > v) std::swap(u, v);
    if (!hull_in_hole(hole, u, v)) return false;
  }
  return true;
}

struct AssemblyFlags {
  int merged_segments = 0;
};

// All weight transported out of source cell i, as (target, value) pairs.
void assemble_cell(const IntervalMap& map, double t, const Grid& grid, int i,
                   bool punctured, const std::vector<char>& mask,
                   std::vector<Triplet>& out, AssemblyFlags& flags) {
  const double clo = grid.lo(i), chi = grid.hi(i);
  const auto& bps = map.monotone_breakpoints();
  if (map.piecewise_affine()) {
    // image endpoints snap onto coincident grid breakpoints so that aligned
    // Markov instances yield exact entries with no rounding slivers
    const auto& gb = grid.breakpoints();
    auto snap = [&](double y) {
      auto it = std::lower_bound(gb.begin(), gb.end(), y - 1e-13);
      if (it != gb.end() && std::abs(*it - y) <= 1e-13) return *it;
      return y;
    };
    for (const auto& br : map.branches()) {
      const double a = std::max(clo, br.a), b = std::min(chi, br.b);
      if (!(a < b)) continue;
      const double s = br.slope();
      double u = snap(br.c + s * (a - br.a));
      double v = snap(br.c + s * (b - br.a));
      if (u > v) std::swap(u, v);
      const double w = std::pow(std::abs(s), -t);
      int j0 = grid.locate(std::clamp(u, 0.0, 1.0));
      for (int j = j0; j < grid.cells() && grid.lo(j) < v; ++j) {
        const double ov = std::min(v, grid.hi(j)) - std::max(u, grid.lo(j));
        if (ov <= 0.0) continue;
        if (punctured && mask[j]) continue;
        out.push_back({j, i, w * (ov / grid.width(j))});
      }
    }
    return;
  }
  for (std::size_t p = 0; p + 1 < bps.size(); ++p) {
    const double a = std::max(clo, bps[p]), b = std::min(chi, bps[p + 1]);
    if (!(a < b)) continue;
    const double fa = map.eval(a), fb = map.eval(b);
    const bool inc = fa <= fb;
    const double ilo = inc ? fa : fb, ihi = inc ? fb : fa;
    // pull grid breakpoints inside the image back into [a,b]
    const auto& gb = grid.breakpoints();
    auto first = std::upper_bound(gb.begin(), gb.end(), ilo);
    auto last = std::lower_bound(gb.begin(), gb.end(), ihi);
    std::vector<double> cuts{a};
    if (inc)
      for (auto it = first; it != last; ++it) cuts.push_back(map.invert_on(a, b, *it));
    else
      for (auto it = std::make_reverse_iterator(last); it != std::make_reverse_iterator(first);
           ++it)
        cuts.push_back(map.invert_on(a, b, *it));
    cuts.push_back(b);
    std::sort(cuts.begin(), cuts.end());
    // segments below quadrature width are folded into the previous one
    std::vector<double> xs{cuts.front()};
    for (std::size_t k = 1; k < cuts.size(); ++k) {
      if (cuts[k] - xs.back() < 1e-14 && k + 1 < cuts.size())
        ++flags.merged_segments;
      else
        xs.push_back(cuts[k]);
    }
    for (std::size_t k = 0; k + 1 < xs.size(); ++k) {
      const double xa = xs[k], xb = xs[k + 1];
      if (!(xa < xb)) continue;
      const double ymid = map.eval(0.5 * (xa + xb));
      const int j = grid.locate(std::clamp(ymid, 0.0, 1.0));
      if (punctured && mask[j]) continue;
      const double integral = integrate_weight(map, t, xa, xb);
      if (integral != 0.0) out.push_back({j, i, integral / grid.width(j)});
    }
  }
}

}  // namespace

WeightedUlamOperator assemble(const IntervalMap& map, double t, const Grid& grid,
                              const Hole* hole, bool parallel) {
  const double t_max = 2.0 - 1.0 / max_critical_order(map);
  if (!map.critical_points().empty() && t >= t_max)
    throw DomainError("t=" + std::to_string(t) + " outside integrable range (t < " +
                      std::to_string(t_max) + ")");

  WeightedUlamOperator op;
  op.grid_ = grid;
  op.t_ = t;
  const int n = grid.cells();
  op.mask_.assign(n, 0);
  op.punctured_ = hole != nullptr && !hole->empty();
  if (op.punctured_) {
    for (int i = 0; i < n; ++i) {
      if (hull_in_hole(*hole, grid.lo(i), grid.hi(i)) ||
          cell_in_preimage(map, *hole, grid.lo(i), grid.hi(i)))
        op.mask_[i] = 1;
    }
  }

  std::vector<std::vector<Triplet>> per_cell(n);
  std::vector<AssemblyFlags> flags(n);
#pragma omp parallel for schedule(dynamic, 64) if (parallel)
  for (int i = 0; i < n; ++i) {
    if (op.punctured_ && op.mask_[i]) continue;  // column of a masked cell
    assemble_cell(map, t, grid, i, op.punctured_, op.mask_, per_cell[i], flags[i]);
  }

  std::vector<Triplet> ts;
  std::size_t total = 0;
  for (const auto& v : per_cell) total += v.size();
  ts.reserve(total);
  int merged = 0;
  for (int i = 0; i < n; ++i) {
    ts.insert(ts.end(), per_cell[i].begin(), per_cell[i].end());
    merged += flags[i].merged_segments;
  }
  if (merged > 0)
    op.warnings_ += "merged " + std::to_string(merged) + " sub-quadrature segments; ";
  op.mat_ = Csr::from_triplets(n, ts);
  op.matT_ = op.mat_.transposed();
  return op;
}

WeightedUlamOperator WeightedUlamOperator::build(const IntervalMap& map, double t,
                                                 const Grid& grid, const Hole* hole) {
  return assemble(map, t, grid, hole, true);
}

WeightedUlamOperator WeightedUlamOperator::build_serial(const IntervalMap& map, double t,
                                                        const Grid& grid, const Hole* hole) {
  return assemble(map, t, grid, hole, false);
}

void WeightedUlamOperator::write_coordinate_text(const std::string& path, double p_t) const {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open " + path);
  char buf[128];
  std::snprintf(buf, sizeof buf, "# N=%d t=%.12g p_t=%.12g punctured=%d\n", grid_.cells(),
                t_, p_t, punctured_ ? 1 : 0);
  f << buf << "# mask=";
  bool first = true;
  for (int i = 0; i < grid_.cells(); ++i) {
    if (!mask_[i]) continue;
    int j = i;
    while (j + 1 < grid_.cells() && mask_[j + 1]) ++j;
    f << (first ? "" : ",") << i << "-" << j;
    first = false;
    i = j;
  }
  f << "\n";
  for (int r = 0; r < mat_.n; ++r)
    for (std::int64_t k = mat_.rowptr[r]; k < mat_.rowptr[r + 1]; ++k) {
      std::snprintf(buf, sizeof buf, "%d %d %.12g\n", r, mat_.col[k], mat_.val[k]);
      f << buf;
    }
}

namespace {

struct PowerOutcome {
  double rho = 0.0;
  std::vector<double> vec;
  double residual = 0.0;
  int iterations = 0;
};

PowerOutcome power_iterate(const Csr& m, const EigenOptions& opt) {
  PowerOutcome out;
  const int n = m.n;
  std::vector<double> v(n, 1.0 / n), y(n, 0.0);
  for (int it = 1; it <= opt.max_iter; ++it) {
    matvec(m, v, y);
    double rho = 0.0;
    for (double x : y) rho += x;  // entries are nonnegative
    out.iterations = it;
    if (rho == 0.0) {
      out.rho = 0.0;
      out.vec.clear();
      out.residual = 0.0;
      return out;
    }
    double resid = 0.0;
    for (int i = 0; i < n; ++i) resid += std::abs(y[i] - rho * v[i]);
    const double inv = 1.0 / rho;
    for (int i = 0; i < n; ++i) v[i] = y[i] * inv;
    out.rho = rho;
    out.residual = resid;
    if (resid <= opt.tol) {
      out.vec = std::move(v);
      return out;
    }
  }
  throw NumericError("power iteration did not converge: residual=" +
                     std::to_string(out.residual) + " after " +
                     std::to_string(opt.max_iter) + " iterations");
}

// spectral radius of the submatrix on `cells`, coarse tolerance
double class_radius(const Csr& m, const std::vector<int>& cells) {
  std::vector<int> index(m.n, -1);
  for (std::size_t k = 0; k < cells.size(); ++k) index[cells[k]] = static_cast<int>(k);
  std::vector<Triplet> ts;
  for (int r : cells)
    for (std::int64_t k = m.rowptr[r]; k < m.rowptr[r + 1]; ++k)
      if (index[m.col[k]] >= 0) ts.push_back({index[r], index[m.col[k]], m.val[k]});
  Csr sub = Csr::from_triplets(static_cast<int>(cells.size()), ts);
  EigenOptions opt;
  opt.tol = 1e-9;
  opt.max_iter = 5000;
  try {
    return power_iterate(sub, opt).rho;
  } catch (const NumericError&) {
    return 0.0;
  }
}

}  // namespace

namespace {

SpectralResult run_power(const Csr& mat_in, const Csr& matT_in, const EigenOptions& opt,
                         std::string warnings) {
  SpectralResult res;
  res.warnings = std::move(warnings);

  const Csr* mat = &mat_in;
  const Csr* matT = &matT_in;
  Csr restricted, restrictedT;

  std::vector<int> nontrivial;
  std::vector<int> comp = strongly_connected_components(*mat, &nontrivial);
  if (nontrivial.size() > 1) {
    // several recurrent classes: keep the one with the largest radius plus
    // everything upstream and downstream of it
    double best = -1.0;
    int best_class = nontrivial.front();
    for (int c : nontrivial) {
      std::vector<int> cells;
      for (int i = 0; i < mat->n; ++i)
        if (comp[i] == c) cells.push_back(i);
      const double r = class_radius(*mat, cells);
      if (r > best + 1e-14) {
        best = r;
        best_class = c;
      } else if (std::abs(r - best) <= 1e-9 * std::max(1.0, best)) {
        res.warnings += "near-degenerate competing recurrent classes; ";
      }
    }
    std::vector<char> seed(mat->n, 0);
    for (int i = 0; i < mat->n; ++i)
      if (comp[i] == best_class) seed[i] = 1;
    std::vector<char> up = reachable(*mat, seed);     // cells feeding the class
    std::vector<char> down = reachable(*matT, seed);  // cells fed by the class
    std::vector<Triplet> ts;
    for (int r = 0; r < mat->n; ++r) {
      if (!(up[r] || down[r])) continue;
      for (std::int64_t k = mat->rowptr[r]; k < mat->rowptr[r + 1]; ++k) {
        const int c = mat->col[k];
        if (up[c] || down[c]) ts.push_back({r, c, mat->val[k]});
      }
    }
    restricted = Csr::from_triplets(mat->n, ts);
    restrictedT = restricted.transposed();
    mat = &restricted;
    matT = &restrictedT;
    res.warnings += "reducible support: restricted to dominant communicating class; ";
  }

  PowerOutcome right = power_iterate(*mat, opt);
  if (right.rho == 0.0) {
    res.rho = 0.0;
    res.iterations = right.iterations;
    return res;
  }
  PowerOutcome left = power_iterate(*matT, opt);
  res.rho = right.rho;
  res.right = std::move(right.vec);
  res.left = std::move(left.vec);
  res.residual_right = right.residual;
  res.residual_left = left.residual;
  res.iterations = right.iterations + left.iterations;
  if (std::abs(right.rho - left.rho) > 1e3 * opt.tol * std::max(1.0, right.rho))
    res.warnings += "left/right eigenvalue mismatch " +
                    std::to_string(std::abs(right.rho - left.rho)) + "; ";
  return res;
}

}  // namespace

SpectralResult leading_eigen(const WeightedUlamOperator& op, const EigenOptions& opt) {
  return run_power(op.matrix(), op.matrix_transposed(), opt, op.warnings());
}

SpectralResult leading_eigen_matrix(const Csr& mat, const EigenOptions& opt) {
  return run_power(mat, mat.transposed(), opt, "");
}

double GridMeasure::mass_between(double lo, double hi) const {
  double m = 0.0;
  for (int i = 0; i < grid.cells(); ++i) {
    const double ov = std::min(hi, grid.hi(i)) - std::max(lo, grid.lo(i));
    if (ov > 0.0) m += masses[i] * (ov / grid.width(i));
  }
  return m;
}

double GridMeasure::mass_of_ball(double center, double radius) const {
  return mass_between(std::max(0.0, center - radius), std::min(1.0, center + radius));
}

Grid make_grid(const IntervalMap& map, const Hole& hole, int n_cells,
               std::span<const double> extra) {
  std::vector<double> special;
  for (double e : hole.endpoints()) special.push_back(e);
  for (const auto& c : map.critical_points()) special.push_back(c.location);
  for (double e : extra) special.push_back(e);
  return Grid::uniform_snapped(n_cells, special);
}

SpectralBundle solve_closed(const IntervalMap& map, double t, const Grid& grid,
                            const EigenOptions& opt) {
  auto op = WeightedUlamOperator::build(map, t, grid);
  SpectralBundle b;
  b.potential.t = t;
  b.closed = leading_eigen(op, opt);
  if (b.closed.rho <= 0.0) throw NumericError("closed operator has zero leading eigenvalue");
  b.potential.p_t = std::log(b.closed.rho);

  const int n = grid.cells();
  b.m_t.grid = grid;
  b.m_t.masses = b.closed.left;  // left eigenvector is the cell-mass functional
  double total = std::accumulate(b.m_t.masses.begin(), b.m_t.masses.end(), 0.0);
  for (auto& m : b.m_t.masses) m /= total;

  double vm = 0.0;
  for (int i = 0; i < n; ++i) vm += b.closed.right[i] * b.m_t.masses[i];
  if (vm <= 0.0) throw NumericError("degenerate equilibrium normalization");
  b.g0.resize(n);
  for (int i = 0; i < n; ++i) b.g0[i] = b.closed.right[i] / vm;
  b.mu_t.grid = grid;
  b.mu_t.masses.resize(n);
  for (int i = 0; i < n; ++i) b.mu_t.masses[i] = b.g0[i] * b.m_t.masses[i];
  return b;
}

double pressure(const IntervalMap& map, double t, const Grid& grid,
                const EigenOptions& opt) {
  auto op = WeightedUlamOperator::build(map, t, grid);
  auto eig = leading_eigen(op, opt);
  if (eig.rho <= 0.0) throw NumericError("zero leading eigenvalue for closed operator");
  return std::log(eig.rho);
}

GridMeasure conformal_measure(const IntervalMap& map, double t, const Grid& grid,
                              const EigenOptions& opt) {
  return solve_closed(map, t, grid, opt).m_t;
}

EscapeSpectral escape_spectral(const IntervalMap& map, const Hole& hole, double t,
                               const Grid& grid, const SpectralBundle& closed,
                               const EigenOptions& opt) {
  if (!closed.potential.p_t || closed.potential.t != t)
    throw DomainError("escape_spectral needs the closed solve for the same t and grid");
  if (!(closed.m_t.grid == grid))
    throw DomainError("escape_spectral must reuse the grid of the closed solve");
  auto op = WeightedUlamOperator::build(map, t, grid, &hole);
  EscapeSpectral es;
  es.punctured = leading_eigen(op, opt);
  const double ept = std::exp(*closed.potential.p_t);
  es.lambda = es.punctured.rho / ept;
  if (es.lambda > 1.0 + 1e3 * opt.tol)
    throw NumericError("punctured eigenvalue exceeds e^{p_t}: inconsistent grids");
  if (es.punctured.rho == 0.0) {
    es.rate = std::numeric_limits<double>::infinity();
    return es;
  }
  es.rate = std::max(0.0, -std::log(es.lambda));
  const int n = grid.cells();
  es.g_H.assign(n, 0.0);
  double norm = 0.0;
  for (int i = 0; i < n; ++i) norm += es.punctured.right[i] * closed.m_t.masses[i];
  if (norm <= 0.0) throw NumericError("degenerate conditionally invariant density");
  for (int i = 0; i < n; ++i) es.g_H[i] = es.punctured.right[i] / norm;
  return es;
}

ConvergenceTrace convergence_trace(const IntervalMap& map, const Hole& hole, double t,
                                   const Grid& grid, std::vector<double> psi, int n_max,
                                   const SpectralBundle& closed, const EigenOptions& opt) {
  for (double p : psi)
    if (p < 0.0) throw DomainError("convergence_trace needs psi >= 0");
  auto es = escape_spectral(map, hole, t, grid, closed, opt);
  auto op = WeightedUlamOperator::build(map, t, grid, &hole);
  const int n = grid.cells();

  ConvergenceTrace tr;
  std::vector<double> phi = std::move(psi), next(n);
  for (int step = 0; step <= n_max; ++step) {
    double norm = 0.0;
    for (int i = 0; i < n; ++i) norm += std::abs(phi[i]) * closed.m_t.masses[i];
    if (norm < 1e-280) break;  // underflow: return the prefix
    double d = 0.0;
    for (int i = 0; i < n; ++i)
      d += std::abs(phi[i] / norm - es.g_H[i]) * closed.m_t.masses[i];
    tr.distances.push_back(d);
    if (step < n_max) {
      for (int i = 0; i < n; ++i) phi[i] /= norm;
      matvec(op.matrix(), phi, next);
      std::swap(phi, next);
    }
  }

  // geometric rate over the window where the decay is clean
  std::vector<double> xs, ys;
  const double floor_d = std::max(1e-13, 10.0 * es.punctured.residual_right);
  for (std::size_t k = 1; k < tr.distances.size(); ++k) {
    if (tr.distances[k] > floor_d) {
      xs.push_back(static_cast<double>(k));
      ys.push_back(std::log(tr.distances[k]));
    }
  }
  if (xs.size() >= 3) {
    // drop the initial transient: keep the latter half of usable points
    const std::size_t start = xs.size() / 2 >= 2 ? xs.size() / 2 - 1 : 0;
    std::vector<double> x2(xs.begin() + start, xs.end());
    std::vector<double> y2(ys.begin() + start, ys.end());
    auto fit = fit_line(x2, y2);
    tr.fitted_rate = std::exp(fit.slope);
    tr.fit_lo = static_cast<int>(x2.front());
    tr.fit_hi = static_cast<int>(x2.back());
  }
  return tr;
}

}  // namespace odyn
