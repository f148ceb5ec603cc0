#include "odyn/escape.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "odyn/fit.hpp"
#include "odyn/rng.hpp"

namespace odyn {

EscapeEstimate escape_direct(const IntervalMap& map, const Hole& hole, double t,
                             const Grid& grid, int n_max, const SpectralBundle& closed,
                             const EigenOptions& opt) {
  (void)opt;
  if (!closed.potential.p_t) throw DomainError("escape_direct needs the closed solve");
  auto op = WeightedUlamOperator::build(map, t, grid, &hole);
  const int n_cells = grid.cells();
  const double p_t = *closed.potential.p_t;

  // mass_n = m_t(survivor_n) up to a constant offset absorbed by the fit;
  // the iterate is renormalized every step to dodge underflow
  std::vector<double> u(n_cells, 0.0), next(n_cells);
  for (int i = 0; i < n_cells; ++i)
    if (!op.mask()[i]) u[i] = 1.0;
  std::vector<double> log_mass;
  double log_scale = 0.0;
  for (int n = 0; n <= n_max; ++n) {
    double s = 0.0;
    for (int i = 0; i < n_cells; ++i) s += closed.m_t.masses[i] * u[i];
    if (s <= 0.0 || !std::isfinite(std::log(s) + log_scale)) break;
    log_mass.push_back(std::log(s) + log_scale - n * p_t);
    if (n == n_max) break;
    const double inv = 1.0 / s;
    for (int i = 0; i < n_cells; ++i) u[i] *= inv;
    log_scale += std::log(s);
    matvec(op.matrix(), u, next);
    std::swap(u, next);
  }

  // shrink the window from the left until the decay is numerically linear
  const int total = static_cast<int>(log_mass.size());
  EscapeEstimate est;
  est.method = EscapeMethod::DirectFit;
  est.grid_cells = n_cells;
  for (int lo = 0; total - lo >= 10; ++lo) {
    std::vector<double> xs, ys;
    for (int n = lo; n < total; ++n) {
      xs.push_back(n);
      ys.push_back(-log_mass[n]);
    }
    auto fit = fit_line(xs, ys);
    if (fit.r2 >= 0.999) {
      est.rate = fit.slope;
      est.window_lo = lo;
      est.window_hi = total - 1;
      est.stderr_ = fit.slope_stderr;
      est.r2 = fit.r2;
      return est;
    }
  }
  if (hole.empty() && total >= 2) {  // no escape: slope is zero by construction
    est.rate = 0.0;
    est.window_hi = total - 1;
    est.r2 = 1.0;
    return est;
  }
  throw NumericError("escape_direct: no 10-step window with linear decay; try a larger "
                     "hole or smaller n_max");
}

EscapeEstimate escape_mc(const IntervalMap& map, const Hole& hole, int n,
                         std::int64_t n_samples, std::uint64_t seed) {
  if (n < 1 || n_samples < 1) throw DomainError("escape_mc needs n >= 1, samples >= 1");
  constexpr std::int64_t kBlock = 1 << 14;
  const std::int64_t blocks = (n_samples + kBlock - 1) / kBlock;

  // death_at[k]: first entry into the hole at step k; n+1 means survived
  std::vector<std::int64_t> death_at(n + 2, 0);
#pragma omp parallel
  {
    std::vector<std::int64_t> local(n + 2, 0);
#pragma omp for schedule(static)
    for (std::int64_t b = 0; b < blocks; ++b) {
      SplitMix64 rng(substream_seed(seed, static_cast<std::uint64_t>(b)));
      const std::int64_t lo = b * kBlock;
      const std::int64_t hi = std::min(n_samples, lo + kBlock);
      for (std::int64_t s = lo; s < hi; ++s) {
        double x = rng.uniform();
        int died = n + 1;
        for (int k = 0; k <= n; ++k) {
          if (hole.contains(x)) {
            died = k;
            break;
          }
          if (k < n) x = map.eval(x);
        }
        local[died]++;
      }
    }
#pragma omp critical
    for (int k = 0; k <= n + 1; ++k) death_at[k] += local[k];
  }

  std::vector<double> survivors(n + 1, 0.0);
  std::int64_t alive = n_samples;
  for (int k = 0; k <= n; ++k) {
    alive -= death_at[k];
    survivors[k] = static_cast<double>(alive);
  }

  EscapeEstimate est;
  est.method = EscapeMethod::MonteCarlo;
  est.seed = seed;
  est.samples = n_samples;
  if (hole.empty()) {
    est.rate = 0.0;
    est.window_hi = n;
    return est;
  }

  // per-step log-ratios are conditionally independent binomial increments,
  // so the inverse-variance weighted mean has an honest stderr; the first few
  // increments carry the subleading spectral mode and are skipped
  const int k_lo = std::max(2, std::min(5, n / 3));
  int k_hi = k_lo;
  for (int k = k_lo; k <= n; ++k)
    if (survivors[k] >= 100.0) k_hi = k;
  if (k_hi - k_lo < 3)
    throw NumericError("escape_mc: fewer than 100 survivors over the fit window");
  double acc = 0.0, wsum = 0.0;
  for (int k = k_lo + 1; k <= k_hi; ++k) {
    if (survivors[k] <= 0.0 || survivors[k - 1] <= survivors[k] - 0.5) continue;
    const double d = std::log(survivors[k - 1] / survivors[k]);
    const double var = std::max(1.0 / survivors[k] - 1.0 / survivors[k - 1], 1e-15);
    acc += d / var;
    wsum += 1.0 / var;
  }
  if (wsum <= 0.0) throw NumericError("escape_mc: no usable decay increments");
  est.rate = acc / wsum;
  est.stderr_ = 1.0 / std::sqrt(wsum);
  est.window_lo = k_lo;
  est.window_hi = k_hi;
  return est;
}

namespace {

int rat_index(const std::vector<Rat>& pts, const Rat& x) {
  for (std::size_t i = 0; i < pts.size(); ++i)
    if (pts[i] == x) return static_cast<int>(i);
  return -1;
}

}  // namespace

SFTModel build_sft(const IntervalMap& map, const Hole& hole) {
  if (!map.piecewise_affine())
    throw OracleUnavailable("SFT oracle needs a piecewise-linear map");
  std::vector<Rat> pts;
  for (const auto& br : map.branches()) {
    pts.push_back(br.ra);
    pts.push_back(br.rb);
  }
  for (const auto& c : hole.components()) {
    pts.push_back(c.rlo);
    pts.push_back(c.rhi);
  }
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  const int n_all = static_cast<int>(pts.size()) - 1;

  struct MarkovCell {
    Rat lo, hi, img_lo, img_hi;
    double log_slope;
    bool in_hole;
  };
  std::vector<MarkovCell> cells;
  for (int i = 0; i < n_all; ++i) {
    MarkovCell c;
    c.lo = pts[i];
    c.hi = pts[i + 1];
    const AffineBranch* owner = nullptr;
    for (const auto& br : map.branches())
      if (br.ra <= c.lo && c.hi <= br.rb) {
        owner = &br;
        break;
      }
    if (!owner) throw OracleUnavailable("Markov cell straddles a branch boundary");
    const Rat slope = (owner->rd - owner->rc) / (owner->rb - owner->ra);
    Rat u = owner->rc + slope * (c.lo - owner->ra);
    Rat v = owner->rc + slope * (c.hi - owner->ra);
    if (u > v) boost::multiprecision::swap(u, v);
    if (rat_index(pts, u) < 0 || rat_index(pts, v) < 0)
      throw OracleUnavailable("cell image endpoints do not align with the partition: "
                              "system is not Markov for this hole");
    c.img_lo = u;
    c.img_hi = v;
    c.log_slope = std::log(std::abs(rat_to_double(slope)));
    c.in_hole = false;
    for (const auto& hc : hole.components())
      if (c.lo >= hc.rlo && c.hi <= hc.rhi) c.in_hole = true;
    cells.push_back(std::move(c));
  }

  SFTModel model;
  std::vector<int> keep;
  for (int i = 0; i < n_all; ++i)
    if (!cells[i].in_hole) keep.push_back(i);
  model.symbols = static_cast<int>(keep.size());
  if (model.symbols > 1000) throw OracleUnavailable("SFT symbol count above 1000");
  model.allowed.assign(model.symbols, std::vector<char>(model.symbols, 0));
  for (int a = 0; a < model.symbols; ++a) {
    const auto& ca = cells[keep[a]];
    model.cells.push_back({rat_to_double(ca.lo), rat_to_double(ca.hi)});
    model.log_slopes.push_back(ca.log_slope);
    for (int b = 0; b < model.symbols; ++b) {
      const auto& cb = cells[keep[b]];
      model.allowed[a][b] = (ca.img_lo <= cb.lo && cb.hi <= ca.img_hi) ? 1 : 0;
    }
  }
  return model;
}

namespace {

// weighted transition matrix as Csr in target-row convention
Csr sft_matrix(const SFTModel& model, double t) {
  std::vector<Triplet> ts;
  for (int i = 0; i < model.symbols; ++i) {
    const double w = std::exp(-t * model.log_slopes[i]);
    for (int j = 0; j < model.symbols; ++j)
      if (model.allowed[i][j]) ts.push_back({j, i, w});
  }
  return Csr::from_triplets(model.symbols, ts);
}

}  // namespace

double sft_pressure(const SFTModel& model, double t) {
  EigenOptions opt;
  opt.tol = 1e-14;
  auto eig = leading_eigen_matrix(sft_matrix(model, t), opt);
  if (eig.rho <= 0.0) throw NumericError("empty subshift: everything escapes");
  return std::log(eig.rho);
}

SFTEquilibrium sft_equilibrium(const SFTModel& model, double t) {
  EigenOptions opt;
  opt.tol = 1e-14;
  auto eig = leading_eigen_matrix(sft_matrix(model, t), opt);
  if (eig.rho <= 0.0) throw NumericError("empty subshift: everything escapes");
  SFTEquilibrium eq;
  eq.t = t;
  eq.rho = eig.rho;
  eq.pressure = std::log(eig.rho);
  // in target-row convention the right vector of B is the left of the matrix
  eq.right = eig.left;
  eq.left = eig.right;
  eq.stationary.resize(model.symbols);
  double total = 0.0;
  for (int i = 0; i < model.symbols; ++i) {
    eq.stationary[i] = eq.left[i] * eq.right[i];
    total += eq.stationary[i];
  }
  if (total <= 0.0) throw NumericError("degenerate SFT equilibrium");
  for (auto& p : eq.stationary) p /= total;
  return eq;
}

double sft_cylinder_mass(const SFTModel& model, const SFTEquilibrium& eq,
                         std::span<const int> word) {
  if (word.empty()) return 1.0;
  double lr = 0.0;
  for (int i = 0; i < model.symbols; ++i) lr += eq.left[i] * eq.right[i];
  double mass = eq.left[word[0]];
  for (std::size_t k = 0; k + 1 < word.size(); ++k) {
    if (!model.allowed[word[k]][word[k + 1]]) return 0.0;
    mass *= std::exp(-eq.t * model.log_slopes[word[k]]) / eq.rho;
  }
  mass *= eq.right[word.back()] / lr;
  return mass;
}

double sft_entropy(const SFTModel& model, const SFTEquilibrium& eq, double t) {
  double chi = 0.0;
  for (int i = 0; i < model.symbols; ++i) chi += eq.stationary[i] * model.log_slopes[i];
  return eq.pressure + t * chi;
}

SurvivorMeasure survivor_equilibrium(const IntervalMap& map, const Hole& hole, double t,
                                     const Grid& grid, const SpectralBundle& closed,
                                     const EigenOptions& opt) {
  auto es = escape_spectral(map, hole, t, grid, closed, opt);
  if (es.punctured.rho == 0.0 || es.punctured.left.empty())
    throw NumericError("survivor measure degenerate: no surviving mass");
  SurvivorMeasure sm;
  sm.nu.grid = grid;
  sm.nu.masses.resize(grid.cells());
  double total = 0.0;
  for (int i = 0; i < grid.cells(); ++i) {
    sm.nu.masses[i] = es.punctured.left[i] * es.punctured.right[i];
    total += sm.nu.masses[i];
  }
  if (total <= 0.0) throw NumericError("survivor measure degenerate support");
  for (auto& m : sm.nu.masses) m /= total;
  return sm;
}

double survivor_limit_eval(const IntervalMap& map, const Hole& hole, double t,
                           const Grid& grid, std::span<const double> psi, int n,
                           const SpectralBundle& closed, const EigenOptions& opt) {
  auto es = escape_spectral(map, hole, t, grid, closed, opt);
  auto op = WeightedUlamOperator::build(map, t, grid, &hole);
  const int n_cells = grid.cells();
  std::vector<double> u(n_cells), next(n_cells);
  for (int i = 0; i < n_cells; ++i) u[i] = psi[i] * es.g_H[i];
  const double log_step = es.rate - *closed.potential.p_t;  // log(e^{rate}/e^{p_t})
  double log_scale = 0.0;
  for (int k = 0; k < n; ++k) {
    matvec(op.matrix(), u, next);
    std::swap(u, next);
    double s = 0.0;
    for (double x : u) s += std::abs(x);
    if (s <= 0.0) return 0.0;
    for (auto& x : u) x /= s;
    log_scale += std::log(s) + log_step;
  }
  double val = 0.0;
  for (int i = 0; i < n_cells; ++i) val += closed.m_t.masses[i] * u[i];
  return val * std::exp(log_scale);
}

VariationalReport variational_check(const IntervalMap& map, const Hole& hole, double t,
                                    const Grid& grid, const EigenOptions& opt) {
  VariationalReport rep;
  auto closed = solve_closed(map, t, grid, opt);
  auto es = escape_spectral(map, hole, t, grid, closed, opt);
  rep.lhs = *closed.potential.p_t - es.rate;
  try {
    auto model = build_sft(map, hole);
    rep.rhs = sft_pressure(model, t);
    rep.gap = std::abs(rep.lhs - rep.rhs);
    rep.nu_entropy = sft_entropy(model, sft_equilibrium(model, t), t);
  } catch (const OracleUnavailable&) {
    rep.status = VariationalReport::Status::OracleUnavailable;
    rep.rhs = 0.0;
    rep.gap = 0.0;
  }
  return rep;
}

}  // namespace odyn
