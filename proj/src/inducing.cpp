#include "odyn/inducing.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "odyn/fit.hpp"

namespace odyn {

namespace {

struct Piece {
  double a, b;    // domain, subinterval of X
  double ua, ub;  // images f^k(a), f^k(b); f^k monotone on [a,b]
};

// solve f^k(x) = y on [a,b] where f^k is monotone; plain bisection
double pullback(const IntervalMap& map, int k, double a, double b, double ua, double ub,
                double y) {
  if (map.piecewise_affine()) {
    const double denom = ub - ua;
    if (denom == 0.0) return a;
    return std::clamp(a + (y - ua) * (b - a) / denom, a, b);
  }
  const bool inc = ua <= ub;
  double lo = a, hi = b;
  for (int it = 0; it < 200 && hi - lo > 0; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    double v = mid;
    for (int s = 0; s < k; ++s) v = map.eval(v);
    if ((inc && v < y) || (!inc && v > y))
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

struct StepOutput {
  std::vector<InducedBranch> emitted;
  std::vector<Piece> alive;  // still at level k, to be mapped to k+1
  double escaped = 0.0;
};

// classify one piece at level k against the hole and the return condition
void classify(const IntervalMap& map, const Hole& hole, double X_lo, double X_hi, int k,
              const Piece& p, StepOutput& out) {
  const double img_lo = std::min(p.ua, p.ub), img_hi = std::max(p.ua, p.ub);
  const bool covers = img_lo <= X_lo + 1e-12 && img_hi >= X_hi - 1e-12;
  std::vector<double> ys;
  for (double e : hole.endpoints())
    if (e > img_lo && e < img_hi) ys.push_back(e);
  if (covers) {
    if (X_lo > img_lo && X_lo < img_hi) ys.push_back(X_lo);
    if (X_hi > img_lo && X_hi < img_hi) ys.push_back(X_hi);
  }
  const bool inc = p.ua <= p.ub;
  std::sort(ys.begin(), ys.end());
  if (!inc) std::reverse(ys.begin(), ys.end());  // keep domain cuts ascending

  std::vector<double> xs{p.a};
  std::vector<double> vs{p.ua};
  for (double y : ys) {
    const double x = pullback(map, k, p.a, p.b, p.ua, p.ub, y);
    if (x - xs.back() > 1e-15 && p.b - x > 1e-15) {
      xs.push_back(x);
      vs.push_back(y);
    }
  }
  xs.push_back(p.b);
  vs.push_back(p.ub);

  for (std::size_t s = 0; s + 1 < xs.size(); ++s) {
    const double slo = std::min(vs[s], vs[s + 1]), shi = std::max(vs[s], vs[s + 1]);
    const double smid = 0.5 * (slo + shi);
    if (hole.contains(smid)) {
      out.escaped += xs[s + 1] - xs[s];
      continue;
    }
    if (covers && std::abs(slo - X_lo) <= 1e-9 && std::abs(shi - X_hi) <= 1e-9) {
      out.emitted.push_back({xs[s], xs[s + 1], k});
      continue;
    }
    out.alive.push_back({xs[s], xs[s + 1], vs[s], vs[s + 1]});
  }
}

// apply f to a piece alive at level k: split the image at monotonicity
// breakpoints, each monotone sub-piece becomes a level k+1 piece
void advance(const IntervalMap& map, int k, const Piece& p, std::vector<Piece>& out) {
  const double img_lo = std::min(p.ua, p.ub), img_hi = std::max(p.ua, p.ub);
  std::vector<double> ys;
  for (double bp : map.monotone_breakpoints())
    if (bp > img_lo && bp < img_hi) ys.push_back(bp);
  const bool inc = p.ua <= p.ub;
  std::sort(ys.begin(), ys.end());
  if (!inc) std::reverse(ys.begin(), ys.end());

  std::vector<double> xs{p.a};
  std::vector<double> vs{p.ua};
  for (double y : ys) {
    const double x = pullback(map, k, p.a, p.b, p.ua, p.ub, y);
    if (x - xs.back() > 1e-15 && p.b - x > 1e-15) {
      xs.push_back(x);
      vs.push_back(y);
    }
  }
  xs.push_back(p.b);
  vs.push_back(p.ub);

  for (std::size_t s = 0; s + 1 < xs.size(); ++s) {
    const double ylo = std::min(vs[s], vs[s + 1]), yhi = std::max(vs[s], vs[s + 1]);
    out.push_back({xs[s], xs[s + 1], map.eval_within(ylo, yhi, vs[s]),
                   map.eval_within(ylo, yhi, vs[s + 1])});
  }
}

}  // namespace

InducingScheme build_first_return(const IntervalMap& map, const Hole& hole, double X_lo,
                                  double X_hi, int depth, std::size_t budget) {
  if (!(X_lo < X_hi) || X_lo < 0.0 || X_hi > 1.0) throw DomainError("bad base interval");
  for (const auto& c : hole.components())
    if (!(X_hi <= c.lo || X_lo >= c.hi))
      throw DomainError("base interval must be disjoint from the hole");

  InducingScheme scheme;
  scheme.X_lo = X_lo;
  scheme.X_hi = X_hi;
  scheme.hole = hole;
  scheme.depth = depth;

  std::vector<Piece> frontier{{X_lo, X_hi, X_lo, X_hi}};
  std::size_t processed = 1;

  for (int k = 0; k < depth; ++k) {
    // map level-k survivors to level k+1
    std::vector<std::vector<Piece>> advanced(frontier.size());
#pragma omp parallel for schedule(dynamic, 16)
    for (std::size_t i = 0; i < frontier.size(); ++i)
      advance(map, k, frontier[i], advanced[i]);
    std::vector<Piece> staged;
    for (auto& v : advanced) staged.insert(staged.end(), v.begin(), v.end());

    // classify at level k+1
    std::vector<StepOutput> outs(staged.size());
#pragma omp parallel for schedule(dynamic, 16)
    for (std::size_t i = 0; i < staged.size(); ++i)
      classify(map, hole, X_lo, X_hi, k + 1, staged[i], outs[i]);

    frontier.clear();
    for (auto& o : outs) {
      scheme.escaped_mass += o.escaped;
      scheme.branches.insert(scheme.branches.end(), o.emitted.begin(), o.emitted.end());
      frontier.insert(frontier.end(), o.alive.begin(), o.alive.end());
    }
    processed += staged.size();
    if (processed + frontier.size() > budget) {
      scheme.budget_hit = true;
      scheme.warnings += "interval budget exceeded at depth " + std::to_string(k + 1) +
                         "; partial scheme; ";
      break;
    }
    if (frontier.empty()) break;
  }

  for (const auto& p : frontier) scheme.unresolved_mass += p.b - p.a;
  std::sort(scheme.branches.begin(), scheme.branches.end(),
            [](const InducedBranch& l, const InducedBranch& r) { return l.lo < r.lo; });
  return scheme;
}

namespace {

double measure_of(const GridMeasure* mt, double lo, double hi) {
  if (!mt) return hi - lo;
  return mt->mass_between(lo, hi);
}

}  // namespace

TailReport tail_distribution(const InducingScheme& scheme, double t, const GridMeasure* mt) {
  (void)t;  // the measure already encodes t; kept in the signature for reports
  TailReport rep;
  rep.unresolved_mass = scheme.unresolved_mass;
  const int n_max = scheme.depth;

  std::vector<double> branch_mass(n_max + 1, 0.0);
  for (const auto& br : scheme.branches)
    if (br.tau <= n_max) branch_mass[br.tau] += measure_of(mt, br.lo, br.hi);
  double unresolved = scheme.unresolved_mass;
  if (mt && scheme.unresolved_mass > 0) {
    // approximate: unresolved pieces are not tracked individually, scale by
    // the average density of the base
    const double base = measure_of(mt, scheme.X_lo, scheme.X_hi);
    unresolved = scheme.unresolved_mass * base / scheme.base_length();
  }

  double total = unresolved;
  for (double m : branch_mass) total += m;
  if (total <= 0.0) throw NumericError("tail_distribution: empty scheme");

  // tail[n] = conditional mass of {tau > n} among pieces that return or are
  // still unresolved at the cutoff
  rep.tail.resize(n_max);
  double removed = 0.0;
  for (int n = 0; n < n_max; ++n) {
    removed += branch_mass[n];  // tau starts at 1, so branch_mass[0] is empty
    rep.tail[n] = std::max(total - removed, 0.0) / total;
  }

  std::vector<double> xs, ys;
  for (int n = 0; n < n_max; ++n) {
    if (rep.tail[n] > 0.0 && rep.tail[n] > unresolved / total * 1.5) {
      xs.push_back(n);
      ys.push_back(std::log(rep.tail[n]));
    }
  }
  if (xs.size() < 5) throw NumericError("tail fit window shorter than 5 points");
  auto fit = fit_line(xs, ys);
  rep.alpha = -fit.slope;
  rep.r2 = fit.r2;
  rep.fit_lo = static_cast<int>(xs.front());
  rep.fit_hi = static_cast<int>(xs.back());
  // envelope constant: smallest C0 with tail <= C0 e^{-alpha n}
  rep.C0 = 0.0;
  for (int n = 0; n < n_max; ++n)
    rep.C0 = std::max(rep.C0, rep.tail[n] * std::exp(rep.alpha * n));
  return rep;
}

DistortionReport distortion_check(const IntervalMap& map, const InducingScheme& scheme,
                                  double t, int pairs_per_branch) {
  DistortionReport rep;
  rep.pairs_per_branch = pairs_per_branch;
  rep.per_branch.reserve(scheme.branches.size());
  for (const auto& br : scheme.branches) {
    double worst = 0.0;
    const double mid = 0.5 * (br.lo + br.hi), half = 0.5 * (br.hi - br.lo);
    auto node = [&](int q) {
      return mid + half * std::cos(M_PI * q / pairs_per_branch);
    };
    for (int q = 0; q < pairs_per_branch; ++q) {
      const double x = node(q + 1), y = node(q);  // ascending pairs
      // S_tau phi_t(x) - S_tau phi_t(y); the p_t terms cancel
      double sx = 0.0, sy = 0.0, fx = x, fy = y;
      for (int s = 0; s < br.tau; ++s) {
        sx += std::log(std::abs(map.deriv(fx)));
        sy += std::log(std::abs(map.deriv(fy)));
        fx = map.eval(fx);
        fy = map.eval(fy);
      }
      const double dF = std::abs(fx - fy);
      if (dF < 1e-14) continue;
      const double num = std::abs(std::expm1(-t * (sx - sy)));
      worst = std::max(worst, num / dF);
    }
    rep.per_branch.push_back(worst);
    rep.C_d = std::max(rep.C_d, worst);
  }
  return rep;
}

void write_scheme_text(const InducingScheme& scheme, const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open " + path);
  char buf[160];
  std::snprintf(buf, sizeof buf, "# X=[%.12g,%.12g] hole=%s depth=%d unresolved=%.12g\n",
                scheme.X_lo, scheme.X_hi, scheme.hole.to_string().c_str(), scheme.depth,
                scheme.unresolved_mass);
  f << buf;
  for (const auto& br : scheme.branches) {
    std::snprintf(buf, sizeof buf, "%.12g %.12g %d\n", br.lo, br.hi, br.tau);
    f << buf;
  }
}

}  // namespace odyn
