#include "odyn/maps.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "odyn/rng.hpp"

namespace odyn {

namespace {

constexpr double kDomainTol = 1e-12;

void check_domain(double x) {
  if (!(x >= -kDomainTol && x <= 1.0 + kDomainTol))
    throw DomainError("point " + std::to_string(x) + " outside [0,1]");
}

AffineBranch make_branch(const Rat& a, const Rat& b, const Rat& c, const Rat& d) {
  AffineBranch br;
  br.ra = a;
  br.rb = b;
  br.rc = c;
  br.rd = d;
  br.a = rat_to_double(a);
  br.b = rat_to_double(b);
  br.c = rat_to_double(c);
  br.d = rat_to_double(d);
  return br;
}

// Chebyshev polynomials of the first and second kind via the forward
// recurrence; degree stays small so this is stable enough.
double cheb_T(int k, double u) {
  double tm = 1.0, t = u;
  if (k == 0) return tm;
  for (int i = 1; i < k; ++i) {
    double tn = 2.0 * u * t - tm;
    tm = t;
    t = tn;
  }
  return t;
}

double cheb_U(int k, double u) {
  double um = 1.0, uu = 2.0 * u;
  if (k == 0) return um;
  for (int i = 1; i < k; ++i) {
    double un = 2.0 * u * uu - um;
    um = uu;
    uu = un;
  }
  return uu;
}

}  // namespace

void IntervalMap::finalize() {
  breakpoints_.clear();
  breakpoints_.push_back(0.0);
  if (piecewise_affine()) {
    for (auto& br : branches_) {
      if (!(br.ra < br.rb)) throw DomainError("degenerate branch domain");
      br.a = rat_to_double(br.ra);
      br.b = rat_to_double(br.rb);
      br.c = rat_to_double(br.rc);
      br.d = rat_to_double(br.rd);
      br.sd = rat_to_double((br.rd - br.rc) / (br.rb - br.ra));
    }
    for (const auto& br : branches_) {
      if (br.b <= br.a) throw DomainError("degenerate branch domain");
      if (std::abs(br.slope()) <= 1.0)
        throw DomainError("piecewise-linear branch slope must exceed 1 in magnitude");
      if (br.c < -kDomainTol || br.c > 1 + kDomainTol || br.d < -kDomainTol ||
          br.d > 1 + kDomainTol)
        throw DomainError("branch range leaves [0,1]");
      breakpoints_.push_back(br.b);
    }
    for (std::size_t i = 0; i + 1 < branches_.size(); ++i)
      if (std::abs(branches_[i].b - branches_[i + 1].a) > 0)
        throw DomainError("branch domains must be contiguous");
    if (branches_.front().a != 0.0 || branches_.back().b != 1.0)
      throw DomainError("branch domains must cover [0,1]");
  } else {
    for (const auto& c : critical_) {
      if (!(c.location > 0.0 && c.location < 1.0))
        throw DomainError("critical point must be interior");
      if (!(c.order >= 2.0) || !std::isfinite(c.order))
        throw DomainError("critical order must be finite and >= 2");
      breakpoints_.push_back(c.location);
    }
    breakpoints_.push_back(1.0);
  }
  std::sort(breakpoints_.begin(), breakpoints_.end());
  breakpoints_.erase(std::unique(breakpoints_.begin(), breakpoints_.end()),
                     breakpoints_.end());
  for (std::size_t i = 0; i + 1 < critical_.size(); ++i)
    if (critical_[i].location == critical_[i + 1].location)
      throw DomainError("critical points must be distinct");
}

IntervalMap IntervalMap::logistic(double lambda) {
  if (!(lambda > 0.0 && lambda <= 4.0)) throw DomainError("logistic needs lambda in (0,4]");
  IntervalMap m;
  m.family_ = MapFamily::Logistic;
  m.param_ = lambda;
  m.critical_ = {{0.5, 2.0}};
  m.finalize();
  return m;
}

IntervalMap IntervalMap::chebyshev(int degree) {
  if (degree < 2) throw DomainError("chebyshev needs degree >= 2");
  IntervalMap m;
  m.family_ = MapFamily::Chebyshev;
  m.param_ = degree;
  for (int j = 1; j < degree; ++j)
    m.critical_.push_back({0.5 * (1.0 + std::cos(j * M_PI / degree)), 2.0});
  std::sort(m.critical_.begin(), m.critical_.end(),
            [](const CriticalPoint& l, const CriticalPoint& r) {
              return l.location < r.location;
            });
  m.finalize();
  return m;
}

IntervalMap IntervalMap::tent(double slope) {
  if (!(slope > 1.0 && slope <= 2.0)) throw DomainError("tent needs slope in (1,2]");
  IntervalMap m;
  m.family_ = MapFamily::Tent;
  m.param_ = slope;
  Rat s = rat_from_double(slope);
  Rat half(1, 2);
  m.branches_ = {make_branch(Rat(0), half, Rat(0), s / 2),
                 make_branch(half, Rat(1), s / 2, Rat(0))};
  m.finalize();
  return m;
}

IntervalMap IntervalMap::doubling() {
  IntervalMap m;
  m.family_ = MapFamily::Doubling;
  m.param_ = 2;
  m.branches_ = {make_branch(Rat(0), Rat(1, 2), Rat(0), Rat(1)),
                 make_branch(Rat(1, 2), Rat(1), Rat(0), Rat(1))};
  m.finalize();
  return m;
}

IntervalMap IntervalMap::tripling() {
  IntervalMap m;
  m.family_ = MapFamily::Tripling;
  m.param_ = 3;
  m.branches_ = {make_branch(Rat(0), Rat(1, 3), Rat(0), Rat(1)),
                 make_branch(Rat(1, 3), Rat(2, 3), Rat(0), Rat(1)),
                 make_branch(Rat(2, 3), Rat(1), Rat(0), Rat(1))};
  m.finalize();
  return m;
}

IntervalMap IntervalMap::piecewise_linear(std::vector<AffineBranch> branches,
                                          MapFamily label) {
  if (branches.empty()) throw DomainError("empty branch table");
  std::sort(branches.begin(), branches.end(),
            [](const AffineBranch& l, const AffineBranch& r) { return l.a < r.a; });
  IntervalMap m;
  m.family_ = label;
  m.branches_ = std::move(branches);
  m.finalize();
  return m;
}

std::string IntervalMap::name() const {
  switch (family_) {
    case MapFamily::Logistic:
      return "logistic:" + std::to_string(param_);
    case MapFamily::Tent:
      return "tent:" + std::to_string(param_);
    case MapFamily::Doubling:
      return "doubling";
    case MapFamily::Tripling:
      return "tripling";
    case MapFamily::Chebyshev:
      return "chebyshev:" + std::to_string(static_cast<int>(param_));
    case MapFamily::PiecewiseLinearMarkov:
      return "plm";
  }
  return "?";
}

double IntervalMap::eval(double x) const {
  check_domain(x);
  switch (family_) {
    case MapFamily::Logistic:
      return param_ * x * (1.0 - x);
    case MapFamily::Chebyshev: {
      // conjugate form of u -> T_k(u) on [-1,1]; degree 2 equals logistic(4)
      const double u = 2.0 * x - 1.0;
      double v = 0.5 * (1.0 - cheb_T(static_cast<int>(param_), u));
      return std::clamp(v, 0.0, 1.0);
    }
    default: {
      // branch containing x, half-open [a,b) except the last branch
      for (std::size_t i = 0; i < branches_.size(); ++i) {
        const auto& br = branches_[i];
        if (x < br.b || i + 1 == branches_.size()) {
          const double s = br.slope();
          return br.c + s * (x - br.a);
        }
      }
      return branches_.back().d;
    }
  }
}

double IntervalMap::deriv(double x) const {
  check_domain(x);
  switch (family_) {
    case MapFamily::Logistic:
      return param_ * (1.0 - 2.0 * x);
    case MapFamily::Chebyshev: {
      const int k = static_cast<int>(param_);
      return -static_cast<double>(k) * cheb_U(k - 1, 2.0 * x - 1.0);
    }
    default: {
      for (std::size_t i = 0; i < branches_.size(); ++i) {
        const auto& br = branches_[i];
        if (x < br.b || i + 1 == branches_.size()) return br.slope();
      }
      return branches_.back().slope();
    }
  }
}

double IntervalMap::eval_within(double lo, double hi, double y) const {
  if (!piecewise_affine()) return eval(y);
  const double mid = 0.5 * (lo + hi);
  for (const auto& br : branches_)
    if (mid >= br.a && mid <= br.b) return br.c + br.sd * (y - br.a);
  return eval(y);
}

double IntervalMap::invert_on(double lo, double hi, double y) const {
  const double flo = eval_within(lo, hi, lo), fhi = eval_within(lo, hi, hi);
  const bool increasing = flo <= fhi;
  const double ylo = increasing ? flo : fhi;
  const double yhi = increasing ? fhi : flo;
  const double pad = 1e-12 * (1.0 + std::abs(y));
  if (y < ylo - pad || y > yhi + pad)
    throw DomainError("invert_on: value outside the image of the piece");
  if (piecewise_affine()) {
    // all pieces of a PL map are affine
    const double denom = fhi - flo;
    if (denom == 0) return lo;
    double x = lo + (y - flo) * (hi - lo) / denom;
    return std::clamp(x, lo, hi);
  }
  double a = lo, b = hi;
  double fa = flo;
  for (int it = 0; it < 200 && b - a > 0; ++it) {
    const double mid = 0.5 * (a + b);
    if (mid == a || mid == b) break;
    const double fm = eval(mid);
    const bool left = increasing ? (y < fm) : (y > fm);
    if (left)
      b = mid;
    else {
      a = mid;
      fa = fm;
    }
  }
  (void)fa;
  return 0.5 * (a + b);
}

double IntervalMap::critical_distance(double x) const {
  double d = std::numeric_limits<double>::infinity();
  for (const auto& c : critical_) d = std::min(d, std::abs(x - c.location));
  return d;
}

std::vector<double> orbit(const IntervalMap& map, double x, int n) {
  if (n < 0) throw DomainError("orbit needs n >= 0");
  std::vector<double> out;
  out.reserve(n + 1);
  out.push_back(x);
  for (int k = 0; k < n; ++k) out.push_back(map.eval(out.back()));
  return out;
}

double birkhoff_log_deriv(const IntervalMap& map, double x, int n, double clearance) {
  double sum = 0.0, y = x;
  for (int k = 0; k < n; ++k) {
    if (map.critical_distance(y) < clearance)
      throw NumericError("orbit point within clearance of a critical point at step " +
                         std::to_string(k));
    sum += std::log(std::abs(map.deriv(y)));
    y = map.eval(y);
  }
  return sum;
}

namespace {

double iterate(const IntervalMap& map, double x, int p) {
  for (int i = 0; i < p; ++i) x = map.eval(x);
  return x;
}

double deriv_pow(const IntervalMap& map, double x, int p) {
  double prod = 1.0;
  for (int i = 0; i < p; ++i) {
    prod *= map.deriv(x);
    x = map.eval(x);
  }
  return prod;
}

// Monotone pieces of f^p, built by refining the monotonicity partition
// forward p times.
std::vector<std::pair<double, double>> monotone_pieces(const IntervalMap& map, int p) {
  std::vector<std::pair<double, double>> pieces;
  const auto& bps = map.monotone_breakpoints();
  for (std::size_t i = 0; i + 1 < bps.size(); ++i) pieces.emplace_back(bps[i], bps[i + 1]);
  for (int step = 1; step < p; ++step) {
    std::vector<std::pair<double, double>> next;
    for (auto [a, b] : pieces) {
      // cut [a,b] where the image of f^step crosses a breakpoint of f
      double fa = iterate(map, a, step);
      double fb = iterate(map, b, step);
      const double lo = std::min(fa, fb), hi = std::max(fa, fb);
      std::vector<double> cuts{a};
      for (double y : bps) {
        if (y > lo && y < hi) {
          // preimage of y under the monotone map f^step on [a,b]
          double xa = a, xb = b;
          const bool inc = fa <= fb;
          for (int it = 0; it < 200 && xb - xa > 0; ++it) {
            const double mid = 0.5 * (xa + xb);
            if (mid == xa || mid == xb) break;
            const double fm = iterate(map, mid, step);
            if ((inc && fm < y) || (!inc && fm > y))
              xa = mid;
            else
              xb = mid;
          }
          cuts.push_back(0.5 * (xa + xb));
        }
      }
      cuts.push_back(b);
      std::sort(cuts.begin(), cuts.end());
      for (std::size_t i = 0; i + 1 < cuts.size(); ++i)
        if (cuts[i + 1] > cuts[i]) next.emplace_back(cuts[i], cuts[i + 1]);
    }
    pieces = std::move(next);
  }
  return pieces;
}

}  // namespace

std::vector<PeriodicOrbit> periodic_points(const IntervalMap& map, int p, double tol,
                                           std::vector<double>* excluded) {
  if (p < 1) throw DomainError("period must be >= 1");
  std::vector<double> roots;
  auto push_root = [&](double z) {
    for (double r : roots)
      if (std::abs(r - z) <= 64 * tol) return;
    roots.push_back(z);
  };

  for (auto [a, b] : monotone_pieces(map, p)) {
    // g(x) = f^p(x) - x need not be monotone on a monotone piece of f^p, so
    // subsample for sign changes; ties resolved toward the lower endpoint
    const int kSub = 32;
    double prev_x = a, prev_g = iterate(map, a, p) - a;
    if (std::abs(prev_g) <= tol) push_root(a);
    for (int s = 1; s <= kSub; ++s) {
      const double x = a + (b - a) * s / kSub;
      const double g = iterate(map, x, p) - x;
      if (std::abs(g) <= tol) {
        push_root(x);
      } else if (prev_g * g < 0) {
        double xa = prev_x, xb = x, ga = prev_g;
        for (int it = 0; it < 200 && xb - xa > 0; ++it) {
          const double mid = 0.5 * (xa + xb);
          if (mid == xa || mid == xb) break;
          const double gm = iterate(map, mid, p) - mid;
          if ((ga < 0) == (gm < 0)) {
            xa = mid;
            ga = gm;
          } else {
            xb = mid;
          }
        }
        push_root(xa);  // lower endpoint on ties
      }
      prev_x = x;
      prev_g = g;
    }
  }
  std::sort(roots.begin(), roots.end());

  std::vector<PeriodicOrbit> out;
  for (double z : roots) {
    if (std::abs(iterate(map, z, p) - z) > std::max(tol, 1e3 * tol * std::abs(deriv_pow(map, z, p))))
      continue;
    // prime-period filter
    bool prime = true;
    for (int q = 1; q < p; ++q) {
      if (p % q != 0) continue;
      if (std::abs(iterate(map, z, q) - z) <= 64 * tol) {
        prime = false;
        break;
      }
    }
    if (!prime) continue;
    const double mult = deriv_pow(map, z, p);
    if (std::abs(mult) <= 1.0 + tol) {
      if (excluded) excluded->push_back(z);  // flagged non-hyperbolic
      continue;
    }
    out.push_back({z, p, mult, std::log(std::abs(mult)) / p});
  }
  return out;
}

double lyapunov_at_periodic(const IntervalMap& map, const PeriodicOrbit& o) {
  return std::log(std::abs(deriv_pow(map, o.point, o.period))) / o.period;
}

ConditionReport check_collet_eckmann(const IntervalMap& map, const ConditionParams& p) {
  ConditionReport rep;
  if (map.critical_points().empty()) {
    rep.vacuous = true;
    rep.notes = "empty critical set";
    return rep;
  }
  if (p.horizon < 1) throw DomainError("horizon must be >= 1");
  for (const auto& c : map.critical_points()) {
    const double theta = p.theta_for(c.order);
    ConditionRow growth{c.location, std::numeric_limits<double>::infinity(), true, 0,
                        "derivative growth along critical orbit"};
    ConditionRow recur{c.location, std::numeric_limits<double>::infinity(), true, 0,
                       "slow recurrence of critical orbit"};
    double y = map.eval(c.location);  // critical value
    double log_df = 0.0;
    for (int k = 1; k <= p.horizon; ++k) {
      // growth margin: (1/k) log|Df^k(f c)| relative to Lambda
      log_df += std::log(std::abs(map.deriv(y)));
      const double rate = log_df / k;
      if (rate - p.Lambda < growth.margin) {
        growth.margin = rate - p.Lambda;
        growth.witness = k;
      }
      y = map.eval(y);
      // recurrence margin at f^k(c)
      const double dist = map.critical_distance(y);
      if (dist <= 1e-14) {
        recur.margin = -std::numeric_limits<double>::infinity();
        recur.witness = k;
        break;
      }
      const double margin = std::exp(theta * k) * dist / p.delta0 - 1.0;
      if (margin < recur.margin) {
        recur.margin = margin;
        recur.witness = k;
      }
    }
    growth.pass = growth.margin >= 0;
    recur.pass = recur.margin > 0;
    rep.pass = rep.pass && growth.pass && recur.pass;
    rep.rows.push_back(growth);
    rep.rows.push_back(recur);
  }
  rep.notes = "finite-horizon diagnostic at N=" + std::to_string(p.horizon);
  return rep;
}

ConditionReport check_expansion(const IntervalMap& map, const ConditionParams& p,
                                int n_samples, std::uint64_t seed) {
  ConditionReport rep;
  rep.notes = "sampled segments only; diagnostic, not a proof";
  SplitMix64 rng(seed);
  double worst = std::numeric_limits<double>::infinity();
  int worst_len = 0;
  for (int s = 0; s < n_samples; ++s) {
    double x = rng.uniform();
    double log_df = 0.0;
    double y = x;
    for (int n = 1; n <= p.horizon; ++n) {
      if (map.critical_distance(y) <= p.delta0) break;  // segment must stay free
      log_df += std::log(std::abs(map.deriv(y)));
      y = map.eval(y);
      const double margin = log_df - (std::log(p.kappa) + p.gamma * n);
      if (margin < worst) {
        worst = margin;
        worst_len = n;
      }
    }
  }
  rep.rows.push_back({0.0, worst, worst >= 0, worst_len, "expansion outside B_delta0(Crit)"});
  rep.pass = worst >= 0;
  if (map.critical_points().empty()) rep.notes += "; no critical set, bound holds trivially";
  return rep;
}

}  // namespace odyn
