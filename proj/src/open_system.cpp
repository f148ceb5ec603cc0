#include "odyn/open_system.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace odyn {

namespace {

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t");
  auto e = s.find_last_not_of(" \t");
  if (b == std::string::npos) return "";
  return s.substr(b, e - b + 1);
}

}  // namespace

Hole Hole::from_components(std::vector<HoleComponent> comps) {
  std::sort(comps.begin(), comps.end(),
            [](const HoleComponent& l, const HoleComponent& r) { return l.lo < r.lo; });
  double total = 0.0;
  for (std::size_t i = 0; i < comps.size(); ++i) {
    auto& c = comps[i];
    if (!(c.lo < c.hi)) throw DomainError("hole component needs lo < hi");
    if (c.lo < 0.0 || c.hi > 1.0) throw DomainError("hole component leaves [0,1]");
    if (!(c.center > c.lo && c.center < c.hi))
      throw DomainError("hole center must be interior to its component");
    if (i > 0 && !(comps[i - 1].hi < c.lo))
      throw DomainError("hole components must have disjoint closures");
    total += c.hi - c.lo;
  }
  if (total >= 1.0) throw DomainError("hole cannot cover the whole interval");
  Hole h;
  h.comps_ = std::move(comps);
  return h;
}

Hole Hole::interval(double lo, double hi) { return interval(rat_from_double(lo), rat_from_double(hi)); }

Hole Hole::interval(const Rat& lo, const Rat& hi) {
  HoleComponent c;
  c.rlo = lo;
  c.rhi = hi;
  c.lo = rat_to_double(lo);
  c.hi = rat_to_double(hi);
  c.center = 0.5 * (c.lo + c.hi);
  return from_components({c});
}

Hole Hole::parse(const std::string& spec) {
  std::string s = trim(spec);
  if (s.empty() || s == "none" || s == "empty") return Hole{};
  std::vector<HoleComponent> comps;
  std::size_t pos = 0;
  while (pos < s.size()) {
    auto open = s.find('(', pos);
    auto close = s.find(')', open);
    if (open == std::string::npos || close == std::string::npos)
      throw ConfigError("hole spec '" + spec + "': expected (a,b)");
    std::string body = s.substr(open + 1, close - open - 1);
    std::vector<std::string> fields;
    std::stringstream ss(body);
    std::string tok;
    while (std::getline(ss, tok, ',')) fields.push_back(trim(tok));
    if (fields.size() < 2) throw ConfigError("hole spec '" + spec + "': need two endpoints");
    HoleComponent c;
    c.rlo = rat_parse(fields[0]);
    c.rhi = rat_parse(fields[1]);
    c.lo = rat_to_double(c.rlo);
    c.hi = rat_to_double(c.rhi);
    c.center = 0.5 * (c.lo + c.hi);
    for (std::size_t i = 2; i < fields.size(); ++i) {
      auto eq = fields[i].find('=');
      if (eq == std::string::npos || trim(fields[i].substr(0, eq)) != "center")
        throw ConfigError("hole spec '" + spec + "': unknown field '" + fields[i] + "'");
      c.center = rat_to_double(rat_parse(trim(fields[i].substr(eq + 1))));
    }
    comps.push_back(c);
    pos = close + 1;
    while (pos < s.size() && (s[pos] == ';' || s[pos] == ' ')) ++pos;
  }
  return from_components(std::move(comps));
}

double Hole::total_length() const {
  double t = 0.0;
  for (const auto& c : comps_) t += c.hi - c.lo;
  return t;
}

bool Hole::contains(double x) const {
  for (const auto& c : comps_)
    if (x > c.lo && x < c.hi) return true;
  return false;
}

bool Hole::contains_closure(double x) const {
  for (const auto& c : comps_)
    if (x >= c.lo && x <= c.hi) return true;
  return false;
}

double Hole::boundary_distance(double x) const {
  double d = std::numeric_limits<double>::infinity();
  for (const auto& c : comps_)
    d = std::min({d, std::abs(x - c.lo), std::abs(x - c.hi)});
  return d;
}

std::vector<double> Hole::endpoints() const {
  std::vector<double> e;
  for (const auto& c : comps_) {
    e.push_back(c.lo);
    e.push_back(c.hi);
  }
  return e;
}

std::string Hole::to_string() const {
  std::string s;
  char buf[64];
  for (std::size_t i = 0; i < comps_.size(); ++i) {
    if (i) s += ";";
    std::snprintf(buf, sizeof buf, "(%.12g,%.12g)", comps_[i].lo, comps_[i].hi);
    s += buf;
  }
  return s.empty() ? "none" : s;
}

OpenSystem::OpenSystem(IntervalMap map, Hole hole)
    : map_(std::move(map)), hole_(std::move(hole)) {
  for (const auto& c : map_.critical_points())
    if (hole_.contains_closure(c.location))
      throw DomainError("hole closure meets the critical set");
  for (const auto& comp : hole_.components())
    for (const auto& c : map_.critical_points())
      if (comp.center == c.location)
        throw DomainError("hole center coincides with a critical point");
}

bool survives(const OpenSystem& sys, double x, int n) {
  double y = x;
  for (int k = 0; k <= n; ++k) {
    if (sys.hole().contains(y)) return false;
    if (k < n) y = sys.map().eval(y);
  }
  return true;
}

namespace {

template <typename Iv>
void merge_sorted(std::vector<Iv>& v) {
  std::sort(v.begin(), v.end(), [](const Iv& a, const Iv& b) { return a.first < b.first; });
  std::vector<Iv> out;
  for (auto& iv : v) {
    if (!out.empty() && iv.first <= out.back().second)
      out.back().second = std::max(out.back().second, iv.second);
    else
      out.push_back(iv);
  }
  v = std::move(out);
}

template <typename Iv>
std::vector<Iv> intersect_unions(const std::vector<Iv>& a, const std::vector<Iv>& b) {
  std::vector<Iv> out;
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    auto lo = std::max(a[i].first, b[j].first);
    auto hi = std::min(a[i].second, b[j].second);
    if (lo < hi) out.push_back({lo, hi});
    if (a[i].second < b[j].second)
      ++i;
    else
      ++j;
  }
  return out;
}

using DIv = std::pair<double, double>;
using RIv = std::pair<Rat, Rat>;

std::vector<DIv> preimage_once(const IntervalMap& map, const std::vector<DIv>& target) {
  std::vector<DIv> out;
  const auto& bps = map.monotone_breakpoints();
  for (std::size_t p = 0; p + 1 < bps.size(); ++p) {
    const double a = bps[p], b = bps[p + 1];
    const double fa = map.eval_within(a, b, a), fb = map.eval_within(a, b, b);
    const bool inc = fa <= fb;
    const double ilo = inc ? fa : fb, ihi = inc ? fb : fa;
    for (const auto& [tlo, thi] : target) {
      const double lo = std::max(tlo, ilo), hi = std::min(thi, ihi);
      if (!(lo < hi)) continue;
      double xlo = map.invert_on(a, b, inc ? lo : hi);
      double xhi = map.invert_on(a, b, inc ? hi : lo);
      if (xlo > xhi) std::swap(xlo, xhi);
      if (xlo < xhi) out.push_back({xlo, xhi});
    }
  }
  merge_sorted(out);
  return out;
}

std::vector<RIv> preimage_once_exact(const IntervalMap& map, const std::vector<RIv>& target) {
  std::vector<RIv> out;
  for (const auto& br : map.branches()) {
    const bool inc = br.rc <= br.rd;
    const Rat ilo = inc ? br.rc : br.rd, ihi = inc ? br.rd : br.rc;
    const Rat slope = (br.rd - br.rc) / (br.rb - br.ra);
    for (const auto& [tlo, thi] : target) {
      const Rat lo = std::max(tlo, ilo), hi = std::min(thi, ihi);
      if (!(lo < hi)) continue;
      Rat xlo = br.ra + (lo - br.rc) / slope;
      Rat xhi = br.ra + (hi - br.rc) / slope;
      if (xlo > xhi) boost::multiprecision::swap(xlo, xhi);
      out.push_back({xlo, xhi});
    }
  }
  merge_sorted(out);
  return out;
}

}  // namespace

std::vector<Interval> preimage_intervals(const IntervalMap& map,
                                         std::vector<Interval> intervals, int steps) {
  std::vector<DIv> cur;
  for (const auto& iv : intervals) cur.push_back({iv.lo, iv.hi});
  merge_sorted(cur);
  for (int s = 0; s < steps; ++s) cur = preimage_once(map, cur);
  std::vector<Interval> out;
  for (const auto& [lo, hi] : cur) out.push_back({lo, hi});
  return out;
}

std::vector<RIv> preimage_intervals_exact(const IntervalMap& map, std::vector<RIv> intervals,
                                          int steps) {
  if (!map.piecewise_affine())
    throw OracleUnavailable("exact preimages need a piecewise-affine map");
  merge_sorted(intervals);
  for (int s = 0; s < steps; ++s) intervals = preimage_once_exact(map, intervals);
  return intervals;
}

SurvivorRefinement refine_survivor(const OpenSystem& sys, int n, std::size_t budget) {
  if (n < 0) throw DomainError("refinement depth must be >= 0");
  SurvivorRefinement ref;
  ref.depth = n;

  if (sys.map().piecewise_affine()) {
    // exact path: K_{k} = K_0 cap f^{-1} K_{k-1}
    std::vector<RIv> k0;
    Rat cursor(0);
    for (const auto& c : sys.hole().components()) {
      if (cursor < c.rlo) k0.push_back({cursor, c.rlo});
      cursor = c.rhi;
    }
    if (cursor < Rat(1)) k0.push_back({cursor, Rat(1)});
    std::vector<RIv> cur = k0;
    std::size_t produced = cur.size();
    for (int k = 1; k <= n; ++k) {
      cur = intersect_unions(k0, preimage_once_exact(sys.map(), cur));
      produced += cur.size();
      if (produced > budget) {
        ref.complete = false;
        ref.depth = k;
        break;
      }
    }
    Rat mass(0);
    for (const auto& [lo, hi] : cur) {
      ref.intervals.push_back({rat_to_double(lo), rat_to_double(hi)});
      mass += hi - lo;
    }
    ref.exact_mass = mass;
    ref.lebesgue_mass = rat_to_double(mass);
    return ref;
  }

  std::vector<DIv> k0;
  double cursor = 0.0;
  for (const auto& c : sys.hole().components()) {
    if (cursor < c.lo) k0.push_back({cursor, c.lo});
    cursor = c.hi;
  }
  if (cursor < 1.0) k0.push_back({cursor, 1.0});
  std::vector<DIv> cur = k0;
  std::size_t produced = cur.size();
  for (int k = 1; k <= n; ++k) {
    cur = intersect_unions(k0, preimage_once(sys.map(), cur));
    produced += cur.size();
    if (produced > budget) {
      ref.complete = false;
      ref.depth = k;
      break;
    }
  }
  for (const auto& [lo, hi] : cur) {
    ref.intervals.push_back({lo, hi});
    ref.lebesgue_mass += hi - lo;
  }
  return ref;
}

ConditionReport check_H1(const OpenSystem& sys, const ConditionParams& params) {
  ConditionReport rep;
  if (sys.map().critical_points().empty() || sys.hole().empty()) {
    rep.vacuous = true;
    rep.notes = "no critical points or no hole";
    return rep;
  }
  for (const auto& c : sys.map().critical_points()) {
    const double theta = params.theta_for(c.order);
    ConditionRow row{c.location, std::numeric_limits<double>::infinity(), true, 0,
                     "critical orbit vs hole boundary"};
    double y = c.location;
    for (int k = 0; k <= params.horizon; ++k) {
      const double margin = std::exp(theta * k) * sys.hole().boundary_distance(y) / params.delta0;
      if (margin < row.margin) {
        row.margin = margin;
        row.witness = k;
      }
      y = sys.map().eval(y);
    }
    row.pass = row.margin > 1.0;
    rep.pass = rep.pass && row.pass;
    rep.rows.push_back(row);
  }
  rep.notes = "finite-horizon diagnostic at N=" + std::to_string(params.horizon);
  return rep;
}

ConditionReport check_H2_orbit_separation(const OpenSystem& sys,
                                          const ConditionParams& params) {
  ConditionReport rep;
  rep.notes = "(H2)(b) preimage combinatorics out of scope, not checked";
  if (sys.hole().empty()) {
    rep.vacuous = true;
    return rep;
  }
  const bool no_crit = sys.map().critical_points().empty();
  for (const auto& comp : sys.hole().components()) {
    // (a): center orbit avoids the critical set
    ConditionRow sep{comp.center, std::numeric_limits<double>::infinity(), true, 0,
                     "center orbit vs critical set"};
    if (no_crit) {
      sep.margin = std::numeric_limits<double>::infinity();
    } else {
      double y = comp.center;
      for (int k = 0; k <= params.horizon; ++k) {
        const double d = sys.map().critical_distance(y);
        if (d < sep.margin) {
          sep.margin = d;
          sep.witness = k;
        }
        y = sys.map().eval(y);
      }
      sep.pass = sep.margin > 1e-10;
    }
    rep.pass = rep.pass && sep.pass;
    rep.rows.push_back(sep);

    // (c): derivative growth witness r
    ConditionRow growth{comp.center, 0.0, false, 0, "derivative growth witness r"};
    double y = comp.center;
    double df = 1.0;
    for (int r = 1; r <= params.horizon; ++r) {
      df *= sys.map().deriv(y);
      y = sys.map().eval(y);
      const double need = std::max(params.kappa * std::exp(params.gamma * r), 4.0);
      if (std::abs(df) >= need) {
        growth.pass = true;
        growth.witness = r;
        growth.margin = std::abs(df) / need;
        break;
      }
    }
    rep.pass = rep.pass && growth.pass;
    rep.rows.push_back(growth);
  }
  return rep;
}

int covering_time(const IntervalMap& map, double delta, int horizon) {
  const double len = delta / 3.0;
  int worst = 0;
  const int scan = std::max(3, static_cast<int>(std::ceil(2.0 / len)));
  for (int i = 0; i < scan; ++i) {
    double lo = i * (1.0 - len) / (scan - 1);
    std::vector<DIv> cur{{lo, lo + len}};
    int n = 0;
    for (; n < horizon; ++n) {
      if (cur.size() == 1 && cur[0].first <= 1e-9 && cur[0].second >= 1.0 - 1e-9) break;
      // forward image through the monotone pieces
      std::vector<DIv> next;
      const auto& bps = map.monotone_breakpoints();
      for (const auto& [a, b] : cur) {
        for (std::size_t p = 0; p + 1 < bps.size(); ++p) {
          const double plo = std::max(a, bps[p]), phi = std::min(b, bps[p + 1]);
          if (!(plo < phi)) continue;
          double u = map.eval_within(plo, phi, plo), v = map.eval_within(plo, phi, phi);
          if (u > v) std::swap(u, v);
          // widen by the interior extremum when a critical point is inside
          for (const auto& c : map.critical_points())
            if (c.location > plo && c.location < phi) {
              const double w = map.eval(c.location);
              u = std::min(u, w);
              v = std::max(v, w);
            }
          if (u < v) next.push_back({u, v});
        }
      }
      merge_sorted(next);
      cur = std::move(next);
      if (cur.empty()) return horizon;
    }
    worst = std::max(worst, n);
    if (worst >= horizon) break;
  }
  return worst;
}

}  // namespace odyn
