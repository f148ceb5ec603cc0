#include "odyn/cli.hpp"

#include <omp.h>

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "odyn/dimension.hpp"
#include "odyn/escape.hpp"
#include "odyn/inducing.hpp"
#include "odyn/report.hpp"
#include "odyn/zerohole.hpp"

namespace fs = std::filesystem;

namespace odyn {

namespace {

IntervalMap parse_map(const std::string& spec) {
  auto colon = spec.find(':');
  const std::string head = spec.substr(0, colon);
  const std::string arg = colon == std::string::npos ? "" : spec.substr(colon + 1);
  if (head == "doubling") return IntervalMap::doubling();
  if (head == "tripling") return IntervalMap::tripling();
  if (head == "logistic") {
    if (arg.empty()) throw ConfigError("logistic needs a parameter, e.g. logistic:4.0");
    return IntervalMap::logistic(rat_to_double(rat_parse(arg)));
  }
  if (head == "tent") {
    if (arg.empty()) throw ConfigError("tent needs a slope, e.g. tent:2.0");
    return IntervalMap::tent(rat_to_double(rat_parse(arg)));
  }
  if (head == "chebyshev") {
    if (arg.empty()) throw ConfigError("chebyshev needs a degree, e.g. chebyshev:2");
    return IntervalMap::chebyshev(std::stoi(arg));
  }
  if (head == "plm") {
    if (arg.empty()) throw ConfigError("plm needs a branch-table path, e.g. plm:branches.txt");
    std::ifstream f(arg);
    if (!f) throw ConfigError("cannot open branch table '" + arg + "'");
    std::vector<AffineBranch> branches;
    std::string line;
    int lineno = 0;
    while (std::getline(f, line)) {
      ++lineno;
      auto hash = line.find('#');
      if (hash != std::string::npos) line = line.substr(0, hash);
      std::stringstream ss(line);
      std::vector<std::string> tok;
      std::string w;
      while (ss >> w) tok.push_back(w);
      if (tok.empty()) continue;
      if (tok.size() != 4)
        throw ConfigError(arg + ":" + std::to_string(lineno) +
                          ": expected 'a b c d' (one branch per line)");
      AffineBranch br;
      br.ra = rat_parse(tok[0]);
      br.rb = rat_parse(tok[1]);
      br.rc = rat_parse(tok[2]);
      br.rd = rat_parse(tok[3]);
      br.a = rat_to_double(br.ra);
      br.b = rat_to_double(br.rb);
      br.c = rat_to_double(br.rc);
      br.d = rat_to_double(br.rd);
      branches.push_back(std::move(br));
    }
    return IntervalMap::piecewise_linear(std::move(branches));
  }
  throw ConfigError("unknown map spec '" + spec + "'");
}

std::vector<double> parse_t_values(const RunConfig& cfg) {
  if (cfg.t_range.empty()) return {cfg.t};
  std::stringstream ss(cfg.t_range);
  std::string a, b, c;
  if (!std::getline(ss, a, ':') || !std::getline(ss, b, ':') || !std::getline(ss, c))
    throw ConfigError("t-range must be lo:hi:count");
  const double lo = std::stod(a), hi = std::stod(b);
  const int n = std::stoi(c);
  if (n < 2 || !(lo < hi)) throw ConfigError("t-range must be lo:hi:count with count >= 2");
  std::vector<double> ts;
  for (int i = 0; i < n; ++i) ts.push_back(lo + (hi - lo) * i / (n - 1));
  return ts;
}

std::vector<double> parse_eps_list(const std::string& spec) {
  std::vector<double> eps;
  auto dots = spec.find("..");
  if (dots != std::string::npos) {
    auto parse_pow = [](const std::string& s) {
      auto caret = s.find("^");
      if (caret == std::string::npos || s.substr(0, caret) != "2")
        throw ConfigError("eps range must look like 2^-6..2^-12");
      return std::stoi(s.substr(caret + 1));
    };
    int k0 = parse_pow(spec.substr(0, dots));
    int k1 = parse_pow(spec.substr(dots + 2));
    if (k0 < k1) std::swap(k0, k1);  // descending radii
    for (int k = k0; k >= k1; --k) eps.push_back(std::pow(2.0, k));
    std::sort(eps.begin(), eps.end(), std::greater<>());
    return eps;
  }
  std::stringstream ss(spec);
  std::string tok;
  while (std::getline(ss, tok, ',')) eps.push_back(rat_to_double(rat_parse(tok)));
  if (eps.empty()) throw ConfigError("empty eps list");
  std::sort(eps.begin(), eps.end(), std::greater<>());
  return eps;
}

std::string iso_now() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t tt = std::chrono::system_clock::to_time_t(now);
  char buf[32];
  std::strftime(buf, sizeof buf, "%FT%TZ", std::gmtime(&tt));
  return buf;
}

const char* method_name(EscapeMethod m) {
  switch (m) {
    case EscapeMethod::Spectral:
      return "spectral";
    case EscapeMethod::DirectFit:
      return "direct_fit";
    case EscapeMethod::MonteCarlo:
      return "monte_carlo";
  }
  return "?";
}

class Report {
 public:
  Report(const RunConfig& cfg) : cfg_(cfg) {
    std::string root = cfg.out;
    if (root.empty()) {
      const char* env = std::getenv("ODYN_REPORT_ROOT");
      root = (env ? std::string(env) : "reports") + "/" + cfg.subcommand;
    }
    dir_ = root;
    std::error_code ec;
    fs::create_directories(dir_, ec);
    if (ec || !fs::is_directory(dir_)) throw IoError("cannot create report directory " + dir_);
    start_ = std::chrono::steady_clock::now();
  }

  std::string path(const std::string& name) {
    outputs_.push_back(name);
    return dir_ + "/" + name;
  }

  const std::string& dir() const { return dir_; }

  void finish() {
    JsonWriter j;
    j.begin_object();
    j.field("artifact", "odyn 0.1.0");
    j.field("subcommand", cfg_.subcommand);
    j.field("written_utc", iso_now());
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    j.field("wall_clock_s", secs);
    j.key("config");
    j.begin_object();
    j.field("map", cfg_.map);
    j.field("hole", cfg_.hole);
    j.field("t", cfg_.t);
    j.field("t_range", cfg_.t_range);
    j.field("grid", cfg_.grid);
    j.field("seed", static_cast<std::int64_t>(cfg_.seed));
    j.field("samples", cfg_.samples);
    j.field("steps", cfg_.steps);
    j.field("depth", cfg_.depth);
    j.field("horizon", cfg_.horizon);
    j.field("base_lo", cfg_.base_lo);
    j.field("base_hi", cfg_.base_hi);
    j.field("eps", cfg_.eps);
    j.field("center", cfg_.center);
    j.field("eigen_tol", cfg_.eigen_tol);
    j.field("max_iter", cfg_.max_iter);
    j.field("bowen_tlo", cfg_.bowen_tlo);
    j.field("bowen_thi", cfg_.bowen_thi);
    j.field("bowen_tol", cfg_.bowen_tol);
    j.field("psi", cfg_.psi);
    j.field("survivor_depth", cfg_.survivor_depth);
    j.field("dump_operator", cfg_.dump_operator);
    j.field("gnuplot", cfg_.gnuplot);
    j.end_object();
    j.begin_array("outputs");
    for (const auto& name : outputs_) {
      j.begin_object();
      j.field("file", name);
      j.field("sha256", sha256_file(dir_ + "/" + name));
      j.end_object();
    }
    j.end_array();
    j.end_object();
    j.write(dir_ + "/manifest.json");
  }

 private:
  RunConfig cfg_;
  std::string dir_;
  std::vector<std::string> outputs_;
  std::chrono::steady_clock::time_point start_;
};

void write_measure_csv(const GridMeasure& m, const std::string& path) {
  CsvWriter csv({"cell_lo", "cell_hi", "value"});
  for (int i = 0; i < m.grid.cells(); ++i) csv.row({m.grid.lo(i), m.grid.hi(i), m.masses[i]});
  csv.write(path);
}

void write_density_csv(const Grid& g, const std::vector<double>& v, const std::string& path) {
  CsvWriter csv({"cell_lo", "cell_hi", "value"});
  for (int i = 0; i < g.cells(); ++i) csv.row({g.lo(i), g.hi(i), v[i]});
  csv.write(path);
}

void estimate_json(JsonWriter& j, const EscapeEstimate& e) {
  j.begin_object();
  j.field("method", method_name(e.method));
  j.field("rate", e.rate);
  j.field("stderr", e.stderr_);
  j.begin_array("window");
  j.value(static_cast<double>(e.window_lo));
  j.value(static_cast<double>(e.window_hi));
  j.end_array();
  j.field("grid", e.grid_cells);
  j.field("seed", static_cast<std::int64_t>(e.seed));
  j.field("samples", e.samples);
  j.field("r2", e.r2);
  j.end_object();
}

// ---------------------------------------------------------------- pressure
void run_pressure(const RunConfig& cfg, Report& rep, std::ostream& out) {
  IntervalMap map = parse_map(cfg.map);
  Hole hole = Hole::parse(cfg.hole);
  Grid grid = make_grid(map, hole, cfg.grid);
  EigenOptions opt{cfg.eigen_tol, cfg.max_iter};
  auto ts = parse_t_values(cfg);

  CsvWriter csv({"t", "p_t"});
  JsonWriter j;
  j.begin_object();
  j.field("map", map.name());
  j.field("grid", grid.cells());
  j.begin_array("rows");
  double prev = std::numeric_limits<double>::infinity();
  for (double t : ts) {
    auto op = WeightedUlamOperator::build(map, t, grid);
    auto eig = leading_eigen(op, opt);
    const double p_t = std::log(eig.rho);
    if (p_t > prev + 1e-10)
      throw NumericError("pressure not decreasing in t on this grid");
    prev = p_t;
    csv.row({t, p_t});
    j.begin_object();
    j.field("t", t);
    j.field("p_t", p_t);
    j.field("rho", eig.rho);
    j.field("residual", eig.residual_right);
    j.field("iterations", eig.iterations);
    j.end_object();
    out << "  t=" << format_g12(t) << "  p_t=" << format_g12(p_t) << "\n";
    if (cfg.dump_operator)
      op.write_coordinate_text(rep.path("operator_t" + format_g12(t) + ".txt"), p_t);
  }
  j.end_array();
  j.end_object();
  csv.write(rep.path("pressure.csv"));
  j.write(rep.path("pressure.json"));
  out << "  -> pressure.csv, pressure.json\n";
}

// ------------------------------------------------------------------ escape
void run_escape(const RunConfig& cfg, Report& rep, std::ostream& out) {
  IntervalMap map = parse_map(cfg.map);
  Hole hole = Hole::parse(cfg.hole);
  Grid grid = make_grid(map, hole, cfg.grid);
  EigenOptions opt{cfg.eigen_tol, cfg.max_iter};

  auto bundle = solve_closed(map, cfg.t, grid, opt);
  auto es = escape_spectral(map, hole, cfg.t, grid, bundle, opt);

  JsonWriter j;
  j.begin_object();
  j.field("map", map.name());
  j.field("hole", hole.to_string());
  j.field("t", cfg.t);
  j.field("p_t", *bundle.potential.p_t);
  j.field("lambda", es.lambda);
  j.begin_array("estimates");

  EscapeEstimate spectral;
  spectral.method = EscapeMethod::Spectral;
  spectral.rate = es.rate;
  spectral.grid_cells = grid.cells();
  estimate_json(j, spectral);
  out << "  spectral rate = " << format_g12(es.rate) << "\n";

  auto direct = escape_direct(map, hole, cfg.t, grid, cfg.steps, bundle, opt);
  estimate_json(j, direct);
  out << "  direct-fit rate = " << format_g12(direct.rate) << " (window " << direct.window_lo
      << ".." << direct.window_hi << ")\n";

  if (cfg.t == 1.0 && cfg.samples > 0) {
    auto mc = escape_mc(map, hole, cfg.steps, cfg.samples, cfg.seed);
    estimate_json(j, mc);
    out << "  monte-carlo rate = " << format_g12(mc.rate) << " +- " << format_g12(mc.stderr_)
        << "\n";
  }
  j.end_array();
  j.end_object();
  j.write(rep.path("estimates.json"));

  write_density_csv(grid, es.g_H, rep.path("g_H.csv"));
  write_measure_csv(bundle.m_t, rep.path("m_t.csv"));
  write_measure_csv(bundle.mu_t, rep.path("mu_t.csv"));
  try {
    auto nu = survivor_equilibrium(map, hole, cfg.t, grid, bundle, opt);
    write_measure_csv(nu.nu, rep.path("nu_t.csv"));
  } catch (const NumericError&) {
    // everything escapes: no survivor measure to write
  }
  if (cfg.dump_operator) {
    auto op = WeightedUlamOperator::build(map, cfg.t, grid, &hole);
    op.write_coordinate_text(rep.path("operator_punctured.txt"), *bundle.potential.p_t);
  }
  if (cfg.survivor_depth >= 0) {
    OpenSystem sys(map, hole);
    auto ref = refine_survivor(sys, cfg.survivor_depth);
    CsvWriter csv({"lo", "hi"});
    for (const auto& iv : ref.intervals) csv.row({iv.lo, iv.hi});
    csv.write(rep.path("survivor.csv"));
    out << "  survivor depth " << cfg.survivor_depth << ": " << ref.intervals.size()
        << " intervals, mass " << format_g12(ref.lebesgue_mass) << "\n";
  }
  out << "  escape rate (spectral) = " << format_g12(es.rate) << "  -> estimates.json\n";
}

// ---------------------------------------------------------------- converge
void run_converge(const RunConfig& cfg, Report& rep, std::ostream& out) {
  IntervalMap map = parse_map(cfg.map);
  Hole hole = Hole::parse(cfg.hole);
  Grid grid = make_grid(map, hole, cfg.grid);
  EigenOptions opt{cfg.eigen_tol, cfg.max_iter};
  auto bundle = solve_closed(map, cfg.t, grid, opt);

  std::vector<double> psi(grid.cells(), 1.0);
  if (cfg.psi == "g0")
    psi = bundle.g0;
  else if (cfg.psi != "ones")
    throw ConfigError("psi must be 'ones' or 'g0'");

  auto tr = convergence_trace(map, hole, cfg.t, grid, psi, cfg.steps, bundle, opt);
  CsvWriter csv({"n", "distance"});
  for (std::size_t n = 0; n < tr.distances.size(); ++n)
    csv.row({static_cast<double>(n), tr.distances[n]});
  csv.write(rep.path("converge.csv"));

  JsonWriter j;
  j.begin_object();
  j.field("map", map.name());
  j.field("hole", hole.to_string());
  j.field("t", cfg.t);
  j.field("psi", cfg.psi);
  j.field("fitted_rate", tr.fitted_rate);
  j.field("fit_lo", tr.fit_lo);
  j.field("fit_hi", tr.fit_hi);
  j.end_object();
  j.write(rep.path("converge.json"));
  out << "  fitted geometric rate = " << format_g12(tr.fitted_rate) << "  -> converge.csv\n";
}

// ------------------------------------------------------------------ induce
void run_induce(const RunConfig& cfg, Report& rep, std::ostream& out) {
  IntervalMap map = parse_map(cfg.map);
  Hole hole = Hole::parse(cfg.hole);
  auto scheme = build_first_return(map, hole, cfg.base_lo, cfg.base_hi, cfg.depth);
  write_scheme_text(scheme, rep.path("scheme.txt"));

  const GridMeasure* mt = nullptr;
  GridMeasure mt_storage;
  if (cfg.t != 1.0 && !map.piecewise_affine()) {
    Grid grid = make_grid(map, hole, cfg.grid);
    mt_storage = conformal_measure(map, cfg.t, grid, EigenOptions{cfg.eigen_tol, cfg.max_iter});
    mt = &mt_storage;
  }
  auto tail = tail_distribution(scheme, cfg.t, mt);
  CsvWriter csv({"n", "mass"});
  for (std::size_t n = 0; n < tail.tail.size(); ++n)
    csv.row({static_cast<double>(n), tail.tail[n]});
  csv.write(rep.path("tail.csv"));

  auto dist = distortion_check(map, scheme, cfg.t);
  CsvWriter dcsv({"branch_lo", "branch_hi", "tau", "C_d"});
  for (std::size_t i = 0; i < scheme.branches.size(); ++i)
    dcsv.row({scheme.branches[i].lo, scheme.branches[i].hi,
              static_cast<double>(scheme.branches[i].tau), dist.per_branch[i]});
  dcsv.write(rep.path("distortion.csv"));

  JsonWriter j;
  j.begin_object();
  j.field("map", map.name());
  j.field("hole", hole.to_string());
  j.field("X_lo", scheme.X_lo);
  j.field("X_hi", scheme.X_hi);
  j.field("depth", scheme.depth);
  j.field("branches", static_cast<std::int64_t>(scheme.branches.size()));
  j.field("escaped_mass", scheme.escaped_mass);
  j.field("unresolved_mass", scheme.unresolved_mass);
  j.field("C0", tail.C0);
  j.field("alpha", tail.alpha);
  j.field("fit_lo", tail.fit_lo);
  j.field("fit_hi", tail.fit_hi);
  j.field("r2", tail.r2);
  j.field("C_d", dist.C_d);
  j.field("budget_hit", scheme.budget_hit);
  j.field("warnings", scheme.warnings);
  j.end_object();
  j.write(rep.path("tail.json"));
  out << "  branches=" << scheme.branches.size() << "  alpha=" << format_g12(tail.alpha)
      << "  C_d=" << format_g12(dist.C_d) << "  unresolved=" << format_g12(scheme.unresolved_mass)
      << "\n  -> scheme.txt, tail.csv, tail.json, distortion.csv\n";
}

// ------------------------------------------------------------------- bowen
void run_bowen(const RunConfig& cfg, Report& rep, std::ostream& out) {
  IntervalMap map = parse_map(cfg.map);
  Hole hole = Hole::parse(cfg.hole);
  Grid grid = make_grid(map, hole, cfg.grid);
  EigenOptions opt{cfg.eigen_tol, cfg.max_iter};

  auto res = bowen_root(map, hole, grid, cfg.bowen_tlo, cfg.bowen_thi, cfg.bowen_tol, opt);
  CsvWriter csv({"t", "P_H"});
  for (const auto& [t, p] : res.curve) csv.row({t, p});
  csv.write(rep.path("pressure_curve.csv"));

  OpenSystem sys(map, hole);
  auto ladder = default_box_ladder(map, std::min(cfg.depth, 14));
  auto box = box_dimension(sys, std::min(cfg.depth, 14), ladder);
  CsvWriter bcsv({"eps", "count"});
  for (const auto& [eps, count] : box.counts)
    bcsv.row({eps, static_cast<double>(count)});
  bcsv.write(rep.path("boxes.csv"));

  JsonWriter j;
  j.begin_object();
  j.field("map", map.name());
  j.field("hole", hole.to_string());
  j.field("grid", res.grid_cells);
  j.field("t_star", res.t_star);
  j.begin_array("bracket");
  j.value(res.t_lo);
  j.value(res.t_hi);
  j.end_array();
  j.field("box_dimension", box.slope);
  j.field("box_r2", box.r2);
  j.field("box_depth", box.depth);
  j.begin_array("curve");
  for (const auto& [t, p] : res.curve) {
    j.begin_array();
    j.value(t);
    j.value(p);
    j.end_array();
  }
  j.end_array();
  j.end_object();
  j.write(rep.path("bowen.json"));
  out << "  t* = " << format_g12(res.t_star) << "  box slope = " << format_g12(box.slope)
      << "  -> bowen.json\n";
}

// ---------------------------------------------------------------- zerohole
void run_zerohole(const RunConfig& cfg, Report& rep, std::ostream& out) {
  IntervalMap map = parse_map(cfg.map);
  EigenOptions opt{cfg.eigen_tol, cfg.max_iter};
  auto eps = parse_eps_list(cfg.eps);

  // periodic center detection: search small periods for a match
  std::optional<PeriodicOrbit> orbit;
  for (int p = 1; p <= 8 && !orbit; ++p) {
    for (const auto& o : periodic_points(map, p, 1e-12))
      if (std::abs(o.point - cfg.center) < 1e-9) {
        orbit = o;
        break;
      }
  }

  GridPolicy policy;
  policy.base_cells = cfg.grid;
  auto curve = ratio_curve(map, cfg.t, cfg.center, eps, orbit, policy, opt);

  CsvWriter csv({"eps", "escape", "mu_hole", "ratio"});
  for (const auto& row : curve.rows)
    if (row.ok) csv.row({row.eps, row.escape, row.mu_hole, row.ratio});
  csv.write(rep.path("ratio_curve.csv"));

  // scaling exponent and slow approach on the base grid
  Grid grid = make_grid(map, Hole{}, cfg.grid);
  auto bundle = solve_closed(map, cfg.t, grid, opt);
  auto slow = slow_approach_check(map, cfg.center, 0.1, cfg.horizon);
  auto scale = scaling_exponent(map, cfg.t, cfg.center, orbit, grid, bundle);

  JsonWriter j;
  j.begin_object();
  j.field("map", map.name());
  j.field("t", cfg.t);
  j.field("center", cfg.center);
  j.field("periodic", orbit.has_value());
  if (orbit) {
    j.field("period", orbit->period);
    j.field("multiplier", orbit->multiplier);
  }
  j.field("predicted_limit", curve.predicted);
  j.field("extrapolated", curve.extrapolated);
  j.field("mean_tail", curve.mean_tail);
  j.field("s_t", scale.s_t);
  j.field("empirical_scaling_slope", scale.empirical_slope);
  j.field("slow_approach_delta_z", slow.delta_z);
  j.field("slow_approach_pass", slow.pass);
  j.field("rows_used", static_cast<std::int64_t>(curve.rows.size()));
  j.end_object();
  j.write(rep.path("zerohole.json"));

  if (cfg.gnuplot) {
    std::ofstream gp(rep.path("plot.gp"), std::ios::binary);
    gp << "set datafile separator ','\n"
       << "set logscale x\n"
       << "set xlabel 'eps'\nset ylabel 'escape/mu(H_eps)'\n"
       << "plot 'ratio_curve.csv' using 1:4 with linespoints title 'ratio', \\\n"
       << "     " << format_g12(curve.predicted) << " with lines title 'predicted'\n";
  }
  out << "  predicted = " << format_g12(curve.predicted)
      << "  extrapolated = " << format_g12(curve.extrapolated) << "  -> ratio_curve.csv\n";
}

// ------------------------------------------------------------- variational
void run_variational(const RunConfig& cfg, Report& rep, std::ostream& out) {
  IntervalMap map = parse_map(cfg.map);
  Hole hole = Hole::parse(cfg.hole);
  Grid grid = make_grid(map, hole, cfg.grid);
  EigenOptions opt{cfg.eigen_tol, cfg.max_iter};
  auto ts = parse_t_values(cfg);

  CsvWriter csv({"t", "lhs", "rhs", "gap"});
  JsonWriter j;
  j.begin_object();
  j.field("map", map.name());
  j.field("hole", hole.to_string());
  j.begin_array("rows");
  bool oracle = true;
  for (double t : ts) {
    auto repod = variational_check(map, hole, t, grid, opt);
    const bool ok = repod.status == VariationalReport::Status::Ok;
    oracle = oracle && ok;
    csv.row({t, repod.lhs, ok ? repod.rhs : std::nan(""), ok ? repod.gap : std::nan("")});
    j.begin_object();
    j.field("t", t);
    j.field("status", ok ? "ok" : "oracle_unavailable");
    j.field("lhs", repod.lhs);
    if (ok) {
      j.field("rhs", repod.rhs);
      j.field("gap", repod.gap);
      j.field("nu_entropy", repod.nu_entropy);
    }
    j.end_object();
    out << "  t=" << format_g12(t) << "  lhs=" << format_g12(repod.lhs)
        << (ok ? "  gap=" + format_g12(repod.gap) : "  [oracle unavailable]") << "\n";
  }
  j.end_array();
  j.end_object();
  csv.write(rep.path("variational.csv"));
  j.write(rep.path("variational.json"));

  if (oracle) {
    auto model = build_sft(map, hole);
    std::ofstream f(rep.path("sft.txt"), std::ios::binary);
    f << "# symbols=" << model.symbols << "\n# cell_lo cell_hi log_slope\n";
    for (int i = 0; i < model.symbols; ++i)
      f << format_g12(model.cells[i].first) << " " << format_g12(model.cells[i].second) << " "
        << format_g12(model.log_slopes[i]) << "\n";
    f << "# adjacency\n";
    for (int i = 0; i < model.symbols; ++i) {
      for (int k = 0; k < model.symbols; ++k) f << (model.allowed[i][k] ? "1" : "0");
      f << "\n";
    }
  }
  out << "  -> variational.csv, variational.json\n";
}

// ------------------------------------------------------- check-conditions
void run_check_conditions(const RunConfig& cfg, Report& rep, std::ostream& out) {
  IntervalMap map = parse_map(cfg.map);
  Hole hole = Hole::parse(cfg.hole);
  ConditionParams params;
  params.horizon = cfg.horizon;

  auto ce = check_collet_eckmann(map, params);
  auto c1 = check_expansion(map, params, 200, cfg.seed);

  JsonWriter j;
  j.begin_object();
  j.field("map", map.name());
  j.field("hole", hole.to_string());
  j.field("horizon", cfg.horizon);
  auto emit = [&](const char* name, const ConditionReport& r) {
    j.key(name);
    j.begin_object();
    j.field("pass", r.pass);
    j.field("vacuous", r.vacuous);
    j.field("notes", r.notes);
    j.begin_array("rows");
    for (const auto& row : r.rows) {
      j.begin_object();
      j.field("point", row.point);
      j.field("margin", row.margin);
      j.field("pass", row.pass);
      j.field("witness", row.witness);
      j.field("what", row.what);
      j.end_object();
    }
    j.end_array();
    j.end_object();
  };
  emit("C1_sampled_expansion", c1);
  emit("C2_collet_eckmann", ce);
  if (!hole.empty()) {
    OpenSystem sys(map, hole);
    emit("H1_critical_orbits_vs_boundary", check_H1(sys, params));
    emit("H2_center_orbits", check_H2_orbit_separation(sys, params));
  }
  j.field("covering_time_delta0_over_3", covering_time(map, params.delta0));
  j.end_object();
  j.write(rep.path("conditions.json"));
  out << "  C2 pass=" << (ce.pass || ce.vacuous) << "  -> conditions.json\n";
}

}  // namespace

void run_subcommand(const RunConfig& cfg, std::ostream& summary) {
  if (cfg.threads > 0) omp_set_num_threads(cfg.threads);
  Report rep(cfg);
  summary << "[" << cfg.subcommand << "] map=" << cfg.map << " hole=" << cfg.hole
          << " grid=" << cfg.grid << "\n";
  if (cfg.subcommand == "pressure")
    run_pressure(cfg, rep, summary);
  else if (cfg.subcommand == "escape")
    run_escape(cfg, rep, summary);
  else if (cfg.subcommand == "converge")
    run_converge(cfg, rep, summary);
  else if (cfg.subcommand == "induce")
    run_induce(cfg, rep, summary);
  else if (cfg.subcommand == "bowen")
    run_bowen(cfg, rep, summary);
  else if (cfg.subcommand == "zerohole")
    run_zerohole(cfg, rep, summary);
  else if (cfg.subcommand == "variational")
    run_variational(cfg, rep, summary);
  else if (cfg.subcommand == "check-conditions")
    run_check_conditions(cfg, rep, summary);
  else
    throw ConfigError("unknown subcommand '" + cfg.subcommand + "'");
  rep.finish();
  summary << "report: " << rep.dir() << "/manifest.json\n";
}

}  // namespace odyn
