#include <fstream>
#include <iostream>
#include <regex>

#include "CLI11.hpp"
#include "odyn/cli.hpp"
#include "odyn/errors.hpp"

namespace {

// reject malformed config lines before CLI11 sees them, with line numbers
void prescan_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw odyn::ConfigError("cannot open config file '" + path + "'");
  static const std::regex ok(
      R"(^\s*($|[#;].*|\[[^\]]+\]\s*$|[A-Za-z0-9_.\-]+\s*=.*))");
  std::string line;
  int n = 0;
  while (std::getline(f, line)) {
    ++n;
    if (!std::regex_match(line, ok))
      throw odyn::ConfigError(path + ":" + std::to_string(n) +
                              ": expected 'key = value', '[section]' or comment");
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"odyn: escape rates, pressure and dimension for interval maps with holes"};
  app.set_version_flag("--version", "odyn 0.1.0");

  odyn::RunConfig cfg;
  app.add_option("--map", cfg.map,
                 "map spec: logistic:4.0 | doubling | tripling | tent:2.0 | "
                 "plm:<branch-table> | chebyshev:<k>")
      ->capture_default_str();
  app.add_option("--hole", cfg.hole, "hole spec: (a,b)[;(a,b)]*, values decimal or p/q")
      ->capture_default_str();
  app.add_option("--t", cfg.t, "potential parameter")->capture_default_str();
  app.add_option("--t-range", cfg.t_range, "sweep lo:hi:count (pressure, variational)");
  app.add_option("--grid", cfg.grid, "cell count of the uniform mesh")->capture_default_str();
  app.add_option("--seed", cfg.seed, "Monte Carlo seed")->capture_default_str();
  app.add_option("--samples", cfg.samples, "Monte Carlo sample count")->capture_default_str();
  app.add_option("--steps", cfg.steps, "iteration horizon for fits and traces")
      ->capture_default_str();
  app.add_option("--depth", cfg.depth, "inducing / survivor refinement depth")
      ->capture_default_str();
  app.add_option("--horizon", cfg.horizon, "condition-check horizon")->capture_default_str();
  app.add_option("--base-lo", cfg.base_lo, "inducing base left endpoint")
      ->capture_default_str();
  app.add_option("--base-hi", cfg.base_hi, "inducing base right endpoint")
      ->capture_default_str();
  app.add_option("--eps", cfg.eps, "zero-hole radii: 2^-6..2^-12 or comma list")
      ->capture_default_str();
  app.add_option("--center", cfg.center, "zero-hole center z")->capture_default_str();
  app.add_option("--eigen-tol", cfg.eigen_tol, "power-iteration residual tolerance")
      ->capture_default_str();
  app.add_option("--max-iter", cfg.max_iter, "power-iteration cap")->capture_default_str();
  app.add_option("--bowen-tlo", cfg.bowen_tlo, "Bowen bracket left")->capture_default_str();
  app.add_option("--bowen-thi", cfg.bowen_thi, "Bowen bracket right")->capture_default_str();
  app.add_option("--bowen-tol", cfg.bowen_tol, "Bowen bisection tolerance")
      ->capture_default_str();
  app.add_option("--psi", cfg.psi, "converge start density: ones | g0")
      ->capture_default_str();
  app.add_option("--threads", cfg.threads, "OpenMP worker count (0 = library default)")
      ->capture_default_str();
  app.add_option("--out", cfg.out, "report directory (default $ODYN_REPORT_ROOT/<sub>)");
  app.add_flag("--dump-operator", cfg.dump_operator, "write the sparse operator as text");
  app.add_flag("--gnuplot", cfg.gnuplot, "emit a gnuplot script next to the CSVs");
  app.add_option("--survivor-depth", cfg.survivor_depth,
                 "also export the survivor refinement at this depth (escape)");
  app.set_config("--config", "", "key = value config file; command-line flags override");

  for (const char* name : {"pressure", "escape", "converge", "induce", "bowen", "zerohole",
                           "variational", "check-conditions"}) {
    auto* sub = app.add_subcommand(name);
    sub->fallthrough();
  }
  app.require_subcommand(0, 1);

  // pre-scan the config file for line-precise syntax errors
  for (int i = 1; i + 1 < argc; ++i) {
    if (std::string(argv[i]) == "--config") {
      try {
        prescan_config(argv[i + 1]);
      } catch (const odyn::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
      }
    }
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  const auto subs = app.get_subcommands();
  if (subs.empty()) {
    std::cerr << app.help() << "\n";
    return 2;
  }
  cfg.subcommand = subs.front()->get_name();

  try {
    odyn::run_subcommand(cfg, std::cout);
  } catch (const odyn::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const odyn::IoError& e) {
    std::cerr << "output error: " << e.what() << "\n";
    return 4;
  } catch (const odyn::Error& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
