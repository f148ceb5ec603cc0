#ifndef ODYN_CLI_HPP
#define ODYN_CLI_HPP

#include <cstdint>
#include <iosfwd>
#include <string>

namespace odyn {

// Everything a run needs; defaults here are the materialized defaults echoed
// into the manifest.
struct RunConfig {
  std::string subcommand;
  std::string map = "doubling";
  std::string hole = "none";
  double t = 1.0;
  std::string t_range;  // "lo:hi:count" sweep; empty means the single t
  int grid = 4096;
  std::uint64_t seed = 1;
  std::int64_t samples = 1'000'000;
  int steps = 40;       // direct-fit horizon, trace length, MC steps
  int depth = 40;       // inducing cutoff and survivor depth
  int horizon = 50;     // condition-check horizon
  double base_lo = 0.0, base_hi = 0.5;  // inducing base X
  std::string eps = "2^-6..2^-10";      // zerohole radii
  double center = 0.5;                  // zerohole center z
  double eigen_tol = 1e-12;
  int max_iter = 100000;
  double bowen_tlo = 0.3, bowen_thi = 1.2;
  double bowen_tol = 1e-4;
  std::string psi = "ones";  // converge start density: ones | g0
  int threads = 0;
  std::string out;  // report directory; default <ODYN_REPORT_ROOT or ./reports>/<sub>
  bool dump_operator = false;
  bool gnuplot = false;
  int survivor_depth = -1;
};

// Runs one subcommand, writes outputs + manifest into the report directory,
// prints a summary table.  Throws ConfigError / NumericError / IoError;
// the CLI maps those to exit codes 2 / 3 / 4.
void run_subcommand(const RunConfig& cfg, std::ostream& summary);

}  // namespace odyn

#endif
