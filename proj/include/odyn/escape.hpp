#ifndef ODYN_ESCAPE_HPP
#define ODYN_ESCAPE_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "odyn/spectral.hpp"

namespace odyn {

enum class EscapeMethod { Spectral, DirectFit, MonteCarlo };

struct EscapeEstimate {
  double rate = 0.0;
  EscapeMethod method = EscapeMethod::DirectFit;
  int window_lo = 0, window_hi = 0;
  double stderr_ = 0.0;
  double r2 = 0.0;
  int grid_cells = 0;
  std::uint64_t seed = 0;
  std::int64_t samples = 0;
};

// Least-squares slope of -log m_t(survivor_n), restricted to the window where
// the decay is numerically linear (R^2 >= 0.999).
EscapeEstimate escape_direct(const IntervalMap& map, const Hole& hole, double t,
                             const Grid& grid, int n_max, const SpectralBundle& closed,
                             const EigenOptions& opt = {});

// Survivor-count slope from uniform starts; Lebesgue reference, so t = 1
// only.  Deterministic for a fixed seed regardless of thread count.
EscapeEstimate escape_mc(const IntervalMap& map, const Hole& hole, int n,
                         std::int64_t n_samples, std::uint64_t seed);

// Exact subshift model for piecewise-linear Markov systems whose hole is a
// union of Markov cells.
struct SFTModel {
  int symbols = 0;
  std::vector<std::pair<double, double>> cells;  // surviving Markov cells
  std::vector<std::vector<char>> allowed;        // allowed[i][j]: cell i -> cell j
  std::vector<double> log_slopes;                // log|Df| on cell i
  bool reducible_flag = false;
};

SFTModel build_sft(const IntervalMap& map, const Hole& hole);

// log of the Perron eigenvalue of allowed .* exp(-t log_slopes).
double sft_pressure(const SFTModel& model, double t);

// Stationary measure of the SFT equilibrium state and exact cylinder masses.
struct SFTEquilibrium {
  double t = 1.0;
  double pressure = 0.0;
  std::vector<double> stationary;   // per symbol
  std::vector<double> left, right;  // Perron vectors of the weighted matrix
  double rho = 0.0;
};

SFTEquilibrium sft_equilibrium(const SFTModel& model, double t);
double sft_cylinder_mass(const SFTModel& model, const SFTEquilibrium& eq,
                         std::span<const int> word);
// entropy of the SFT equilibrium state: P + t * Int log|Df| dnu
double sft_entropy(const SFTModel& model, const SFTEquilibrium& eq, double t);

struct SurvivorMeasure {
  GridMeasure nu;        // supported on surviving cells
  bool eig_shortcut = true;
  int limit_n = 0;
};

// Survivor-set equilibrium measure from the product of punctured left and
// right eigenvectors (the stationary form of the defining limit).
SurvivorMeasure survivor_equilibrium(const IntervalMap& map, const Hole& hole, double t,
                                     const Grid& grid, const SpectralBundle& closed,
                                     const EigenOptions& opt = {});

// Finite-n evaluation nu_n(psi) = e^{rate n} Int_{survivor_n} psi g_H dm_t,
// kept as an independent validation of the eigenvector product.
double survivor_limit_eval(const IntervalMap& map, const Hole& hole, double t,
                           const Grid& grid, std::span<const double> psi, int n,
                           const SpectralBundle& closed, const EigenOptions& opt = {});

struct VariationalReport {
  enum class Status { Ok, OracleUnavailable } status = Status::Ok;
  double lhs = 0.0;  // p_t - escape rate, spectral route
  double rhs = 0.0;  // exact SFT pressure of the punctured potential
  double gap = 0.0;
  double nu_entropy = 0.0;  // exact on Markov instances
};

VariationalReport variational_check(const IntervalMap& map, const Hole& hole, double t,
                                    const Grid& grid, const EigenOptions& opt = {});

}  // namespace odyn

#endif
