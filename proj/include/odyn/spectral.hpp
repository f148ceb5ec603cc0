#ifndef ODYN_SPECTRAL_HPP
#define ODYN_SPECTRAL_HPP

#include <optional>
#include <string>
#include <vector>

#include "odyn/grid.hpp"
#include "odyn/open_system.hpp"
#include "odyn/sparse.hpp"

namespace odyn {

// Geometric potential -t log|Df| with its pressure cached once computed.
struct Potential {
  double t = 1.0;
  std::optional<double> p_t;
};

struct GridMeasure {
  Grid grid;
  std::vector<double> masses;  // nonnegative, summing to 1

  double mass_between(double lo, double hi) const;  // proportional on partial cells
  double mass_of_ball(double center, double radius) const;
};

// Galerkin matrix of the transfer operator for -t log|Df| on piecewise
// constants: M[j][i] = (1/|C_j|) Int_{C_i cap f^{-1} C_j} |Df|^{1-t} dx.
// The punctured version zeroes rows and columns of cells inside the hole and
// of cells inside f^{-1}(hole).
class WeightedUlamOperator {
 public:
  static WeightedUlamOperator build(const IntervalMap& map, double t, const Grid& grid,
                                    const Hole* hole = nullptr);
  static WeightedUlamOperator build_serial(const IntervalMap& map, double t,
                                           const Grid& grid, const Hole* hole = nullptr);

  const Grid& grid() const { return grid_; }
  double t() const { return t_; }
  bool punctured() const { return punctured_; }
  const Csr& matrix() const { return mat_; }
  const Csr& matrix_transposed() const { return matT_; }
  const std::vector<char>& mask() const { return mask_; }
  const std::string& warnings() const { return warnings_; }

  void write_coordinate_text(const std::string& path, double p_t) const;

 private:
  Grid grid_;
  double t_ = 1.0;
  bool punctured_ = false;
  Csr mat_, matT_;
  std::vector<char> mask_;
  std::string warnings_;

  friend WeightedUlamOperator assemble(const IntervalMap&, double, const Grid&,
                                       const Hole*, bool);
};

struct SpectralResult {
  double rho = 0.0;                 // leading eigenvalue
  std::vector<double> right;        // cellwise density values, sum |v_i| = 1
  std::vector<double> left;         // cell masses u with u^T M = rho u^T, sum = 1
  double residual_right = 0.0;      // ||Mv - rho v||_1 with ||v||_1 = 1
  double residual_left = 0.0;
  int iterations = 0;
  std::string warnings;
};

struct EigenOptions {
  double tol = 1e-12;
  int max_iter = 100000;
};

// Power iteration from the all-ones start with l1 normalization each step.
// Deterministic; restricted to the dominant communicating class with a
// warning when the pattern is reducible across several recurrent classes.
SpectralResult leading_eigen(const WeightedUlamOperator& op, const EigenOptions& opt = {});

// Same driver on a bare matrix (rows index targets, columns sources).
SpectralResult leading_eigen_matrix(const Csr& mat, const EigenOptions& opt = {});

// Closed-system artifacts for one (map, t, grid): pressure, conformal
// measure, equilibrium state.  Punctured runs must reuse the same grid.
struct SpectralBundle {
  Potential potential;
  SpectralResult closed;
  GridMeasure m_t;                // conformal measure from the left eigenvector
  std::vector<double> g0;         // equilibrium density, Int g0 dm_t = 1
  GridMeasure mu_t;               // equilibrium state, masses prop to v_i w_i |C_i|
};

SpectralBundle solve_closed(const IntervalMap& map, double t, const Grid& grid,
                            const EigenOptions& opt = {});

double pressure(const IntervalMap& map, double t, const Grid& grid,
                const EigenOptions& opt = {});

GridMeasure conformal_measure(const IntervalMap& map, double t, const Grid& grid,
                              const EigenOptions& opt = {});

struct EscapeSpectral {
  double lambda = 0.0;            // rho_punctured / e^{p_t}
  double rate = 0.0;              // -log lambda; +inf when everything escapes
  std::vector<double> g_H;        // conditionally invariant density, Int g dm_t = 1
  SpectralResult punctured;
};

EscapeSpectral escape_spectral(const IntervalMap& map, const Hole& hole, double t,
                               const Grid& grid, const SpectralBundle& closed,
                               const EigenOptions& opt = {});

struct ConvergenceTrace {
  std::vector<double> distances;  // L1(m_t) distance to g_H per step
  double fitted_rate = 0.0;       // geometric rate over the fit window
  int fit_lo = 0, fit_hi = 0;
};

// Distance of normalized punctured pushforwards of psi to g_H (Theorem-2
// style convergence diagnostic).
ConvergenceTrace convergence_trace(const IntervalMap& map, const Hole& hole, double t,
                                   const Grid& grid, std::vector<double> psi, int n_max,
                                   const SpectralBundle& closed,
                                   const EigenOptions& opt = {});

// Grid for a system: uniform N-cell mesh snapped to hole endpoints, critical
// points, and optional extra special points.
Grid make_grid(const IntervalMap& map, const Hole& hole, int n_cells,
               std::span<const double> extra = {});

}  // namespace odyn

#endif
