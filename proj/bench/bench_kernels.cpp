// Serial reference vs OpenMP kernels: operator assembly, matvec, Monte Carlo.
// The parallel versions must produce bitwise identical results; this target
// reports wall-clock ratios.

#include <omp.h>

#include <chrono>
#include <cstdio>
#include <functional>

#include "odyn/escape.hpp"
#include "odyn/spectral.hpp"

using namespace odyn;

namespace {

double time_of(const std::function<void()>& fn, int reps = 3) {
  double best = 1e300;
  for (int r = 0; r < reps; ++r) {
    const auto t0 = std::chrono::steady_clock::now();
    fn();
    const auto t1 = std::chrono::steady_clock::now();
    best = std::min(best, std::chrono::duration<double>(t1 - t0).count());
  }
  return best;
}

}  // namespace

int main(int argc, char** argv) {
  int n_cells = 1 << 14;
  if (argc > 1) n_cells = std::atoi(argv[1]);
  std::printf("threads=%d  grid=%d\n", omp_get_max_threads(), n_cells);

  IntervalMap map = IntervalMap::logistic(4.0);
  Hole hole = Hole::interval(0.3, 0.32);
  Grid grid = make_grid(map, hole, n_cells);

  const double t_assemble_serial =
      time_of([&] { WeightedUlamOperator::build_serial(map, 1.1, grid, &hole); });
  const double t_assemble_omp =
      time_of([&] { WeightedUlamOperator::build(map, 1.1, grid, &hole); });

  auto op = WeightedUlamOperator::build(map, 1.1, grid, &hole);
  std::vector<double> x(grid.cells(), 1.0), y(grid.cells());
  const int reps = 200;
  const double t_mv_serial = time_of([&] {
    for (int r = 0; r < reps; ++r) matvec_serial(op.matrix(), x, y);
  });
  const double t_mv_omp = time_of([&] {
    for (int r = 0; r < reps; ++r) matvec(op.matrix(), x, y);
  });

  const std::int64_t samples = 2'000'000;
  double t_mc_serial;
  {
    const int saved = omp_get_max_threads();
    omp_set_num_threads(1);
    t_mc_serial = time_of([&] { escape_mc(map, hole, 20, samples, 7); }, 1);
    omp_set_num_threads(saved);
  }
  const double t_mc_omp = time_of([&] { escape_mc(map, hole, 20, samples, 7); }, 1);

  std::printf("%-22s %10s %10s %8s\n", "kernel", "serial[s]", "openmp[s]", "speedup");
  std::printf("%-22s %10.4f %10.4f %8.2fx\n", "assemble", t_assemble_serial, t_assemble_omp,
              t_assemble_serial / t_assemble_omp);
  std::printf("%-22s %10.4f %10.4f %8.2fx\n", "matvec x200", t_mv_serial, t_mv_omp,
              t_mv_serial / t_mv_omp);
  std::printf("%-22s %10.4f %10.4f %8.2fx\n", "monte carlo 2M", t_mc_serial, t_mc_omp,
              t_mc_serial / t_mc_omp);
  return 0;
}
