#ifndef ODYN_SPARSE_HPP
#define ODYN_SPARSE_HPP

#include <cstdint>
#include <span>
#include <vector>

namespace odyn {

struct Triplet {
  int row, col;
  double value;
};

// Compressed sparse rows.  Kernels come in a serial reference version and an
// OpenMP version; both produce bitwise identical results because each row is
// accumulated sequentially.
struct Csr {
  int n = 0;
  std::vector<std::int64_t> rowptr;
  std::vector<int> col;
  std::vector<double> val;

  std::int64_t nnz() const { return static_cast<std::int64_t>(col.size()); }

  static Csr from_triplets(int n, std::span<const Triplet> ts);
  Csr transposed() const;
};

void matvec_serial(const Csr& m, std::span<const double> x, std::span<double> y);
void matvec(const Csr& m, std::span<const double> x, std::span<double> y);

// Strongly connected components of the nonzero pattern (Tarjan, iterative).
// Returns component ids; `nontrivial` lists components that contain a cycle
// (size > 1 or a self-loop).
std::vector<int> strongly_connected_components(const Csr& m, std::vector<int>* nontrivial);

// Cells reachable from `sources` along directed edges of the pattern.
std::vector<char> reachable(const Csr& m, const std::vector<char>& sources);

}  // namespace odyn

#endif
