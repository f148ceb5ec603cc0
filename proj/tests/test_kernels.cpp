// Serial reference kernels against the OpenMP versions: results must be
// bitwise identical regardless of thread count.

#include <omp.h>

#include "doctest.h"
#include "odyn/escape.hpp"
#include "odyn/inducing.hpp"
#include "odyn/rng.hpp"
#include "odyn/spectral.hpp"

using namespace odyn;

TEST_CASE("matvec: omp equals serial bitwise") {
  SplitMix64 rng(3);
  const int n = 500;
  std::vector<Triplet> ts;
  for (int i = 0; i < 6000; ++i)
    ts.push_back({static_cast<int>(rng.next() % n), static_cast<int>(rng.next() % n),
                  rng.uniform()});
  Csr m = Csr::from_triplets(n, ts);
  std::vector<double> x(n), y1(n), y2(n);
  for (auto& v : x) v = rng.uniform();
  matvec_serial(m, x, y1);
  matvec(m, x, y2);
  CHECK(y1 == y2);
}

TEST_CASE("assembly: omp equals serial bitwise") {
  auto log4 = IntervalMap::logistic(4.0);
  Hole hole = Hole::interval(0.7, 0.75);
  Grid g = make_grid(log4, hole, 512);
  auto par = WeightedUlamOperator::build(log4, 1.1, g, &hole);
  auto ser = WeightedUlamOperator::build_serial(log4, 1.1, g, &hole);
  CHECK(par.matrix().rowptr == ser.matrix().rowptr);
  CHECK(par.matrix().col == ser.matrix().col);
  CHECK(par.matrix().val == ser.matrix().val);
}

TEST_CASE("assembly is independent of the thread count") {
  auto tri = IntervalMap::tripling();
  Grid g = Grid::uniform(729);
  const int saved = omp_get_max_threads();
  omp_set_num_threads(1);
  auto one = WeightedUlamOperator::build(tri, 0.9, g);
  omp_set_num_threads(4);
  auto four = WeightedUlamOperator::build(tri, 0.9, g);
  omp_set_num_threads(saved);
  CHECK(one.matrix().val == four.matrix().val);
  CHECK(one.matrix().col == four.matrix().col);
}

TEST_CASE("csr transpose round trip") {
  SplitMix64 rng(9);
  const int n = 64;
  std::vector<Triplet> ts;
  for (int i = 0; i < 400; ++i)
    ts.push_back({static_cast<int>(rng.next() % n), static_cast<int>(rng.next() % n),
                  rng.uniform()});
  Csr m = Csr::from_triplets(n, ts);
  Csr mtt = m.transposed().transposed();
  CHECK(m.rowptr == mtt.rowptr);
  CHECK(m.col == mtt.col);
  CHECK(m.val == mtt.val);
}

TEST_CASE("duplicate triplets are summed") {
  std::vector<Triplet> ts{{0, 1, 0.5}, {0, 1, 0.25}, {1, 0, 1.0}};
  Csr m = Csr::from_triplets(2, ts);
  CHECK(m.nnz() == 2);
  CHECK(m.val[0] == 0.75);
}

TEST_CASE("strongly connected components of a two-class pattern") {
  // 0 <-> 1 feeding 2 <-> 3, plus isolated 4
  std::vector<Triplet> ts{{0, 1, 1.0}, {1, 0, 1.0}, {2, 1, 1.0}, {2, 3, 1.0}, {3, 2, 1.0}};
  Csr m = Csr::from_triplets(5, ts);
  std::vector<int> nontrivial;
  auto comp = strongly_connected_components(m, &nontrivial);
  CHECK(nontrivial.size() == 2);
  CHECK(comp[0] == comp[1]);
  CHECK(comp[2] == comp[3]);
  CHECK(comp[0] != comp[2]);
  CHECK(comp[4] != comp[0]);
}

TEST_CASE("refinement is deterministic across thread counts") {
  auto tri = IntervalMap::tripling();
  Hole mid = Hole::interval(Rat(1, 3), Rat(2, 3));
  const int saved = omp_get_max_threads();
  omp_set_num_threads(1);
  auto s1 = build_first_return(tri, mid, 0.0, 1.0 / 3.0, 16);
  omp_set_num_threads(4);
  auto s4 = build_first_return(tri, mid, 0.0, 1.0 / 3.0, 16);
  omp_set_num_threads(saved);
  REQUIRE(s1.branches.size() == s4.branches.size());
  for (std::size_t i = 0; i < s1.branches.size(); ++i) {
    CHECK(s1.branches[i].lo == s4.branches[i].lo);
    CHECK(s1.branches[i].hi == s4.branches[i].hi);
    CHECK(s1.branches[i].tau == s4.branches[i].tau);
  }
}
