#include <catch_amalgamated.hpp>

#include "oracles.hpp"
#include "test_support.hpp"
#include "voronoi_cur/deim.hpp"

using namespace vcur;

TEST_CASE("deim_select picks canonical rows for canonical columns") {
  DenseMatrix w = DenseMatrix::Zero(5, 2);
  w(0, 0) = 1.0;
  w(1, 1) = 1.0;
  REQUIRE(deim_select(w) == std::vector<Index>{0, 1});
}

TEST_CASE("deim_select single column takes the magnitude argmax") {
  DenseMatrix w(3, 1);
  w << 0.2, -0.9, 0.1;
  REQUIRE(deim_select(w) == std::vector<Index>{1});
}

TEST_CASE("deim_select matches the greedy-recurrence oracle") {
  const DenseMatrix w = range_basis(support::uniform_matrix(6, 3, 7)).basis;
  REQUIRE(deim_select(w) == oracle::deim_oracle(w));
}

TEST_CASE("deim_select names the dependent column") {
  DenseMatrix w(4, 2);
  w.col(0) = Vector::Unit(4, 0);
  w.col(1) = Vector::Unit(4, 0);
  try {
    deim_select(w);
    FAIL("expected rank_deficiency_error");
  } catch (const rank_deficiency_error& e) {
    REQUIRE(e.column == 1);
  }
}

TEST_CASE("deim_select rejects bad shapes") {
  REQUIRE_THROWS_AS(deim_select(DenseMatrix(4, 0)), parameter_error);
  REQUIRE_THROWS_AS(deim_select(support::uniform_matrix(2, 3, 1)), parameter_error);
}

TEST_CASE("deim_select equals the oracle on a hundred seeded bases") {
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    const Index n = 6 + Index(seed % 15);   // up to 20 rows
    const Index r = 2 + Index(seed % 5);    // up to 6 columns
    const DenseMatrix w = range_basis(support::gaussian_matrix(n, r, 1000 + seed)).basis;
    REQUIRE(Index(w.cols()) == r);
    REQUIRE(deim_select(w) == oracle::deim_oracle(w));
  }
}

TEST_CASE("deim_select returns distinct indices") {
  for (std::uint64_t seed : {5u, 6u, 7u}) {
    const DenseMatrix w = range_basis(support::gaussian_matrix(12, 5, seed)).basis;
    const std::vector<Index> idx = deim_select(w);
    std::vector<Index> sorted = idx;
    std::sort(sorted.begin(), sorted.end());
    REQUIRE(std::adjacent_find(sorted.begin(), sorted.end()) == sorted.end());
  }
}
