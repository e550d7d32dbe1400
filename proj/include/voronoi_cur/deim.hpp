#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "voronoi_cur/numerics.hpp"

namespace vcur {

// Greedy interpolation-index selection. The first index is the argmax of
// |w(:,1)|; each later column is interpolated on the rows picked so far and
// the argmax of its residual magnitude becomes the next index. Argmax ties go
// to the smaller row index. Requires numerically independent columns;
// otherwise throws naming the offending column.
inline std::vector<Index> deim_select(const DenseMatrix& w) {
  const Index n = w.rows();
  const Index r = w.cols();
  if (r < 1) throw parameter_error("deim_select: empty basis");
  if (r > n) throw parameter_error("deim_select: more columns than rows");
  if (!w.allFinite()) throw parameter_error("deim_select: non-finite entries");

  std::vector<Index> pivots;
  pivots.reserve(std::size_t(r));
  for (Index j = 0; j < r; ++j) {
    Vector res = w.col(j);
    if (j > 0) {
      DenseMatrix sub(j, j);
      Vector rhs(j);
      for (Index row = 0; row < j; ++row) {
        for (Index col = 0; col < j; ++col) sub(row, col) = w(pivots[std::size_t(row)], col);
        rhs(row) = w(pivots[std::size_t(row)], j);
      }
      const Vector coef = sub.colPivHouseholderQr().solve(rhs);
      res.noalias() -= w.leftCols(j) * coef;
    }
    Index best = 0;
    for (Index i = 1; i < n; ++i) {
      if (std::abs(res(i)) > std::abs(res(best))) best = i;
    }
    const double scale = w.col(j).cwiseAbs().maxCoeff();
    const bool revisited =
        std::find(pivots.begin(), pivots.end(), best) != pivots.end();
    if (std::abs(res(best)) <= 1e-12 * scale || revisited) {
      throw rank_deficiency_error(
          "deim_select: column " + std::to_string(j) + " depends on the previous columns", j);
    }
    pivots.push_back(best);
  }
  return pivots;
}

}  // namespace vcur
