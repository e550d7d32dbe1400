#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <stdexcept>
#include <string>

namespace vcur {

// Column-major dense matrix of 64-bit reals. Columns are the data points.
using DenseMatrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

// Invalid argument values: bad dimensions, ranks, flags.
struct parameter_error : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Structurally valid input that is numerically unusable (all-zero matrix, ...).
struct degenerate_input_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A basis whose columns are not numerically independent. `column` is the
// 0-based offending column.
struct rank_deficiency_error : std::runtime_error {
  Index column;
  rank_deficiency_error(const std::string& what, Index col)
      : std::runtime_error(what), column(col) {}
};

struct io_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Malformed file contents. `location` is a byte offset for binary formats and
// a 1-based line number for text formats.
struct parse_error : io_error {
  std::size_t location;
  parse_error(const std::string& what, std::size_t loc) : io_error(what), location(loc) {}
};

}  // namespace vcur
