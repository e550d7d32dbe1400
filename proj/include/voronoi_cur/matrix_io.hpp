#pragma once

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>

#include "voronoi_cur/common.hpp"

namespace vcur {

// Locale-free number formatting/parsing (std::to_chars / std::from_chars).

inline std::string format_double(double v, int precision = 17) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, precision);
  return std::string(buf, res.ptr);
}

inline std::string format_double_shortest(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

inline std::string format_fixed(double v, int precision) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::fixed, precision);
  return std::string(buf, res.ptr);
}

inline bool parse_double(std::string_view token, double& out) {
  const char* begin = token.data();
  const char* end = begin + token.size();
  const auto res = std::from_chars(begin, end, out);
  return res.ec == std::errc() && res.ptr == end;
}

// Headered text matrix format: first line "rows cols", then one line per row
// with 17-significant-digit entries. Writing then reading is bit-exact.

inline void write_matrix(std::ostream& out, const DenseMatrix& a) {
  out << a.rows() << ' ' << a.cols() << '\n';
  for (Index i = 0; i < a.rows(); ++i) {
    for (Index j = 0; j < a.cols(); ++j) {
      if (j > 0) out << ' ';
      out << format_double(a(i, j));
    }
    out << '\n';
  }
}

inline void write_matrix_file(const std::string& path, const DenseMatrix& a) {
  std::ofstream out(path);
  if (!out) throw io_error("matrix: cannot open " + path + " for writing");
  write_matrix(out, a);
  out.flush();
  if (!out) throw io_error("matrix: write failure on " + path);
}

inline DenseMatrix read_matrix(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw parse_error("matrix: missing header line", 1);
  long long rows = 0, cols = 0;
  {
    std::istringstream hs(line);
    std::string junk;
    if (!(hs >> rows >> cols) || (hs >> junk) || rows < 1 || cols < 1) {
      throw parse_error("matrix: header must be \"rows cols\" with positive counts", 1);
    }
  }
  DenseMatrix a(static_cast<Index>(rows), static_cast<Index>(cols));
  for (long long i = 0; i < rows; ++i) {
    const std::size_t lineno = std::size_t(i) + 2;
    if (!std::getline(in, line)) throw parse_error("matrix: missing row", lineno);
    std::size_t pos = 0;
    for (long long j = 0; j < cols; ++j) {
      while (pos < line.size() && (line[pos] == ' ' || line[pos] == '\t')) ++pos;
      std::size_t end = pos;
      while (end < line.size() && line[end] != ' ' && line[end] != '\t') ++end;
      double v = 0.0;
      if (end == pos || !parse_double(std::string_view(line).substr(pos, end - pos), v)) {
        throw parse_error("matrix: bad entry in row", lineno);
      }
      if (!std::isfinite(v)) throw parse_error("matrix: non-finite entry", lineno);
      a(Index(i), Index(j)) = v;
      pos = end;
    }
    while (pos < line.size() && (line[pos] == ' ' || line[pos] == '\t' || line[pos] == '\r')) ++pos;
    if (pos != line.size()) throw parse_error("matrix: trailing characters in row", lineno);
  }
  return a;
}

inline DenseMatrix read_matrix_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw io_error("matrix: cannot open " + path);
  return read_matrix(in);
}

// CSV matrix: comma-separated values, one row per line, no header.
inline DenseMatrix read_csv_matrix(std::istream& in) {
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<double> row;
    std::size_t pos = 0;
    while (pos <= line.size()) {
      std::size_t comma = line.find(',', pos);
      if (comma == std::string::npos) comma = line.size();
      double v = 0.0;
      if (!parse_double(std::string_view(line).substr(pos, comma - pos), v) ||
          !std::isfinite(v)) {
        throw parse_error("csv: bad entry", lineno);
      }
      row.push_back(v);
      pos = comma + 1;
      if (comma == line.size()) break;
    }
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw parse_error("csv: ragged row", lineno);
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw parse_error("csv: empty file", 1);
  DenseMatrix a(Index(rows.size()), Index(rows.front().size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < rows[i].size(); ++j) a(Index(i), Index(j)) = rows[i][j];
  }
  return a;
}

inline DenseMatrix read_csv_matrix_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw io_error("csv: cannot open " + path);
  return read_csv_matrix(in);
}

}  // namespace vcur
