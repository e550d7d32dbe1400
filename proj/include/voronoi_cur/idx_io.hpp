#pragma once

#include <cstddef>
#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

#include "voronoi_cur/common.hpp"

namespace vcur {

// IDX tensor files (the MNIST container): big-endian, two zero magic bytes,
// a type code, a dimension-count byte, one 32-bit size per dimension, then
// the payload. Only the unsigned-byte type code (0x08) is supported; values
// are scaled to [0,1] by 1/255. Trailing dimensions are flattened, so an
// s x h x w tensor loads as s rows by h*w columns; with samples_as_columns
// the result is transposed so the samples are selection targets.
inline DenseMatrix parse_idx(const unsigned char* data, std::size_t size,
                             bool samples_as_columns = true) {
  auto fail = [](const std::string& what, std::size_t offset) -> DenseMatrix {
    throw parse_error(what, offset);
  };
  if (size < 4) return fail("idx: truncated header", size);
  if (data[0] != 0x00) return fail("idx: bad magic byte", 0);
  if (data[1] != 0x00) return fail("idx: bad magic byte", 1);
  if (data[2] != 0x08) {
    return fail("idx: unsupported type code " + std::to_string(int(data[2])), 2);
  }
  const std::size_t ndims = data[3];
  if (ndims < 1) return fail("idx: zero dimensions", 3);
  const std::size_t header = 4 + 4 * ndims;
  if (size < header) return fail("idx: truncated dimension list", size);

  std::vector<std::size_t> dims(ndims);
  std::size_t total = 1;
  for (std::size_t d = 0; d < ndims; ++d) {
    const std::size_t off = 4 + 4 * d;
    const std::size_t v = (std::size_t(data[off]) << 24) | (std::size_t(data[off + 1]) << 16) |
                          (std::size_t(data[off + 2]) << 8) | std::size_t(data[off + 3]);
    if (v == 0) return fail("idx: zero-sized dimension", off);
    if (total > SIZE_MAX / v) return fail("idx: dimension product overflows", off);
    dims[d] = v;
    total *= v;
  }
  if (size < header + total) return fail("idx: truncated payload", size);
  if (size > header + total) return fail("idx: trailing bytes after payload", header + total);

  const std::size_t samples = dims[0];
  const std::size_t features = total / samples;
  const unsigned char* payload = data + header;
  // payload is row-major over (samples, features)
  DenseMatrix out(static_cast<Index>(samples), static_cast<Index>(features));
  for (std::size_t s = 0; s < samples; ++s) {
    for (std::size_t f = 0; f < features; ++f) {
      out(Index(s), Index(f)) = double(payload[s * features + f]) / 255.0;
    }
  }
  if (samples_as_columns) return out.transpose();
  return out;
}

inline DenseMatrix read_idx(const std::string& path, bool samples_as_columns = true) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw io_error("idx: cannot open " + path);
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                   std::istreambuf_iterator<char>());
  if (in.bad()) throw io_error("idx: read failure on " + path);
  return parse_idx(bytes.data(), bytes.size(), samples_as_columns);
}

}  // namespace vcur
