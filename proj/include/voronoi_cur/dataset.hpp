#pragma once

#include <string>

#include "voronoi_cur/idx_io.hpp"
#include "voronoi_cur/matrix_io.hpp"
#include "voronoi_cur/snn.hpp"

namespace vcur {

// A dataset is either generated (SNN) or loaded from a file; the orientation
// flag decides whether samples end up as columns (the selection targets).
struct DatasetHandle {
  enum class Source { snn, idx_file, csv_file, text_file };

  Source source = Source::text_file;
  std::string path;
  SnnConfig snn;
  bool samples_as_columns = true;

  DenseMatrix materialize() const {
    switch (source) {
      case Source::snn: return gen_snn(snn);
      case Source::idx_file: return read_idx(path, samples_as_columns);
      case Source::csv_file: return read_csv_matrix_file(path);
      case Source::text_file: return read_matrix_file(path);
    }
    throw parameter_error("dataset: unknown source");
  }
};

inline bool ends_with(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

// Dispatch on extension: .idx / *-ubyte files are IDX, .csv is CSV, anything
// else is the headered text format.
inline DatasetHandle dataset_from_path(const std::string& path, bool samples_as_columns = true) {
  DatasetHandle h;
  h.path = path;
  h.samples_as_columns = samples_as_columns;
  if (ends_with(path, ".idx") || ends_with(path, "-ubyte") || ends_with(path, ".ubyte")) {
    h.source = DatasetHandle::Source::idx_file;
  } else if (ends_with(path, ".csv")) {
    h.source = DatasetHandle::Source::csv_file;
  } else {
    h.source = DatasetHandle::Source::text_file;
  }
  return h;
}

}  // namespace vcur
