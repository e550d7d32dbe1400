#pragma once

#include "voronoi_cur/common.hpp"
#include "voronoi_cur/cssp.hpp"
#include "voronoi_cur/dataset.hpp"
#include "voronoi_cur/deim.hpp"
#include "voronoi_cur/harness.hpp"
#include "voronoi_cur/idx_io.hpp"
#include "voronoi_cur/matrix_io.hpp"
#include "voronoi_cur/numerics.hpp"
#include "voronoi_cur/partitioning.hpp"
#include "voronoi_cur/rng.hpp"
#include "voronoi_cur/sketch.hpp"
#include "voronoi_cur/snn.hpp"
