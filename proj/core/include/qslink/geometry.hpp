#pragma once

#include <vector>

#include "qslink/config.hpp"

namespace qslink {

struct Vec2 {
    double x = 0;
    double y = 0;
};

// Target-plane CCR lattice, centered at the origin.
struct CcrArrayGeometry {
    std::vector<Vec2> positions; // row-major: i = (iy-1)*N_arx + ix, 0-based
    int nx = 0;
    int ny = 0;
};

// Scan-grid cell offsets relative to the grid center.
// Linear index is row-major with stride N_grx (bijective for any grid shape;
// coincides with the square-grid convention used throughout).
struct ScanGrid {
    std::vector<Vec2> offsets;
    int nx = 0;
    int ny = 0;
};

CcrArrayGeometry ccr_positions(const SystemConfig& cfg);
ScanGrid grid_offsets(const SystemConfig& cfg);

} // namespace qslink
