#include "qslink/geometry.hpp"

namespace qslink {

namespace {

// Lattice coordinate of 1-based index i out of n: (i - (n+1)/2) * pitch.
// Symmetric about zero, so the lattice centroid is exactly the origin.
double lattice_coord(int i, int n, double pitch) {
    return (i - 0.5 * (n + 1)) * pitch;
}

} // namespace

CcrArrayGeometry ccr_positions(const SystemConfig& cfg) {
    CcrArrayGeometry g;
    g.nx = cfg.N_arx;
    g.ny = cfg.N_ary;
    g.positions.reserve(static_cast<size_t>(g.nx) * g.ny);
    for (int iy = 1; iy <= g.ny; ++iy)
        for (int ix = 1; ix <= g.nx; ++ix)
            g.positions.push_back({lattice_coord(ix, g.nx, cfg.d_ar),
                                   lattice_coord(iy, g.ny, cfg.d_ar)});
    return g;
}

ScanGrid grid_offsets(const SystemConfig& cfg) {
    ScanGrid g;
    g.nx = cfg.N_grx;
    g.ny = cfg.N_gry;
    g.offsets.reserve(static_cast<size_t>(g.nx) * g.ny);
    for (int jy = 1; jy <= g.ny; ++jy)
        for (int jx = 1; jx <= g.nx; ++jx)
            g.offsets.push_back({lattice_coord(jx, g.nx, cfg.d_gr),
                                 lattice_coord(jy, g.ny, cfg.d_gr)});
    return g;
}

} // namespace qslink
