#pragma once

#include <vector>

#include "basins/function.hpp"
#include "basins/grid.hpp"

namespace basins {

// Two nearest-site distances closer together than this classify as Boundary.
inline constexpr double kVoronoiTie = 1e-12;

struct SiteSet {
  std::vector<Complex> sites;  // distinct, first-occurrence order
};

// Sites of the reduced Voronoi diagram: the distinct roots of fn with
// multiplicities disregarded. Throws std::invalid_argument when fn carries no
// explicit root list.
SiteSet reduced_sites(const FunctionExpr& fn);

// Index of the strictly nearest site, or kBlackLabel for Boundary points.
int classify_point(const SiteSet& sites, Complex p);

// Per-pixel classification at the grid sample points. Boundary pixels get
// kBlackLabel; iterations are 0 and terminal is the sample point itself.
BasinImage render_voronoi(const SiteSet& sites, const GridSpec& grid);

}  // namespace basins
