#include "basins/voronoi.hpp"

#include <limits>
#include <stdexcept>

namespace basins {

SiteSet reduced_sites(const FunctionExpr& fn) {
  SiteSet s{distinct_roots(fn)};
  if (s.sites.empty()) {
    throw std::invalid_argument("reduced_sites: function has no explicit root list");
  }
  return s;
}

int classify_point(const SiteSet& sites, Complex p) {
  double best = std::numeric_limits<double>::infinity();
  double second = std::numeric_limits<double>::infinity();
  int best_idx = kBlackLabel;
  for (std::size_t i = 0; i < sites.sites.size(); ++i) {
    const double d = std::abs(p - sites.sites[i]);
    if (d < best) {
      second = best;
      best = d;
      best_idx = static_cast<int>(i);
    } else if (d < second) {
      second = d;
    }
  }
  if (second - best < kVoronoiTie) return kBlackLabel;
  return best_idx;
}

BasinImage render_voronoi(const SiteSet& sites, const GridSpec& grid) {
  grid.validate();
  BasinImage img(grid);
  for (int iy = 0; iy < grid.ny; ++iy) {
    for (int ix = 0; ix < grid.nx; ++ix) {
      const std::size_t i = static_cast<std::size_t>(grid.pixel_index(ix, iy));
      const Complex p = grid.pixel_center(ix, iy);
      img.labels[i] = classify_point(sites, p);
      img.terminal[i] = p;
    }
  }
  return img;
}

}  // namespace basins
