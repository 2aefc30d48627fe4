#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "basins/function.hpp"
#include "basins/linalg2.hpp"
#include "basins/rng.hpp"

namespace basins {

inline constexpr int kBlackLabel = -1;

// Pixel lattice over [x_min, x_max] x [y_min, y_max]. Pixel (0, 0) sits at the
// lower-left corner; sample points are cell centers shifted by a common
// jitter so that no sample point needs to coincide with a root or boundary.
struct GridSpec {
  double x_min = -10.0, x_max = 10.0;
  double y_min = -10.0, y_max = 10.0;
  int nx = 240, ny = 240;
  Vec2 center_jitter{0.0, 0.0};

  double dx() const { return (x_max - x_min) / nx; }
  double dy() const { return (y_max - y_min) / ny; }

  Complex pixel_center(int ix, int iy) const {
    return {x_min + (ix + 0.5) * dx() + center_jitter.x,
            y_min + (iy + 0.5) * dy() + center_jitter.y};
  }

  std::int64_t pixel_index(int ix, int iy) const {
    return static_cast<std::int64_t>(iy) * nx + ix;
  }

  std::int64_t pixel_count() const { return static_cast<std::int64_t>(nx) * ny; }

  void validate() const {
    if (nx < 1 || ny < 1) throw std::invalid_argument("grid resolution must be >= 1");
    if (!(x_max > x_min && y_max > y_min)) throw std::invalid_argument("empty grid bounds");
  }
};

// Draws the center jitter from the seed: uniform in +/- half a pixel pitch
// per axis. Call once before a sweep; the draw is independent of the engine.
inline GridSpec with_seed_jitter(GridSpec grid, std::uint64_t seed) {
  grid.validate();
  RandomStream stream = RandomStream::for_pixel(seed, RandomStream::Domain::Jitter, 0);
  grid.center_jitter.x = (stream.uniform() - 0.5) * grid.dx();
  grid.center_jitter.y = (stream.uniform() - 0.5) * grid.dy();
  return grid;
}

// Per-pixel sweep output. labels[i] is a root index or kBlackLabel;
// iterations[i] counts method steps (or accepted flow steps); terminal[i] is
// the final iterate.
struct BasinImage {
  GridSpec grid;
  std::vector<int> labels;
  std::vector<int> iterations;
  std::vector<Complex> terminal;

  explicit BasinImage(GridSpec g = {})
      : grid(g),
        labels(static_cast<std::size_t>(g.pixel_count()), kBlackLabel),
        iterations(static_cast<std::size_t>(g.pixel_count()), 0),
        terminal(static_cast<std::size_t>(g.pixel_count())) {}

  int width() const { return grid.nx; }
  int height() const { return grid.ny; }

  int label_at(int ix, int iy) const { return labels[static_cast<std::size_t>(grid.pixel_index(ix, iy))]; }
};

}  // namespace basins
