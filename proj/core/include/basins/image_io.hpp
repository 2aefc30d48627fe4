#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>

#include "basins/grid.hpp"

namespace basins {

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Rgb {
  std::uint8_t r = 0, g = 0, b = 0;
  bool operator==(const Rgb&) const = default;
};

// Root index -> color. Supports at most 8 distinct roots; black is reserved
// for non-converging pixels.
inline constexpr std::array<Rgb, 8> kRootPalette = {{
    {0, 255, 0},      // green
    {255, 255, 0},    // yellow
    {0, 0, 255},      // blue
    {255, 0, 0},      // red
    {255, 192, 203},  // pink
    {0, 255, 255},    // cyan
    {255, 165, 0},    // orange
    {128, 0, 128},    // purple
}};

inline constexpr Rgb kBlackRgb{0, 0, 0};

// kBlackLabel -> black; 0..7 -> palette entry; anything else throws.
Rgb palette_color(int label);

// Binary PPM: "P6\n<w> <h>\n255\n" then RGB bytes, rows from the top of the
// grid (largest y) down.
void write_ppm(const BasinImage& image, const std::string& path);

// Serialized PPM bytes (what write_ppm puts on disk).
std::string ppm_bytes(const BasinImage& image);

// Reads a PPM written by write_ppm back into labels (iterations and
// terminals are zeroed; the grid keeps default bounds). Unknown colors throw.
BasinImage read_ppm_labels(const std::string& path);

// CSV with header ix,iy,x,y,label,iterations,terminal_re,terminal_im; one row
// per pixel, iy ascending then ix; floats carry 17 significant digits; label
// is "root<k>" or "black".
void write_csv(const BasinImage& image, const std::string& path);

}  // namespace basins
