#include "basins/image_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace basins {

namespace {

int label_for_color(Rgb c) {
  if (c == kBlackRgb) return kBlackLabel;
  for (std::size_t k = 0; k < kRootPalette.size(); ++k) {
    if (c == kRootPalette[k]) return static_cast<int>(k);
  }
  throw IoError("read_ppm_labels: color not in the root palette");
}

void append_g17(std::string& out, double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  out += buf;
}

}  // namespace

Rgb palette_color(int label) {
  if (label == kBlackLabel) return kBlackRgb;
  if (label >= 0 && label < static_cast<int>(kRootPalette.size())) {
    return kRootPalette[static_cast<std::size_t>(label)];
  }
  throw IoError("palette exhausted: more than 8 distinct roots");
}

std::string ppm_bytes(const BasinImage& image) {
  std::string out = "P6\n" + std::to_string(image.width()) + " " +
                    std::to_string(image.height()) + "\n255\n";
  out.reserve(out.size() + static_cast<std::size_t>(image.grid.pixel_count()) * 3);
  for (int iy = image.height() - 1; iy >= 0; --iy) {
    for (int ix = 0; ix < image.width(); ++ix) {
      const Rgb c = palette_color(image.label_at(ix, iy));
      out.push_back(static_cast<char>(c.r));
      out.push_back(static_cast<char>(c.g));
      out.push_back(static_cast<char>(c.b));
    }
  }
  return out;
}

void write_ppm(const BasinImage& image, const std::string& path) {
  const std::string bytes = ppm_bytes(image);
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("cannot open for writing: " + path);
  f.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!f) throw IoError("write failed: " + path);
}

BasinImage read_ppm_labels(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open: " + path);
  std::string magic;
  int w = 0, h = 0, maxval = 0;
  f >> magic >> w >> h >> maxval;
  if (magic != "P6" || maxval != 255 || w < 1 || h < 1) {
    throw IoError("not a P6/255 PPM: " + path);
  }
  f.get();  // the single whitespace byte after the header
  GridSpec grid;
  grid.nx = w;
  grid.ny = h;
  BasinImage img(grid);
  std::string data(static_cast<std::size_t>(w) * h * 3, '\0');
  f.read(data.data(), static_cast<std::streamsize>(data.size()));
  if (f.gcount() != static_cast<std::streamsize>(data.size())) {
    throw IoError("truncated PPM: " + path);
  }
  std::size_t pos = 0;
  for (int iy = h - 1; iy >= 0; --iy) {
    for (int ix = 0; ix < w; ++ix) {
      const Rgb c{static_cast<std::uint8_t>(data[pos]), static_cast<std::uint8_t>(data[pos + 1]),
                  static_cast<std::uint8_t>(data[pos + 2])};
      pos += 3;
      img.labels[static_cast<std::size_t>(grid.pixel_index(ix, iy))] = label_for_color(c);
    }
  }
  return img;
}

void write_csv(const BasinImage& image, const std::string& path) {
  std::string out = "ix,iy,x,y,label,iterations,terminal_re,terminal_im\n";
  for (int iy = 0; iy < image.height(); ++iy) {
    for (int ix = 0; ix < image.width(); ++ix) {
      const std::size_t i = static_cast<std::size_t>(image.grid.pixel_index(ix, iy));
      const Complex center = image.grid.pixel_center(ix, iy);
      out += std::to_string(ix);
      out += ',';
      out += std::to_string(iy);
      out += ',';
      append_g17(out, center.real());
      out += ',';
      append_g17(out, center.imag());
      out += ',';
      if (image.labels[i] == kBlackLabel) {
        out += "black";
      } else {
        out += "root" + std::to_string(image.labels[i]);
      }
      out += ',';
      out += std::to_string(image.iterations[i]);
      out += ',';
      append_g17(out, image.terminal[i].real());
      out += ',';
      append_g17(out, image.terminal[i].imag());
      out += '\n';
    }
  }
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("cannot open for writing: " + path);
  f.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!f) throw IoError("write failed: " + path);
}

}  // namespace basins
