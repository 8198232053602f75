#include "iterreg/io.hpp"

#include <algorithm>
#include <cmath>
#include <charconv>
#include <fstream>
#include <stdexcept>

namespace iterreg {

void write_pgm(const std::string& path, const GridImage& image) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("write_pgm: cannot open " + path);
  out << "P5\n" << image.width << " " << image.height << "\n255\n";
  for (Eigen::Index p = 0; p < image.values.size(); ++p) {
    const double v = std::clamp(image.values[p], 0.0, 1.0);
    out.put(static_cast<char>(static_cast<unsigned char>(std::lround(v * 255.0))));
  }
  if (!out) throw std::runtime_error("write_pgm: write failed for " + path);
}

GridImage read_pgm(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("read_pgm: cannot open " + path);
  std::string magic;
  in >> magic;
  if (magic != "P5") throw std::runtime_error("read_pgm: not a P5 file: " + path);
  int width = 0, height = 0, maxval = 0;
  in >> width >> height >> maxval;
  if (!in || width <= 0 || height <= 0 || maxval != 255) {
    throw std::runtime_error("read_pgm: unsupported header in " + path);
  }
  in.get();  // single whitespace after header
  GridImage img(width, height);
  for (Eigen::Index p = 0; p < img.values.size(); ++p) {
    const int byte = in.get();
    if (byte == EOF) throw std::runtime_error("read_pgm: truncated payload in " + path);
    img.values[p] = byte / 255.0;
  }
  return img;
}

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

}  // namespace iterreg
