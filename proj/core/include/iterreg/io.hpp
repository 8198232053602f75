#pragma once

#include <string>

#include "iterreg/grid_image.hpp"

namespace iterreg {

/// Binary PGM (P5, 8-bit, row-major). Values are clamped to [0,1] and
/// quantized to bytes.
void write_pgm(const std::string& path, const GridImage& image);

/// Reads an 8-bit P5 file back into [0,1] values.
GridImage read_pgm(const std::string& path);

/// Shortest round-trip decimal form of a double, locale-independent; keeps
/// CSV output byte-stable across runs.
std::string format_double(double v);

}  // namespace iterreg
