#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "iterreg/grid_image.hpp"
#include "iterreg/sinogram.hpp"

namespace iterreg {

/// Prior candidates (train) and reconstruction targets (validation),
/// disjoint by construction. Labels identify the digit-like class.
struct Dataset {
  std::vector<GridImage> train;
  std::vector<int> train_labels;
  std::vector<GridImage> validation;
  std::vector<int> validation_labels;
  std::string source;
};

// --- IDX (MNIST container) --------------------------------------------------
//
// Big-endian: 4-byte magic (0x00000803 images, 0x00000801 labels), one
// 4-byte size per dimension, then unsigned-byte payload. Image pixels are
// rescaled to [0,1] by division by 255.

inline constexpr std::uint32_t kIdxImagesMagic = 0x00000803u;
inline constexpr std::uint32_t kIdxLabelsMagic = 0x00000801u;

std::vector<GridImage> read_idx_images(const std::string& path);
std::vector<int> read_idx_labels(const std::string& path);
void write_idx_images(const std::string& path, const std::vector<GridImage>& images);
void write_idx_labels(const std::string& path, const std::vector<int>& labels);

// --- Synthetic digit-like phantoms ------------------------------------------

/// Stroke-template phantoms with per-image affine jitter; a deterministic
/// stand-in for handwritten-digit data with known ground truth.
struct PhantomSpec {
  int width = 28;
  int height = 28;
  int classes = 10;              // template classes, cycled from class 0
  int train_per_class = 15;
  int validation_per_class = 2;
  double stroke_width = 2.2;     // pixels
  double jitter_shift = 0.02;    // fraction of the grid size
  double jitter_rotate = 0.06;   // radians
  double jitter_scale = 0.04;    // relative
};

Dataset generate_phantoms(const PhantomSpec& spec, std::uint64_t seed);

// --- Noise -------------------------------------------------------------------

struct NoiseSpec {
  double sigma2 = 0.0;     // Gaussian variance
  std::uint64_t seed = 0;
};

struct NoisyData {
  Sinogram sinogram;
  double delta = 0.0;  // measured ||y_delta - y||, exact by construction
};

/// Adds i.i.d. N(0, sigma2) samples and returns the measured noise norm.
NoisyData add_noise(const Sinogram& y, const NoiseSpec& spec);

/// ||truth - rec||_2 / ||truth||_2 (the unsquared ratio of the result
/// tables). Throws on zero truth or geometry mismatch.
double relative_error(const GridImage& truth, const GridImage& rec);

}  // namespace iterreg
