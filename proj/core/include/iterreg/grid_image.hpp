#pragma once

#include <Eigen/Core>
#include <stdexcept>
#include <string>

namespace iterreg {

/// 2-D raster of pixel intensities on a width x height grid, stored
/// row-major (row 0 is the top of the image). Ingested data is finite and
/// nonnegative; intermediate iterates may hold arbitrary reals.
struct GridImage {
  int width = 0;
  int height = 0;
  Eigen::VectorXd values;

  GridImage() = default;

  GridImage(int w, int h) : width(w), height(h) {
    if (w <= 0 || h <= 0) {
      throw std::invalid_argument("GridImage: dimensions must be positive, got " +
                                  std::to_string(w) + "x" + std::to_string(h));
    }
    values = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(w) * h);
  }

  static GridImage from_values(int w, int h, Eigen::VectorXd v) {
    GridImage img(w, h);
    if (v.size() != img.values.size()) {
      throw std::invalid_argument("GridImage: values.size() != width*height");
    }
    img.values = std::move(v);
    return img;
  }

  int size() const { return width * height; }

  double& at(int row, int col) { return values[static_cast<Eigen::Index>(row) * width + col]; }
  double at(int row, int col) const { return values[static_cast<Eigen::Index>(row) * width + col]; }

  bool same_geometry(const GridImage& other) const {
    return width == other.width && height == other.height;
  }
};

inline double dot(const GridImage& a, const GridImage& b) { return a.values.dot(b.values); }
inline double norm(const GridImage& a) { return a.values.norm(); }

inline void require_same_geometry(const GridImage& a, const GridImage& b, const char* where) {
  if (!a.same_geometry(b)) {
    throw std::invalid_argument(std::string(where) + ": image geometry mismatch (" +
                                std::to_string(a.width) + "x" + std::to_string(a.height) + " vs " +
                                std::to_string(b.width) + "x" + std::to_string(b.height) + ")");
  }
}

}  // namespace iterreg
