#include "iterreg/radon.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace iterreg {

namespace {

// Crossing parameters of the ray p(t) = p0 + t*d with the grid lines of one
// axis, restricted to (tlo, thi). Grid lines sit at integer offsets from -half.
void axis_crossings(double p0, double d, double half, double tlo, double thi,
                    std::vector<double>& out) {
  if (std::abs(d) < 1e-14) return;
  // Solve p0 + t*d = -half + j for j = 0..2*half.
  const int count = static_cast<int>(std::lround(2.0 * half));
  for (int j = 0; j <= count; ++j) {
    const double t = (-half + j - p0) / d;
    if (t > tlo && t < thi) out.push_back(t);
  }
}

// Entry/exit parameters of the ray against the slab [-half, half] on one
// axis. Returns false if the ray misses the slab entirely.
bool clip_slab(double p0, double d, double half, double& tlo, double& thi) {
  if (std::abs(d) < 1e-14) {
    return p0 >= -half && p0 <= half;
  }
  double t0 = (-half - p0) / d;
  double t1 = (half - p0) / d;
  if (t0 > t1) std::swap(t0, t1);
  tlo = std::max(tlo, t0);
  thi = std::min(thi, t1);
  return tlo < thi;
}

}  // namespace

int RadonTransform::default_bin_count(int width, int height) {
  return static_cast<int>(std::ceil(std::sqrt(2.0) * std::max(width, height)));
}

RadonTransform::RadonTransform(int width, int height, std::vector<double> angle_list,
                               int bin_count)
    : width_(width), height_(height), angles_(std::move(angle_list)), bins_(bin_count) {
  if (width_ <= 0 || height_ <= 0) {
    throw std::invalid_argument("RadonTransform: image dimensions must be positive");
  }
  if (angles_.empty()) {
    throw std::invalid_argument("RadonTransform: angle list is empty");
  }
  const double pi = std::acos(-1.0);
  for (double a : angles_) {
    if (!(a >= 0.0 && a < pi)) {
      throw std::invalid_argument("RadonTransform: angle out of [0, pi): " + std::to_string(a));
    }
  }
  for (std::size_t i = 1; i < angles_.size(); ++i) {
    if (!(angles_[i] > angles_[i - 1])) {
      throw std::invalid_argument("RadonTransform: angles must be strictly increasing");
    }
  }
  if (bins_ == kAutoBins) bins_ = default_bin_count(width_, height_);
  if (bins_ <= 0) throw std::invalid_argument("RadonTransform: bins must be positive");

  const double half_w = width_ / 2.0;
  const double half_h = height_ / 2.0;
  const int num_angles = static_cast<int>(angles_.size());

  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(static_cast<std::size_t>(num_angles) * bins_ * (width_ + height_) / 2);

  std::vector<double> ts;
  ts.reserve(width_ + height_ + 4);

  for (int a = 0; a < num_angles; ++a) {
    const double theta = angles_[a];
    const double cos_t = std::cos(theta);
    const double sin_t = std::sin(theta);
    // Ray direction is perpendicular to the detector axis (cos, sin).
    const double dx = -sin_t;
    const double dy = cos_t;
    for (int b = 0; b < bins_; ++b) {
      const double s = (b - (bins_ - 1) / 2.0);
      const double px = s * cos_t;
      const double py = s * sin_t;

      double tlo = -std::numeric_limits<double>::infinity();
      double thi = std::numeric_limits<double>::infinity();
      if (!clip_slab(px, dx, half_w, tlo, thi)) continue;
      if (!clip_slab(py, dy, half_h, tlo, thi)) continue;
      if (!(thi - tlo > 1e-12)) continue;

      ts.clear();
      ts.push_back(tlo);
      ts.push_back(thi);
      axis_crossings(px, dx, half_w, tlo, thi, ts);
      axis_crossings(py, dy, half_h, tlo, thi, ts);
      std::sort(ts.begin(), ts.end());

      const int row = a * bins_ + b;
      for (std::size_t i = 0; i + 1 < ts.size(); ++i) {
        const double len = ts[i + 1] - ts[i];
        if (len <= 1e-12) continue;
        const double tm = 0.5 * (ts[i] + ts[i + 1]);
        const double mx = px + tm * dx;
        const double my = py + tm * dy;
        const int col = static_cast<int>(std::floor(mx + half_w));
        const int row_px = static_cast<int>(std::floor(half_h - my));
        if (col < 0 || col >= width_ || row_px < 0 || row_px >= height_) continue;
        triplets.emplace_back(row, row_px * width_ + col, len);
      }
    }
  }

  matrix_.resize(static_cast<Eigen::Index>(num_angles) * bins_,
                 static_cast<Eigen::Index>(width_) * height_);
  matrix_.setFromTriplets(triplets.begin(), triplets.end());
  matrix_.makeCompressed();
}

Sinogram RadonTransform::apply(const GridImage& u) const {
  check_domain(u, "radon_forward");
  return Sinogram::from_values(angles_, bins_, matrix_ * u.values);
}

GridImage RadonTransform::apply_adjoint(const Sinogram& s) const {
  check_range(s, "radon_adjoint");
  return GridImage::from_values(width_, height_, matrix_.transpose() * s.values);
}

Sinogram radon_forward(const GridImage& image, const std::vector<double>& angle_list,
                       int bin_count) {
  RadonTransform op(image.width, image.height, angle_list, bin_count);
  return op.apply(image);
}

GridImage radon_adjoint(const Sinogram& sino, int width, int height) {
  RadonTransform op(width, height, sino.angles, sino.bins);
  return op.apply_adjoint(sino);
}

}  // namespace iterreg
