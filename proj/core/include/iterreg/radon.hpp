#pragma once

#include <Eigen/SparseCore>
#include <vector>

#include "iterreg/linear_operator.hpp"

namespace iterreg {

/// Bin-count sentinel selecting default_bin_count for the geometry.
inline constexpr int kAutoBins = -1;

/// Discrete Radon transform with exact per-pixel intersection lengths.
///
/// Geometry: pixels are unit squares; the image is centered on the origin,
/// so pixel (row r, col c) spans x in [c - W/2, c+1 - W/2] and
/// y in [H/2 - (r+1), H/2 - r] (row 0 on top). For an angle theta the ray
/// with detector offset s runs along direction (-sin theta, cos theta)
/// through the point s*(cos theta, sin theta); theta = 0 projects columns.
/// The detector has `bins` unit-width bins centered on the origin.
///
/// The adjoint is the literal transpose of the assembled sparse matrix, so
/// the pairing <Ru, v> = <u, R*v> holds to rounding.
///
/// Construction is single-threaded; a built instance is immutable and safe
/// to share across threads for concurrent applies.
class RadonTransform : public LinearOperator {
 public:
  RadonTransform(int width, int height, std::vector<double> angle_list, int bin_count = kAutoBins);

  /// ceil(sqrt(2) * max(w, h)): covers the image diagonal at every angle.
  static int default_bin_count(int width, int height);

  int domain_width() const override { return width_; }
  int domain_height() const override { return height_; }
  const std::vector<double>& angles() const override { return angles_; }
  int bins() const override { return bins_; }

  Sinogram apply(const GridImage& u) const override;
  GridImage apply_adjoint(const Sinogram& s) const override;

  const Eigen::SparseMatrix<double, Eigen::RowMajor>& matrix() const { return matrix_; }

 private:
  int width_;
  int height_;
  std::vector<double> angles_;
  int bins_;
  Eigen::SparseMatrix<double, Eigen::RowMajor> matrix_;
};

/// One-call forward projection: builds the operator for this geometry and
/// applies it.
Sinogram radon_forward(const GridImage& image, const std::vector<double>& angle_list,
                       int bin_count = kAutoBins);

/// One-call backprojection (exact transpose of radon_forward on the same
/// geometry).
GridImage radon_adjoint(const Sinogram& sino, int width, int height);

}  // namespace iterreg
