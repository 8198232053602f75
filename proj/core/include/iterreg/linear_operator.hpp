#pragma once

#include <Eigen/Core>
#include <memory>
#include <stdexcept>
#include <vector>

#include "iterreg/grid_image.hpp"
#include "iterreg/sinogram.hpp"

namespace iterreg {

/// Linear forward map from images to projection data with an exact adjoint:
/// <apply(u), v> == <u, apply_adjoint(v)> up to floating-point rounding.
class LinearOperator {
 public:
  virtual ~LinearOperator() = default;

  virtual int domain_width() const = 0;
  virtual int domain_height() const = 0;
  virtual const std::vector<double>& angles() const = 0;
  virtual int bins() const = 0;

  virtual Sinogram apply(const GridImage& u) const = 0;
  virtual GridImage apply_adjoint(const Sinogram& s) const = 0;

  int domain_size() const { return domain_width() * domain_height(); }
  int range_size() const { return static_cast<int>(angles().size()) * bins(); }

  Sinogram zero_range() const { return Sinogram(angles(), bins()); }
  GridImage zero_domain() const { return GridImage(domain_width(), domain_height()); }

  bool same_geometry(const LinearOperator& other) const {
    return domain_width() == other.domain_width() && domain_height() == other.domain_height() &&
           bins() == other.bins() && angles() == other.angles();
  }

 protected:
  void check_domain(const GridImage& u, const char* where) const {
    if (u.width != domain_width() || u.height != domain_height()) {
      throw std::invalid_argument(std::string(where) + ": image geometry mismatch with operator domain");
    }
    if (!u.values.allFinite()) {
      throw std::invalid_argument(std::string(where) + ": image values contain non-finite entries");
    }
  }
  void check_range(const Sinogram& s, const char* where) const {
    if (s.bins != bins() || s.angles != angles()) {
      throw std::invalid_argument(std::string(where) + ": sinogram geometry mismatch with operator range");
    }
  }
};

/// Dense matrix realization of a LinearOperator; used for handcrafted
/// operators and small synthetic instances in tests.
class DenseOperator : public LinearOperator {
 public:
  DenseOperator(Eigen::MatrixXd matrix, int width, int height, std::vector<double> angle_list,
                int bin_count)
      : matrix_(std::move(matrix)),
        width_(width),
        height_(height),
        angles_(std::move(angle_list)),
        bins_(bin_count) {
    if (matrix_.cols() != static_cast<Eigen::Index>(width_) * height_) {
      throw std::invalid_argument("DenseOperator: matrix columns != width*height");
    }
    if (matrix_.rows() != static_cast<Eigen::Index>(angles_.size()) * bins_) {
      throw std::invalid_argument("DenseOperator: matrix rows != angles*bins");
    }
  }

  /// Convenience factory for an n x n map on an n x 1 image viewed through
  /// one angle with n bins (scalar/diagonal test instances).
  static DenseOperator square(Eigen::MatrixXd m) {
    const int n = static_cast<int>(m.cols());
    if (m.rows() != n) throw std::invalid_argument("DenseOperator::square: matrix not square");
    return DenseOperator(std::move(m), n, 1, {0.0}, n);
  }

  int domain_width() const override { return width_; }
  int domain_height() const override { return height_; }
  const std::vector<double>& angles() const override { return angles_; }
  int bins() const override { return bins_; }

  Sinogram apply(const GridImage& u) const override {
    check_domain(u, "DenseOperator::apply");
    return Sinogram::from_values(angles_, bins_, matrix_ * u.values);
  }

  GridImage apply_adjoint(const Sinogram& s) const override {
    check_range(s, "DenseOperator::apply_adjoint");
    return GridImage::from_values(width_, height_, matrix_.transpose() * s.values);
  }

  const Eigen::MatrixXd& matrix() const { return matrix_; }

 private:
  Eigen::MatrixXd matrix_;
  int width_;
  int height_;
  std::vector<double> angles_;
  int bins_;
};

/// s * inner, sharing the wrapped operator.
class ScaledOperator : public LinearOperator {
 public:
  ScaledOperator(std::shared_ptr<const LinearOperator> inner, double scale)
      : inner_(std::move(inner)), scale_(scale) {
    if (!inner_) throw std::invalid_argument("ScaledOperator: null inner operator");
  }

  int domain_width() const override { return inner_->domain_width(); }
  int domain_height() const override { return inner_->domain_height(); }
  const std::vector<double>& angles() const override { return inner_->angles(); }
  int bins() const override { return inner_->bins(); }

  Sinogram apply(const GridImage& u) const override {
    Sinogram s = inner_->apply(u);
    s.values *= scale_;
    return s;
  }

  GridImage apply_adjoint(const Sinogram& s) const override {
    GridImage u = inner_->apply_adjoint(s);
    u.values *= scale_;
    return u;
  }

  double scale() const { return scale_; }

 private:
  std::shared_ptr<const LinearOperator> inner_;
  double scale_;
};

/// Limited-data mode: keeps only the sinogram rows whose angle lies inside
/// [window_lo, window_hi) and zeroes the rest, on both apply and adjoint, so
/// masked angles contribute exactly zero to residuals.
class AngleWindowOperator : public LinearOperator {
 public:
  AngleWindowOperator(std::shared_ptr<const LinearOperator> inner, double window_lo,
                      double window_hi)
      : inner_(std::move(inner)) {
    if (!inner_) throw std::invalid_argument("AngleWindowOperator: null inner operator");
    if (!(window_lo < window_hi)) {
      throw std::invalid_argument("AngleWindowOperator: empty angle window");
    }
    keep_.resize(inner_->angles().size());
    int kept = 0;
    for (std::size_t i = 0; i < keep_.size(); ++i) {
      keep_[i] = inner_->angles()[i] >= window_lo && inner_->angles()[i] < window_hi;
      kept += keep_[i] ? 1 : 0;
    }
    if (kept == 0) throw std::invalid_argument("AngleWindowOperator: window retains no angles");
  }

  int domain_width() const override { return inner_->domain_width(); }
  int domain_height() const override { return inner_->domain_height(); }
  const std::vector<double>& angles() const override { return inner_->angles(); }
  int bins() const override { return inner_->bins(); }

  Sinogram apply(const GridImage& u) const override {
    Sinogram s = inner_->apply(u);
    mask(s);
    return s;
  }

  GridImage apply_adjoint(const Sinogram& s) const override {
    Sinogram masked = s;
    mask(masked);
    return inner_->apply_adjoint(masked);
  }

  void mask(Sinogram& s) const {
    for (std::size_t a = 0; a < keep_.size(); ++a) {
      if (!keep_[a]) {
        s.values.segment(static_cast<Eigen::Index>(a) * s.bins, s.bins).setZero();
      }
    }
  }

  const std::vector<bool>& kept_angles() const { return keep_; }

 private:
  std::shared_ptr<const LinearOperator> inner_;
  std::vector<bool> keep_;
};

}  // namespace iterreg
