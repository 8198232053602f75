#pragma once

#include <Eigen/Core>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace iterreg {

/// Projection data indexed by (angle, detector bin), angle-major.
/// Angles are radians in [0, pi), strictly increasing.
struct Sinogram {
  std::vector<double> angles;
  int bins = 0;
  Eigen::VectorXd values;

  Sinogram() = default;

  Sinogram(std::vector<double> angle_list, int bin_count)
      : angles(std::move(angle_list)), bins(bin_count) {
    validate_geometry();
    values = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(angles.size()) * bins);
  }

  static Sinogram from_values(std::vector<double> angle_list, int bin_count, Eigen::VectorXd v) {
    Sinogram s(std::move(angle_list), bin_count);
    if (v.size() != s.values.size()) {
      throw std::invalid_argument("Sinogram: values.size() != angles.size()*bins");
    }
    s.values = std::move(v);
    return s;
  }

  int num_angles() const { return static_cast<int>(angles.size()); }
  int size() const { return num_angles() * bins; }

  double& at(int angle_idx, int bin) {
    return values[static_cast<Eigen::Index>(angle_idx) * bins + bin];
  }
  double at(int angle_idx, int bin) const {
    return values[static_cast<Eigen::Index>(angle_idx) * bins + bin];
  }

  bool same_geometry(const Sinogram& other) const {
    return bins == other.bins && angles == other.angles;
  }

 private:
  void validate_geometry() const {
    if (angles.empty()) throw std::invalid_argument("Sinogram: angle list is empty");
    if (bins <= 0) throw std::invalid_argument("Sinogram: bins must be positive");
    const double pi = std::acos(-1.0);
    for (std::size_t i = 0; i < angles.size(); ++i) {
      if (!(angles[i] >= 0.0 && angles[i] < pi)) {
        throw std::invalid_argument("Sinogram: angle " + std::to_string(i) +
                                    " not in [0, pi): " + std::to_string(angles[i]));
      }
      if (i > 0 && !(angles[i] > angles[i - 1])) {
        throw std::invalid_argument("Sinogram: angles not strictly increasing at index " +
                                    std::to_string(i));
      }
    }
  }
};

inline double norm(const Sinogram& s) { return s.values.norm(); }

inline void require_same_geometry(const Sinogram& a, const Sinogram& b, const char* where) {
  if (!a.same_geometry(b)) {
    throw std::invalid_argument(std::string(where) + ": sinogram geometry mismatch");
  }
}

/// k equally spaced angles {0, pi/k, ..., (k-1)pi/k}.
inline std::vector<double> equispaced_angles(int count) {
  if (count <= 0) throw std::invalid_argument("equispaced_angles: count must be positive");
  const double pi = std::acos(-1.0);
  std::vector<double> a(count);
  for (int i = 0; i < count; ++i) a[i] = pi * i / count;
  return a;
}

}  // namespace iterreg
