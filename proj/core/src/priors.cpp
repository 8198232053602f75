#include "iterreg/priors.hpp"

#include <Eigen/SVD>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace iterreg {

PriorSet::PriorSet(std::vector<GridImage> images, std::optional<std::vector<Sinogram>> sinograms)
    : images_(std::move(images)), sinograms_(std::move(sinograms)) {
  if (images_.empty()) throw std::invalid_argument("PriorSet: no images");
  for (std::size_t i = 1; i < images_.size(); ++i) {
    require_same_geometry(images_[0], images_[i], "PriorSet");
  }
  if (sinograms_) {
    if (sinograms_->size() != images_.size()) {
      throw std::invalid_argument("PriorSet: sinogram count does not pair with image count");
    }
    for (std::size_t i = 1; i < sinograms_->size(); ++i) {
      require_same_geometry((*sinograms_)[0], (*sinograms_)[i], "PriorSet");
    }
  }
  active_.assign(images_.size(), true);
  refresh_aggregates();
}

int PriorSet::active_count() const {
  int n = 0;
  for (bool a : active_) n += a ? 1 : 0;
  return n;
}

const std::vector<Sinogram>& PriorSet::sinograms() const {
  if (!sinograms_) throw std::logic_error("PriorSet: sinograms not present");
  return *sinograms_;
}

std::vector<int> PriorSet::active_indices() const {
  std::vector<int> idx;
  idx.reserve(images_.size());
  for (std::size_t i = 0; i < active_.size(); ++i) {
    if (active_[i]) idx.push_back(static_cast<int>(i));
  }
  return idx;
}

const GridImage& PriorSet::mean() const {
  if (!cached_mean_) throw std::logic_error("PriorSet: empty set has no mean");
  return *cached_mean_;
}

const GridImage& PriorSet::geometric_mean() const {
  if (cached_gm_) return *cached_gm_;
  if (images_.empty()) throw std::logic_error("PriorSet: empty set has no geometric mean");
  const auto idx = active_indices();
  if (idx.empty()) throw std::logic_error("PriorSet: no active images");
  const int n = static_cast<int>(idx.size());
  GridImage gm(images_[0].width, images_[0].height);
  // exp(mean(log)) avoids underflow of the raw product for large n.
  for (Eigen::Index p = 0; p < gm.values.size(); ++p) {
    double log_sum = 0.0;
    bool zero = false;
    for (int i : idx) {
      const double v = images_[i].values[p];
      if (v < 0.0) {
        throw std::invalid_argument("prior_geometric_mean: negative pixel " + std::to_string(p) +
                                    " in prior " + std::to_string(i) + " (value " +
                                    std::to_string(v) + ")");
      }
      if (v == 0.0) {
        zero = true;
        break;
      }
      log_sum += std::log(v);
    }
    gm.values[p] = zero ? 0.0 : std::exp(log_sum / n);
  }
  cached_gm_ = std::move(gm);
  return *cached_gm_;
}

void PriorSet::refresh_aggregates() {
  const auto idx = active_indices();
  if (idx.empty()) {
    cached_mean_.reset();
    cached_gm_.reset();
    return;
  }
  GridImage mean(images_[0].width, images_[0].height);
  for (int i : idx) mean.values += images_[i].values;
  mean.values /= static_cast<double>(idx.size());
  cached_mean_ = std::move(mean);
  cached_gm_.reset();  // recomputed lazily on demand
}

GridImage prior_mean(const PriorSet& set) { return set.mean(); }

GridImage prior_geometric_mean(const PriorSet& set) { return set.geometric_mean(); }

PruneOutcome prune_priors(PriorSet& set, const GridImage& u_k, double tol) {
  if (!(tol > 0.0)) throw std::invalid_argument("prune_priors: tol must be positive");
  const auto idx = set.active_indices();
  if (idx.empty()) throw std::logic_error("prune_priors: no active images");
  require_same_geometry(set.image(idx[0]), u_k, "prune_priors");

  PruneOutcome outcome;
  int closest = idx[0];
  double closest_dist = std::numeric_limits<double>::infinity();
  int surviving = 0;
  std::vector<int> to_remove;
  for (int i : idx) {
    const double dist = (u_k.values - set.image(i).values).norm();
    if (dist < closest_dist) {
      closest_dist = dist;
      closest = i;
    }
    if (dist >= tol) {
      to_remove.push_back(i);
    } else {
      ++surviving;
    }
  }
  if (surviving == 0) {
    // Keep the nearest image so the damping term stays defined.
    outcome.guard_triggered = true;
    for (int i : to_remove) {
      if (i != closest) {
        set.deactivate(i);
        ++outcome.removed;
      }
    }
  } else {
    for (int i : to_remove) {
      set.deactivate(i);
      ++outcome.removed;
    }
  }
  if (outcome.removed > 0) set.refresh_aggregates();
  return outcome;
}

HandcraftedOperator::HandcraftedOperator(Eigen::MatrixXd a, int width, int height,
                                         std::vector<double> angle_list, int bin_count,
                                         Provenance provenance)
    : a_(std::move(a)),
      width_(width),
      height_(height),
      angles_(std::move(angle_list)),
      bins_(bin_count),
      provenance_(provenance) {
  if (a_.cols() != static_cast<Eigen::Index>(width_) * height_ ||
      a_.rows() != static_cast<Eigen::Index>(angles_.size()) * bins_) {
    throw std::invalid_argument("HandcraftedOperator: matrix shape does not match geometry");
  }
}

Sinogram HandcraftedOperator::apply(const GridImage& u) const {
  check_domain(u, "HandcraftedOperator::apply");
  return Sinogram::from_values(angles_, bins_, a_ * u.values);
}

GridImage HandcraftedOperator::apply_adjoint(const Sinogram& s) const {
  check_range(s, "HandcraftedOperator::apply_adjoint");
  return GridImage::from_values(width_, height_, a_.transpose() * s.values);
}

HandcraftedOperator build_handcrafted_operator(const PriorSet& set, double rel_tol) {
  if (!set.has_sinograms()) {
    throw std::invalid_argument("build_handcrafted_operator: prior set has no sinograms");
  }
  const auto idx = set.active_indices();
  if (idx.empty()) throw std::invalid_argument("build_handcrafted_operator: no active priors");

  const GridImage& u0 = set.image(idx[0]);
  const Sinogram& y0 = set.sinograms()[idx[0]];
  const Eigen::Index big_n = u0.values.size();
  const Eigen::Index big_m = y0.values.size();
  const int n = static_cast<int>(idx.size());

  Eigen::MatrixXd u_mat(big_n, n);
  Eigen::MatrixXd y_mat(big_m, n);
  for (int j = 0; j < n; ++j) {
    u_mat.col(j) = set.image(idx[j]).values;
    y_mat.col(j) = set.sinograms()[idx[j]].values;
  }

  Eigen::BDCSVD<Eigen::MatrixXd> svd(u_mat, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::VectorXd& sigma = svd.singularValues();
  if (sigma.size() == 0 || sigma(0) <= 0.0) {
    throw std::invalid_argument("build_handcrafted_operator: prior matrix U has rank 0");
  }
  const double cutoff = rel_tol * sigma(0);
  int rank = 0;
  for (Eigen::Index i = 0; i < sigma.size(); ++i) {
    if (sigma(i) > cutoff) ++rank;
  }
  if (rank == 0) throw std::invalid_argument("build_handcrafted_operator: prior matrix U has rank 0");

  // U^+ = V S^-1 U_thin^T with truncated singular values.
  Eigen::MatrixXd pinv = svd.matrixV().leftCols(rank) *
                         sigma.head(rank).cwiseInverse().asDiagonal() *
                         svd.matrixU().leftCols(rank).transpose();
  Eigen::MatrixXd a = y_mat * pinv;

  HandcraftedOperator::Provenance prov;
  prov.n_train = n;
  prov.svd_rank = rank;
  prov.fit_residual = (a * u_mat - y_mat).norm() / y_mat.norm();

  return HandcraftedOperator(std::move(a), u0.width, u0.height, y0.angles, y0.bins, prov);
}

}  // namespace iterreg
