#pragma once

#include <Eigen/Core>
#include <optional>
#include <vector>

#include "iterreg/grid_image.hpp"
#include "iterreg/linear_operator.hpp"
#include "iterreg/sinogram.hpp"

namespace iterreg {

struct PruneOutcome {
  int removed = 0;
  /// True when every active image failed the tolerance and the single
  /// closest one was retained to keep the set nonempty.
  bool guard_triggered = false;
};

/// Expert prior images u^(1..n), optionally paired with their sinograms,
/// plus an activity mask maintained by pruning. Aggregates (arithmetic and
/// geometric mean) are computed over the active images and refreshed on any
/// mask change.
class PriorSet {
 public:
  PriorSet() = default;
  explicit PriorSet(std::vector<GridImage> images,
                    std::optional<std::vector<Sinogram>> sinograms = std::nullopt);

  int total_count() const { return static_cast<int>(images_.size()); }
  int active_count() const;
  const std::vector<GridImage>& images() const { return images_; }
  const GridImage& image(int i) const { return images_.at(i); }
  bool has_sinograms() const { return sinograms_.has_value(); }
  const std::vector<Sinogram>& sinograms() const;
  const std::vector<bool>& active_mask() const { return active_; }
  bool is_active(int i) const { return active_.at(i); }
  std::vector<int> active_indices() const;

  /// Pixelwise arithmetic mean over active images.
  const GridImage& mean() const;
  /// Pixelwise geometric mean over active images; a zero anywhere forces a
  /// zero output pixel. Throws if any active image has a negative pixel.
  const GridImage& geometric_mean() const;

  friend PruneOutcome prune_priors(PriorSet& set, const GridImage& u_k, double tol);

 private:
  void refresh_aggregates();
  void deactivate(int i) { active_[i] = false; }

  std::vector<GridImage> images_;
  std::optional<std::vector<Sinogram>> sinograms_;
  std::vector<bool> active_;
  std::optional<GridImage> cached_mean_;
  mutable std::optional<GridImage> cached_gm_;
};

GridImage prior_mean(const PriorSet& set);
GridImage prior_geometric_mean(const PriorSet& set);

/// Deactivates every active image whose L2 distance to u_k is >= tol.
/// Never reactivates. Refreshes the cached aggregates.
PruneOutcome prune_priors(PriorSet& set, const GridImage& u_k, double tol);

/// Dense operator A = Y U^+ fitted on the prior pairs, where U and Y hold
/// the flattened images and sinograms columnwise and U^+ is the truncated-SVD
/// Moore-Penrose pseudoinverse.
class HandcraftedOperator : public LinearOperator {
 public:
  struct Provenance {
    int n_train = 0;
    int svd_rank = 0;
    double fit_residual = 0.0;  // ||A U - Y||_F / ||Y||_F, recorded not asserted
  };

  HandcraftedOperator(Eigen::MatrixXd a, int width, int height, std::vector<double> angle_list,
                      int bin_count, Provenance provenance);

  int domain_width() const override { return width_; }
  int domain_height() const override { return height_; }
  const std::vector<double>& angles() const override { return angles_; }
  int bins() const override { return bins_; }

  Sinogram apply(const GridImage& u) const override;
  GridImage apply_adjoint(const Sinogram& s) const override;

  const Eigen::MatrixXd& matrix() const { return a_; }
  const Provenance& provenance() const { return provenance_; }

 private:
  Eigen::MatrixXd a_;
  int width_;
  int height_;
  std::vector<double> angles_;
  int bins_;
  Provenance provenance_;
};

/// Singular values below rel_tol * sigma_max are truncated when forming U^+.
HandcraftedOperator build_handcrafted_operator(const PriorSet& set, double rel_tol = 1e-12);

}  // namespace iterreg
