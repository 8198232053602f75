#pragma once

#include <cstdint>
#include <limits>
#include <string>

#include "iterreg/grid_image.hpp"
#include "iterreg/linear_operator.hpp"
#include "iterreg/priors.hpp"

namespace iterreg {

/// c(rho) = rho * (1 - lambda_max + sqrt(1 + lambda_max(2 - lambda_max) L^2/kappa^2))
///              / (2 - lambda_max).
/// Radius of the invariance ball around the solution.
double compute_c_rho(double rho, double L, double kappa, double lambda_max);

/// E = 2 - L^2 - 2 eta - 2 lambda (1 - eta) - kappa^2. The convergence
/// hypotheses need E > 0; a nonpositive value is a valid return signaling
/// hypothesis failure.
double compute_E(double L, double eta, double lambda, double kappa);

/// tau_min = 2 (1 - lambda_max)(1 + eta) / E. Any tau > tau_min is an
/// admissible discrepancy parameter. Throws when E <= 0.
double compute_tau_min(double lambda_max, double eta, double E);

/// D = E - 2 (1 - lambda)(1 + eta) / tau; the residual-sum constant.
/// Callers check D > 0. Throws when tau <= 0.
double compute_D(double E, double lambda, double eta, double tau);

/// Convergence-analysis constants: (rho, L, eta, kappa, lambda_max, tau) in,
/// the derived quantities out. lambda-dependent expressions are evaluated at
/// lambda_max so each run has a single set of constants.
struct TheoryConstants {
  double rho = 1.0;
  double L = 1.0;
  double eta = 0.0;
  double kappa = 0.5;
  double lambda_max = 0.01;
  double tau = 1.1;

  double c_rho() const { return compute_c_rho(rho, L, kappa, lambda_max); }
  double E() const { return compute_E(L, eta, lambda_max, kappa); }
  double tau_min() const { return compute_tau_min(lambda_max, eta, E()); }
  double D() const { return compute_D(E(), lambda_max, eta, tau); }
  /// Residual threshold of the sufficient condition, 2(1-lambda_max)(1+eta)/E * delta.
  double sufficient_residual(double delta) const { return tau_min() * delta; }
};

/// Upper envelope of the residual-sum corollary:
/// rho^2 / D * [1 + 2 (1 + L^2/kappa^2) * Sum_{k<k_dagger} lambda_k].
/// Throws when D <= 0.
double residual_sum_bound(const TheoryConstants& constants, double lambda_partial_sum);

/// Diagnostic check of the convergence hypotheses for a concrete
/// configuration with known ground truth.
struct AssumptionReport {
  // Assumption: the solution lies in B_rho of the initial guess and of the
  // prior aggregates.
  bool truth_in_ball_u0 = false;
  double dist_u0 = 0.0;
  bool truth_near_mean = false;
  double dist_mean = 0.0;
  bool truth_near_gm = false;
  double dist_gm = 0.0;
  bool gm_defined = false;
  // Operator bounds.
  bool norm_bounded = false;
  double estimated_norm = 0.0;
  bool linear_eta_zero = false;
  double tangential_defect = 0.0;
  // Parameter ranges.
  bool lambda_max_ok = false;
  double lambda_max_value = 0.0;
  bool e_positive = false;
  double e_value = 0.0;
  bool tau_admissible = false;
  double tau_min_value = std::numeric_limits<double>::quiet_NaN();  // NaN when E <= 0

  bool all_ok() const {
    return truth_in_ball_u0 && truth_near_mean && norm_bounded && lambda_max_ok && e_positive &&
           tau_admissible;
  }
  std::string summary() const;
};

AssumptionReport check_assumptions(const PriorSet& priors, const GridImage& truth,
                                   const GridImage& u0, const TheoryConstants& constants,
                                   const LinearOperator& op, int norm_iterations = 100,
                                   std::uint64_t seed = 0x5eed);

}  // namespace iterreg
