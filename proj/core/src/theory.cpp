#include "iterreg/theory.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "iterreg/operator_utils.hpp"
#include "iterreg/rng.hpp"

namespace iterreg {

double compute_c_rho(double rho, double L, double kappa, double lambda_max) {
  if (!(rho > 0.0)) throw std::invalid_argument("compute_c_rho: rho must be positive");
  if (!(L > 0.0)) throw std::invalid_argument("compute_c_rho: L must be positive");
  if (!(kappa > 0.0 && kappa <= 1.0)) {
    throw std::invalid_argument("compute_c_rho: kappa must lie in (0,1]");
  }
  if (!(lambda_max > 0.0 && lambda_max < 1.0)) {
    throw std::invalid_argument("compute_c_rho: lambda_max must lie in (0,1)");
  }
  const double ratio = (L * L) / (kappa * kappa);
  return rho * (1.0 - lambda_max + std::sqrt(1.0 + lambda_max * (2.0 - lambda_max) * ratio)) /
         (2.0 - lambda_max);
}

double compute_E(double L, double eta, double lambda, double kappa) {
  return 2.0 - L * L - 2.0 * eta - 2.0 * lambda * (1.0 - eta) - kappa * kappa;
}

double compute_tau_min(double lambda_max, double eta, double E) {
  if (!(E > 0.0)) {
    throw std::invalid_argument("compute_tau_min: hypotheses of the lemma violated (E <= 0)");
  }
  return 2.0 * (1.0 - lambda_max) * (1.0 + eta) / E;
}

double compute_D(double E, double lambda, double eta, double tau) {
  if (!(tau > 0.0)) throw std::invalid_argument("compute_D: tau must be positive");
  return E - 2.0 * (1.0 - lambda) * (1.0 + eta) / tau;
}

double residual_sum_bound(const TheoryConstants& constants, double lambda_partial_sum) {
  const double d = constants.D();
  if (!(d > 0.0)) {
    throw std::invalid_argument("residual_sum_bound: D must be positive, got " +
                                std::to_string(d));
  }
  const double ratio = (constants.L * constants.L) / (constants.kappa * constants.kappa);
  return constants.rho * constants.rho / d * (1.0 + 2.0 * (1.0 + ratio) * lambda_partial_sum);
}

std::string AssumptionReport::summary() const {
  std::ostringstream os;
  auto line = [&os](const char* name, bool ok, double value) {
    os << (ok ? "  [ok]   " : "  [FAIL] ") << name << " (" << value << ")\n";
  };
  line("truth in B_rho(u0)", truth_in_ball_u0, dist_u0);
  line("truth within rho of prior mean", truth_near_mean, dist_mean);
  if (gm_defined) line("truth within rho of geometric mean", truth_near_gm, dist_gm);
  line("estimated operator norm <= L", norm_bounded, estimated_norm);
  line("tangential cone defect zero (linear)", linear_eta_zero, tangential_defect);
  line("lambda_max in (0,1)", lambda_max_ok, lambda_max_value);
  line("E > 0", e_positive, e_value);
  line("tau > tau_min", tau_admissible, tau_min_value);
  return os.str();
}

AssumptionReport check_assumptions(const PriorSet& priors, const GridImage& truth,
                                   const GridImage& u0, const TheoryConstants& constants,
                                   const LinearOperator& op, int norm_iterations,
                                   std::uint64_t seed) {
  require_same_geometry(truth, u0, "check_assumptions");
  AssumptionReport report;

  report.dist_u0 = (truth.values - u0.values).norm();
  report.truth_in_ball_u0 = report.dist_u0 < constants.rho;

  report.dist_mean = (truth.values - priors.mean().values).norm();
  report.truth_near_mean = report.dist_mean < constants.rho;

  try {
    report.dist_gm = (truth.values - priors.geometric_mean().values).norm();
    report.gm_defined = true;
    report.truth_near_gm = report.dist_gm < constants.rho;
  } catch (const std::exception&) {
    report.gm_defined = false;
  }

  report.estimated_norm = estimate_operator_norm(op, norm_iterations, seed).value;
  report.norm_bounded = report.estimated_norm <= constants.L;

  // For a linear operator F(u) - F(v) - F'(u)(u - v) vanishes identically;
  // spot-check the defect on random pairs.
  {
    Rng rng(seed ^ 0x9e3779b97f4a7c15ULL);
    double worst = 0.0;
    for (int trial = 0; trial < 5; ++trial) {
      GridImage a = op.zero_domain();
      GridImage b = op.zero_domain();
      for (Eigen::Index i = 0; i < a.values.size(); ++i) {
        a.values[i] = rng.gaussian();
        b.values[i] = rng.gaussian();
      }
      Sinogram fa = op.apply(a);
      Sinogram fb = op.apply(b);
      GridImage diff = a;
      diff.values -= b.values;
      Sinogram fdiff = op.apply(diff);
      const double defect =
          (fa.values - fb.values - fdiff.values).norm() /
          std::max(1e-300, (fa.values - fb.values).norm());
      worst = std::max(worst, defect);
    }
    report.tangential_defect = worst;
    report.linear_eta_zero = worst <= 1e-10;
  }

  report.lambda_max_ok = constants.lambda_max > 0.0 && constants.lambda_max < 1.0;
  report.lambda_max_value = constants.lambda_max;
  report.e_value = constants.E();
  report.e_positive = report.e_value > 0.0;
  if (report.e_positive) {
    report.tau_min_value = constants.tau_min();
    report.tau_admissible = constants.tau > report.tau_min_value;
  }
  return report;
}

}  // namespace iterreg
