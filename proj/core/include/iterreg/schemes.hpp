#pragma once

#include <optional>
#include <string>
#include <vector>

#include "iterreg/grid_image.hpp"
#include "iterreg/linear_operator.hpp"
#include "iterreg/priors.hpp"
#include "iterreg/sinogram.hpp"

namespace iterreg {

/// The seven iteration schemes under comparison.
enum class SchemeKind {
  kLandweber,
  kIrli,
  kIrliRevised,
  kGirli,
  kGirliAdapt,
  kGirliGm,
  kDdirli,
};

std::string to_string(SchemeKind kind);
SchemeKind scheme_kind_from_string(const std::string& name);

/// Damping factor sequence; every lambda_k must satisfy
/// 0 < lambda_k <= lambda_max < 1. A geometric sequence with ratio in (0,1)
/// has a finite sum, which the exact-data convergence theorem requires; a
/// constant sequence does not, and `summable()` records the regime.
struct LambdaSequence {
  enum class Kind { kConstant, kGeometric };

  Kind kind = Kind::kConstant;
  double lambda0 = 0.0;
  double ratio = 1.0;

  static LambdaSequence constant(double lambda0);
  static LambdaSequence geometric(double lambda0, double ratio);

  bool summable() const { return kind == Kind::kGeometric; }
  double max_value() const { return lambda0; }
  /// Closed-form sum of the first `count` terms.
  double partial_sum(int count) const;
};

double make_lambda(const LambdaSequence& seq, int k);

/// Discrepancy principle: stop at the first k with ||Ru_k - y_d|| <= tau*delta.
struct StoppingRule {
  double tau = 1.1;   // must be > 1
  double delta = 0.0; // measured noise norm; 0 for exact data
};

struct AdaptConfig {
  int k0 = 10;       // pruning starts strictly after this iteration index
  double tol = 0.0;  // prior i is dropped when ||u_k - u^(i)|| >= tol
};

struct SchemeConfig {
  SchemeKind kind = SchemeKind::kLandweber;
  double omega = 1e-2;
  std::optional<LambdaSequence> lambda;  // unused by LANDWEBER / DDIRLI
  double mu = 0.0;                       // IRLI-revised only
  double ddirli_c = 77e-6;               // DDIRLI only
  std::optional<AdaptConfig> adapt;      // GIRLI-adapt only
  StoppingRule stop;
  int max_iterations = 1000;
  std::string prior_ref;  // identifier of the prior set in run metadata

  /// Throws on an invalid combination before iteration 0.
  void validate() const;
};

enum class StopReason { kDiscrepancy, kMaxIterations };

std::string to_string(StopReason reason);

struct IterationRecord {
  int k = 0;
  double residual_norm = 0.0;
  double error_norm = std::numeric_limits<double>::quiet_NaN();  // NaN when truth unknown
  int active_prior_count = 0;
  double wall_time_s = 0.0;
  bool prune_guard = false;  // empty-prune guard fired while producing u_k
};

struct IterationTrace {
  std::vector<IterationRecord> records;
  int stop_index = 0;
  StopReason stop_reason = StopReason::kMaxIterations;
};

struct SchemeRun {
  GridImage reconstruction;
  IterationTrace trace;
};

// --- Single steps -----------------------------------------------------------
//
// Each function evaluates its update formula exactly once. The lambda-free
// degenerate modes (lambda == 0, C == 0) reduce bitwise to the Landweber
// step.

GridImage step_landweber(const GridImage& u_k, const LinearOperator& op, const Sinogram& y_d,
                         double omega);

GridImage step_girli(const GridImage& u_k, const LinearOperator& op, const Sinogram& y_d,
                     double omega, double lambda_k, const GridImage& prior_mean,
                     bool allow_zero_lambda = false);

GridImage step_girli_gm(const GridImage& u_k, const LinearOperator& op, const Sinogram& y_d,
                        double omega, double lambda_k, const GridImage& prior_gm,
                        bool allow_zero_lambda = false);

GridImage step_irli(const GridImage& u_k, const LinearOperator& op, const Sinogram& y_d,
                    double omega, double lambda_k, const GridImage& u0_ref,
                    bool allow_zero_lambda = false);

/// Kaczmarz-style variant: the damping anchors the CURRENT noisy iterate to
/// the prior selected by i = k mod n (there is no separate noise-free
/// iterate anywhere in this engine).
GridImage step_irli_revised(const GridImage& u_k, const LinearOperator& op, const Sinogram& y_d,
                            double omega, double mu_k, const GridImage& prior_i);

GridImage step_ddirli(const GridImage& u_k, const LinearOperator& op, const Sinogram& y_d,
                      double omega, const LinearOperator& a_op, double c_coef);

/// Kaczmarz-style prior selection of IRLI-revised: index used at step k.
inline int kacz_index(int k, int n) { return k % n; }

/// Runs the configured scheme from u0 until the discrepancy principle fires
/// (checked before each step, so k* = 0 is possible) or the iteration cap is
/// reached. For GIRLI-adapt the prior set is pruned in place after each step
/// with index > k0, so the caller should pass a clone it owns. For DDIRLI an
/// operator A may be supplied; otherwise it is built from the prior set.
SchemeRun run_scheme(const SchemeConfig& config, const LinearOperator& op, const Sinogram& y_d,
                     const GridImage& u0, PriorSet& priors, const GridImage* truth = nullptr,
                     const LinearOperator* ddirli_op = nullptr);

}  // namespace iterreg
