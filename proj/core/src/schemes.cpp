#include "iterreg/schemes.hpp"

#include <chrono>
#include <cmath>
#include <memory>
#include <stdexcept>

namespace iterreg {

namespace {

void check_lambda(double lambda_k, bool allow_zero) {
  if (allow_zero && lambda_k == 0.0) return;
  if (!(lambda_k > 0.0 && lambda_k < 1.0)) {
    throw std::invalid_argument("scheme step: lambda_k must lie in (0,1), got " +
                                std::to_string(lambda_k));
  }
}

// omega * R^*(R u_k - y_d), the gradient part shared by every scheme.
GridImage landweber_correction(const GridImage& u_k, const LinearOperator& op, const Sinogram& y_d,
                               double omega) {
  Sinogram residual = op.apply(u_k);
  require_same_geometry(residual, y_d, "scheme step");
  residual.values -= y_d.values;
  GridImage g = op.apply_adjoint(residual);
  g.values *= omega;
  return g;
}

GridImage landweber_from_correction(const GridImage& u_k, const GridImage& correction) {
  GridImage next = u_k;
  next.values -= correction.values;
  return next;
}

// (1 - lambda) u_k - correction + lambda * anchor. lambda == 0 takes the
// Landweber path so the degenerate mode reduces bitwise.
GridImage damped_toward_anchor(const GridImage& u_k, const GridImage& correction, double lambda_k,
                               const GridImage& anchor) {
  if (lambda_k == 0.0) return landweber_from_correction(u_k, correction);
  require_same_geometry(u_k, anchor, "scheme step");
  GridImage next(u_k.width, u_k.height);
  next.values = (1.0 - lambda_k) * u_k.values - correction.values + lambda_k * anchor.values;
  return next;
}

// u_k - correction - coef * (u_k - anchor); shared by IRLI and IRLI-revised.
GridImage anchored_update(const GridImage& u_k, const GridImage& correction, double coef,
                          const GridImage& anchor) {
  if (coef == 0.0) return landweber_from_correction(u_k, correction);
  require_same_geometry(u_k, anchor, "scheme step");
  GridImage next(u_k.width, u_k.height);
  next.values = u_k.values - correction.values - coef * (u_k.values - anchor.values);
  return next;
}

}  // namespace

std::string to_string(SchemeKind kind) {
  switch (kind) {
    case SchemeKind::kLandweber: return "LANDWEBER";
    case SchemeKind::kIrli: return "IRLI";
    case SchemeKind::kIrliRevised: return "IRLI-revised";
    case SchemeKind::kGirli: return "GIRLI";
    case SchemeKind::kGirliAdapt: return "GIRLI-adapt";
    case SchemeKind::kGirliGm: return "GIRLI-GM";
    case SchemeKind::kDdirli: return "DDIRLI";
  }
  throw std::logic_error("to_string(SchemeKind): unknown kind");
}

SchemeKind scheme_kind_from_string(const std::string& name) {
  if (name == "LANDWEBER") return SchemeKind::kLandweber;
  if (name == "IRLI") return SchemeKind::kIrli;
  if (name == "IRLI-revised" || name == "IRLI_REVISED") return SchemeKind::kIrliRevised;
  if (name == "GIRLI") return SchemeKind::kGirli;
  if (name == "GIRLI-adapt" || name == "GIRLI_ADAPT") return SchemeKind::kGirliAdapt;
  if (name == "GIRLI-GM" || name == "GIRLI_GM") return SchemeKind::kGirliGm;
  if (name == "DDIRLI") return SchemeKind::kDdirli;
  throw std::invalid_argument("unknown scheme kind: " + name);
}

std::string to_string(StopReason reason) {
  return reason == StopReason::kDiscrepancy ? "DISCREPANCY" : "MAX_ITER";
}

LambdaSequence LambdaSequence::constant(double lambda0) {
  if (!(lambda0 > 0.0 && lambda0 < 1.0)) {
    throw std::invalid_argument("LambdaSequence: lambda0 must lie in (0,1)");
  }
  return {Kind::kConstant, lambda0, 1.0};
}

LambdaSequence LambdaSequence::geometric(double lambda0, double ratio) {
  if (!(lambda0 > 0.0 && lambda0 < 1.0)) {
    throw std::invalid_argument("LambdaSequence: lambda0 must lie in (0,1)");
  }
  if (!(ratio > 0.0 && ratio < 1.0)) {
    throw std::invalid_argument("LambdaSequence: geometric ratio must lie in (0,1)");
  }
  return {Kind::kGeometric, lambda0, ratio};
}

double LambdaSequence::partial_sum(int count) const {
  if (count <= 0) return 0.0;
  if (kind == Kind::kConstant) return lambda0 * count;
  return lambda0 * (1.0 - std::pow(ratio, count)) / (1.0 - ratio);
}

double make_lambda(const LambdaSequence& seq, int k) {
  if (k < 0) throw std::invalid_argument("make_lambda: k must be >= 0");
  if (seq.kind == LambdaSequence::Kind::kConstant) return seq.lambda0;
  return seq.lambda0 * std::pow(seq.ratio, k);
}

void SchemeConfig::validate() const {
  if (!(omega > 0.0)) throw std::invalid_argument("SchemeConfig: omega must be positive");
  if (max_iterations < 1) throw std::invalid_argument("SchemeConfig: max_iterations must be >= 1");
  if (!(stop.tau > 1.0)) throw std::invalid_argument("SchemeConfig: tau must exceed 1");
  if (stop.delta < 0.0) throw std::invalid_argument("SchemeConfig: delta must be >= 0");

  const bool needs_lambda = kind == SchemeKind::kIrli || kind == SchemeKind::kGirli ||
                            kind == SchemeKind::kGirliAdapt || kind == SchemeKind::kGirliGm;
  if (needs_lambda && !lambda) {
    throw std::invalid_argument("SchemeConfig: " + to_string(kind) + " needs a lambda sequence");
  }
  if (kind == SchemeKind::kIrliRevised && !(mu > 0.0)) {
    throw std::invalid_argument("SchemeConfig: IRLI-revised needs mu > 0");
  }
  if (kind == SchemeKind::kDdirli && ddirli_c < 0.0) {
    throw std::invalid_argument("SchemeConfig: DDIRLI needs C >= 0");
  }
  if (kind == SchemeKind::kGirliAdapt) {
    if (!adapt) throw std::invalid_argument("SchemeConfig: GIRLI-adapt needs adapt settings");
    if (!(adapt->tol > 0.0)) throw std::invalid_argument("SchemeConfig: adapt tol must be positive");
    if (adapt->k0 < 0) throw std::invalid_argument("SchemeConfig: adapt k0 must be >= 0");
  } else if (adapt) {
    throw std::invalid_argument("SchemeConfig: adapt settings only apply to GIRLI-adapt");
  }
}

GridImage step_landweber(const GridImage& u_k, const LinearOperator& op, const Sinogram& y_d,
                         double omega) {
  return landweber_from_correction(u_k, landweber_correction(u_k, op, y_d, omega));
}

GridImage step_girli(const GridImage& u_k, const LinearOperator& op, const Sinogram& y_d,
                     double omega, double lambda_k, const GridImage& prior_mean,
                     bool allow_zero_lambda) {
  check_lambda(lambda_k, allow_zero_lambda);
  return damped_toward_anchor(u_k, landweber_correction(u_k, op, y_d, omega), lambda_k,
                              prior_mean);
}

GridImage step_girli_gm(const GridImage& u_k, const LinearOperator& op, const Sinogram& y_d,
                        double omega, double lambda_k, const GridImage& prior_gm,
                        bool allow_zero_lambda) {
  check_lambda(lambda_k, allow_zero_lambda);
  return damped_toward_anchor(u_k, landweber_correction(u_k, op, y_d, omega), lambda_k, prior_gm);
}

GridImage step_irli(const GridImage& u_k, const LinearOperator& op, const Sinogram& y_d,
                    double omega, double lambda_k, const GridImage& u0_ref,
                    bool allow_zero_lambda) {
  check_lambda(lambda_k, allow_zero_lambda);
  return anchored_update(u_k, landweber_correction(u_k, op, y_d, omega), lambda_k, u0_ref);
}

GridImage step_irli_revised(const GridImage& u_k, const LinearOperator& op, const Sinogram& y_d,
                            double omega, double mu_k, const GridImage& prior_i) {
  if (!(mu_k > 0.0)) {
    throw std::invalid_argument("step_irli_revised: mu_k must be positive");
  }
  return anchored_update(u_k, landweber_correction(u_k, op, y_d, omega), mu_k, prior_i);
}

GridImage step_ddirli(const GridImage& u_k, const LinearOperator& op, const Sinogram& y_d,
                      double omega, const LinearOperator& a_op, double c_coef) {
  if (!op.same_geometry(a_op)) {
    throw std::invalid_argument("step_ddirli: operator A geometry differs from R");
  }
  Sinogram residual = op.apply(u_k);
  require_same_geometry(residual, y_d, "step_ddirli");
  residual.values -= y_d.values;
  GridImage g = op.apply_adjoint(residual);
  const double beta_k = c_coef * residual.values.squaredNorm();
  GridImage next = u_k;
  if (beta_k != 0.0) {
    Sinogram a_residual = a_op.apply(u_k);
    a_residual.values -= y_d.values;
    GridImage ag = a_op.apply_adjoint(a_residual);
    next.values -= omega * g.values + beta_k * ag.values;
  } else {
    next.values -= omega * g.values;
  }
  return next;
}

SchemeRun run_scheme(const SchemeConfig& config, const LinearOperator& op, const Sinogram& y_d,
                     const GridImage& u0, PriorSet& priors, const GridImage* truth,
                     const LinearOperator* ddirli_op) {
  config.validate();
  if (u0.width != op.domain_width() || u0.height != op.domain_height()) {
    throw std::invalid_argument("run_scheme: initial guess geometry mismatch");
  }
  require_same_geometry(y_d, op.zero_range(), "run_scheme");
  if (truth) require_same_geometry(*truth, u0, "run_scheme");

  const bool needs_priors = config.kind == SchemeKind::kGirli ||
                            config.kind == SchemeKind::kGirliAdapt ||
                            config.kind == SchemeKind::kGirliGm ||
                            config.kind == SchemeKind::kIrliRevised ||
                            (config.kind == SchemeKind::kDdirli && ddirli_op == nullptr);
  if (needs_priors && priors.active_count() == 0) {
    throw std::invalid_argument("run_scheme: " + to_string(config.kind) +
                                " needs a nonempty prior set");
  }

  const auto t_start = std::chrono::steady_clock::now();
  auto elapsed = [&t_start] {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
  };

  // Scheme-specific fixed inputs.
  GridImage gm_anchor;
  if (config.kind == SchemeKind::kGirliGm) gm_anchor = priors.geometric_mean();
  std::vector<int> revised_indices;
  if (config.kind == SchemeKind::kIrliRevised) revised_indices = priors.active_indices();
  std::unique_ptr<HandcraftedOperator> built_a;
  const LinearOperator* a_op = ddirli_op;
  if (config.kind == SchemeKind::kDdirli) {
    if (!a_op) {
      built_a = std::make_unique<HandcraftedOperator>(build_handcrafted_operator(priors));
      a_op = built_a.get();
    }
    if (!op.same_geometry(*a_op)) {
      throw std::invalid_argument("run_scheme: DDIRLI operator A geometry differs from R");
    }
  }

  const double threshold = config.stop.tau * config.stop.delta;

  SchemeRun run;
  run.reconstruction = u0;
  GridImage& u = run.reconstruction;
  IterationTrace& trace = run.trace;
  trace.records.reserve(std::min(config.max_iterations, 1 << 20));

  bool pending_guard = false;
  for (int k = 0;; ++k) {
    Sinogram residual = op.apply(u);
    residual.values -= y_d.values;
    const double residual_norm = residual.values.norm();

    IterationRecord rec;
    rec.k = k;
    rec.residual_norm = residual_norm;
    if (truth) rec.error_norm = (u.values - truth->values).norm();
    rec.active_prior_count = priors.total_count() > 0 ? priors.active_count() : 0;
    rec.wall_time_s = elapsed();
    rec.prune_guard = pending_guard;
    pending_guard = false;
    trace.records.push_back(rec);

    if (residual_norm <= threshold) {
      trace.stop_index = k;
      trace.stop_reason = StopReason::kDiscrepancy;
      break;
    }
    if (k + 1 >= config.max_iterations) {
      trace.stop_index = k;
      trace.stop_reason = StopReason::kMaxIterations;
      break;
    }

    // One step; the residual is already computed, so apply the update inline.
    GridImage g = op.apply_adjoint(residual);
    switch (config.kind) {
      case SchemeKind::kLandweber: {
        u.values -= config.omega * g.values;
        break;
      }
      case SchemeKind::kGirli:
      case SchemeKind::kGirliAdapt: {
        const double lambda_k = make_lambda(*config.lambda, k);
        const GridImage& anchor = priors.mean();
        u.values = (1.0 - lambda_k) * u.values - config.omega * g.values +
                   lambda_k * anchor.values;
        break;
      }
      case SchemeKind::kGirliGm: {
        const double lambda_k = make_lambda(*config.lambda, k);
        u.values = (1.0 - lambda_k) * u.values - config.omega * g.values +
                   lambda_k * gm_anchor.values;
        break;
      }
      case SchemeKind::kIrli: {
        const double lambda_k = make_lambda(*config.lambda, k);
        u.values -= config.omega * g.values + lambda_k * (u.values - u0.values);
        break;
      }
      case SchemeKind::kIrliRevised: {
        const int n = static_cast<int>(revised_indices.size());
        const GridImage& anchor = priors.image(revised_indices[kacz_index(k, n)]);
        u.values -= config.omega * g.values + config.mu * (u.values - anchor.values);
        break;
      }
      case SchemeKind::kDdirli: {
        const double beta_k = config.ddirli_c * residual.values.squaredNorm();
        if (beta_k != 0.0) {
          Sinogram a_residual = a_op->apply(u);  // evaluated at u_k, before the update
          a_residual.values -= y_d.values;
          GridImage ag = a_op->apply_adjoint(a_residual);
          u.values -= config.omega * g.values + beta_k * ag.values;
        } else {
          u.values -= config.omega * g.values;
        }
        break;
      }
    }

    if (config.kind == SchemeKind::kGirliAdapt && k + 1 > config.adapt->k0) {
      const PruneOutcome outcome = prune_priors(priors, u, config.adapt->tol);
      pending_guard = outcome.guard_triggered;
    }
  }

  return run;
}

}  // namespace iterreg
