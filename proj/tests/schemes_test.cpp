#include <gtest/gtest.h>

#include <cmath>

#include "iterreg/operator_utils.hpp"
#include "iterreg/radon.hpp"
#include "iterreg/schemes.hpp"
#include "support/oracles.hpp"

namespace iterreg {
namespace {

using testing::random_image;
using testing::random_nonnegative_image;

DenseOperator scalar_op(double value) {
  Eigen::MatrixXd m(1, 1);
  m(0, 0) = value;
  return DenseOperator::square(m);
}

GridImage scalar_image(double value) {
  GridImage u(1, 1);
  u.values[0] = value;
  return u;
}

Sinogram scalar_sino(double value) {
  Sinogram s({0.0}, 1);
  s.values[0] = value;
  return s;
}

PriorSet scalar_priors(std::initializer_list<double> values, bool with_sinograms = false,
                       double op_value = 1.0) {
  std::vector<GridImage> imgs;
  std::vector<Sinogram> sinos;
  for (double v : values) {
    imgs.push_back(scalar_image(v));
    sinos.push_back(scalar_sino(op_value * v));
  }
  if (with_sinograms) return PriorSet(std::move(imgs), std::move(sinos));
  return PriorSet(std::move(imgs));
}

TEST(StepLandweber, ScalarFixedPointInOneStep) {
  GridImage u1 = step_landweber(scalar_image(0.0), scalar_op(1.0), scalar_sino(1.0), 1.0);
  EXPECT_DOUBLE_EQ(u1.values[0], 1.0);
}

TEST(StepLandweber, ExactIterateIsFixed) {
  Rng rng(2);
  RadonTransform op(4, 4, equispaced_angles(6));
  GridImage u = random_image(rng, 4, 4);
  Sinogram y = op.apply(u);
  GridImage next = step_landweber(u, op, y, 0.3);
  EXPECT_EQ((next.values - u.values).norm(), 0.0);
}

TEST(StepLandweber, ScalarRecursionTwoSteps) {
  DenseOperator op = scalar_op(2.0);
  Sinogram y = scalar_sino(4.0);
  GridImage u1 = step_landweber(scalar_image(0.0), op, y, 0.1);
  EXPECT_DOUBLE_EQ(u1.values[0], 0.8);
  GridImage u2 = step_landweber(u1, op, y, 0.1);
  EXPECT_DOUBLE_EQ(u2.values[0], 1.28);
}

TEST(StepGirli, ZeroLambdaReducesBitwiseToLandweber) {
  Rng rng(11);
  RadonTransform op(4, 4, equispaced_angles(8));
  GridImage u = random_image(rng, 4, 4);
  GridImage mean = random_image(rng, 4, 4);
  Sinogram y = op.apply(random_image(rng, 4, 4));
  GridImage girli = step_girli(u, op, y, 0.05, 0.0, mean, /*allow_zero_lambda=*/true);
  GridImage landweber = step_landweber(u, op, y, 0.05);
  for (Eigen::Index i = 0; i < girli.values.size(); ++i) {
    EXPECT_EQ(girli.values[i], landweber.values[i]);
  }
}

TEST(StepGirli, RejectsLambdaOutOfRange) {
  DenseOperator op = scalar_op(1.0);
  EXPECT_THROW(step_girli(scalar_image(1.0), op, scalar_sino(0.0), 0.1, 0.0, scalar_image(0.0)),
               std::invalid_argument);
  EXPECT_THROW(step_girli(scalar_image(1.0), op, scalar_sino(0.0), 0.1, 1.0, scalar_image(0.0)),
               std::invalid_argument);
  EXPECT_THROW(step_girli(scalar_image(1.0), op, scalar_sino(0.0), 0.1, -0.2, scalar_image(0.0)),
               std::invalid_argument);
}

TEST(StepGirli, ZeroOmegaKeepsAnchorFixed) {
  Rng rng(4);
  RadonTransform op(3, 3, equispaced_angles(5));
  GridImage mean = random_image(rng, 3, 3);
  Sinogram y = op.apply(random_image(rng, 3, 3));
  GridImage next = step_girli(mean, op, y, 0.0, 0.5, mean);
  for (Eigen::Index i = 0; i < next.values.size(); ++i) {
    EXPECT_DOUBLE_EQ(next.values[i], mean.values[i]);
  }
}

TEST(StepGirli, ScalarOracle) {
  GridImage next =
      step_girli(scalar_image(2.0), scalar_op(1.0), scalar_sino(1.0), 0.1, 0.2, scalar_image(3.0));
  EXPECT_NEAR(next.values[0], 2.1, 1e-15);
}

TEST(StepGirliGm, IdenticalPriorsMatchMeanVariant) {
  Rng rng(6);
  RadonTransform op(4, 4, equispaced_angles(6));
  GridImage prior = random_nonnegative_image(rng, 4, 4);
  PriorSet set({prior, prior, prior});
  GridImage u = random_image(rng, 4, 4);
  Sinogram y = op.apply(random_image(rng, 4, 4));
  GridImage via_gm = step_girli_gm(u, op, y, 0.1, 0.3, set.geometric_mean());
  GridImage via_mean = step_girli(u, op, y, 0.1, 0.3, set.mean());
  EXPECT_LE((via_gm.values - via_mean.values).norm(), 1e-12 * (1.0 + via_mean.values.norm()));
}

TEST(StepGirliGm, AllZeroPriorTermDropsOut) {
  Rng rng(8);
  RadonTransform op(4, 4, equispaced_angles(6));
  GridImage u = random_image(rng, 4, 4);
  Sinogram y = op.apply(random_image(rng, 4, 4));
  GridImage zero_gm(4, 4);
  GridImage next = step_girli_gm(u, op, y, 0.1, 0.4, zero_gm);
  // (1 - lambda) u - omega R^*(Ru - y) with the anchor contributing zero.
  Sinogram residual = op.apply(u);
  residual.values -= y.values;
  GridImage g = op.apply_adjoint(residual);
  Eigen::VectorXd expected = 0.6 * u.values - 0.1 * g.values;
  EXPECT_LE((next.values - expected).norm(), 1e-14 * (1.0 + expected.norm()));
}

TEST(StepGirliGm, ScalarOracle) {
  GridImage next = step_girli_gm(scalar_image(2.0), scalar_op(1.0), scalar_sino(1.0), 0.1, 0.2,
                                 scalar_image(4.0));
  EXPECT_NEAR(next.values[0], 2.3, 1e-15);
}

TEST(StepIrli, BothCorrectionsVanishAtAnchor) {
  Rng rng(10);
  RadonTransform op(4, 4, equispaced_angles(6));
  GridImage u = random_image(rng, 4, 4);
  Sinogram y = op.apply(u);
  GridImage next = step_irli(u, op, y, 0.1, 0.2, u);
  EXPECT_EQ((next.values - u.values).norm(), 0.0);
}

TEST(StepIrli, ZeroLambdaReducesBitwiseToLandweber) {
  Rng rng(12);
  RadonTransform op(4, 4, equispaced_angles(7));
  GridImage u = random_image(rng, 4, 4);
  GridImage anchor = random_image(rng, 4, 4);
  Sinogram y = op.apply(random_image(rng, 4, 4));
  GridImage irli = step_irli(u, op, y, 0.07, 0.0, anchor, /*allow_zero_lambda=*/true);
  GridImage landweber = step_landweber(u, op, y, 0.07);
  for (Eigen::Index i = 0; i < irli.values.size(); ++i) {
    EXPECT_EQ(irli.values[i], landweber.values[i]);
  }
}

TEST(StepIrli, ScalarOracle) {
  GridImage next =
      step_irli(scalar_image(2.0), scalar_op(1.0), scalar_sino(1.0), 0.1, 0.2, scalar_image(1.0));
  EXPECT_NEAR(next.values[0], 1.7, 1e-15);
}

TEST(StepIrliRevised, ScalarOracle) {
  GridImage next = step_irli_revised(scalar_image(2.0), scalar_op(1.0), scalar_sino(1.0), 0.1,
                                     0.001, scalar_image(0.0));
  EXPECT_NEAR(next.values[0], 1.898, 1e-15);
}

TEST(StepIrliRevised, KaczmarzIndexCyclesModN) {
  for (int k = 0; k < 6; ++k) {
    EXPECT_EQ(kacz_index(k, 3), k % 3);
  }
  const int expected[] = {0, 1, 2, 0, 1, 2};
  for (int k = 0; k < 6; ++k) EXPECT_EQ(kacz_index(k, 3), expected[k]);
}

TEST(StepDdirli, ZeroCoefficientReducesBitwiseToLandweber) {
  Rng rng(13);
  RadonTransform op(4, 4, equispaced_angles(6));
  DenseOperator a(materialize_matrix(op), 4, 4, op.angles(), op.bins());
  GridImage u = random_image(rng, 4, 4);
  Sinogram y = op.apply(random_image(rng, 4, 4));
  GridImage ddirli = step_ddirli(u, op, y, 0.05, a, 0.0);
  GridImage landweber = step_landweber(u, op, y, 0.05);
  for (Eigen::Index i = 0; i < ddirli.values.size(); ++i) {
    EXPECT_EQ(ddirli.values[i], landweber.values[i]);
  }
}

TEST(StepDdirli, ZeroResidualIsFixedPoint) {
  Rng rng(14);
  RadonTransform op(4, 4, equispaced_angles(6));
  DenseOperator a(materialize_matrix(op), 4, 4, op.angles(), op.bins());
  GridImage u = random_image(rng, 4, 4);
  Sinogram y = op.apply(u);
  GridImage next = step_ddirli(u, op, y, 0.05, a, 0.01);
  EXPECT_EQ((next.values - u.values).norm(), 0.0);
}

TEST(StepDdirli, ScalarOracle) {
  GridImage next = step_ddirli(scalar_image(0.0), scalar_op(1.0), scalar_sino(1.0), 0.1,
                               scalar_op(2.0), 0.05);
  EXPECT_NEAR(next.values[0], 0.2, 1e-15);
}

TEST(StepDdirli, RejectsGeometryMismatch) {
  RadonTransform op(4, 4, equispaced_angles(6));
  DenseOperator a(Eigen::MatrixXd::Zero(5, 16), 4, 4, equispaced_angles(5), 1);
  GridImage u(4, 4);
  EXPECT_THROW(step_ddirli(u, op, op.zero_range(), 0.1, a, 0.01), std::invalid_argument);
}

TEST(MakeLambda, ConstantSequence) {
  LambdaSequence seq = LambdaSequence::constant(0.01);
  for (int k : {0, 1, 10, 500}) EXPECT_DOUBLE_EQ(make_lambda(seq, k), 0.01);
  EXPECT_FALSE(seq.summable());
}

TEST(MakeLambda, GeometricStartsAtLambda0) {
  LambdaSequence seq = LambdaSequence::geometric(0.01, 0.99);
  EXPECT_DOUBLE_EQ(make_lambda(seq, 0), 0.01);
  EXPECT_TRUE(seq.summable());
}

TEST(MakeLambda, GeometricPartialSumsApproachClosedForm) {
  LambdaSequence seq = LambdaSequence::geometric(0.01, 0.99);
  double sum = 0.0;
  for (int k = 0; k < 4000; ++k) sum += make_lambda(seq, k);
  EXPECT_NEAR(sum, 1.0, 1e-10);  // lambda0 / (1 - ratio)
  EXPECT_NEAR(seq.partial_sum(4000), sum, 1e-9);
}

TEST(MakeLambda, StaysInRangeProperty) {
  LambdaSequence seq = LambdaSequence::geometric(0.3, 0.7);
  for (int k = 0; k < 1000; ++k) {
    const double l = make_lambda(seq, k);
    EXPECT_GT(l, 0.0);
    EXPECT_LE(l, seq.max_value());
  }
}

TEST(MakeLambda, ConstructionRejectsBadParameters) {
  EXPECT_THROW(LambdaSequence::constant(1.0), std::invalid_argument);
  EXPECT_THROW(LambdaSequence::constant(0.0), std::invalid_argument);
  EXPECT_THROW(LambdaSequence::constant(-0.1), std::invalid_argument);
  EXPECT_THROW(LambdaSequence::geometric(0.5, 1.0), std::invalid_argument);
  EXPECT_THROW(LambdaSequence::geometric(0.5, 0.0), std::invalid_argument);
}

SchemeConfig landweber_config(double omega, double tau, double delta, int cap) {
  SchemeConfig cfg;
  cfg.kind = SchemeKind::kLandweber;
  cfg.omega = omega;
  cfg.stop = StoppingRule{tau, delta};
  cfg.max_iterations = cap;
  return cfg;
}

TEST(RunScheme, ImmediateDiscrepancyStopsAtZero) {
  DenseOperator op = scalar_op(1.0);
  PriorSet priors;
  SchemeConfig cfg = landweber_config(0.1, 1.1, /*delta=*/1.0, 100);
  GridImage u0 = scalar_image(1.0);
  Sinogram y = scalar_sino(1.5);  // residual 0.5 <= 1.1
  SchemeRun run = run_scheme(cfg, op, y, u0, priors);
  EXPECT_EQ(run.trace.stop_index, 0);
  EXPECT_EQ(run.trace.stop_reason, StopReason::kDiscrepancy);
  ASSERT_EQ(run.trace.records.size(), 1u);
  EXPECT_EQ(run.reconstruction.values[0], u0.values[0]);
}

TEST(RunScheme, ExactDataExhaustsCap) {
  DenseOperator op = scalar_op(2.0);
  PriorSet priors;
  SchemeConfig cfg = landweber_config(0.1, 1.5, /*delta=*/0.0, 50);
  SchemeRun run = run_scheme(cfg, op, scalar_sino(4.0), scalar_image(0.0), priors);
  EXPECT_EQ(run.trace.stop_reason, StopReason::kMaxIterations);
  EXPECT_EQ(run.trace.stop_index, 49);
  ASSERT_EQ(run.trace.records.size(), 50u);
  for (int k = 0; k < 50; ++k) EXPECT_EQ(run.trace.records[k].k, k);
}

// Scalar recursion u_{k+1} = 0.6 u_k + 0.8 has residual 4 * 0.6^k; with
// tau*delta = 0.11 the first admissible index is k = 8.
TEST(RunScheme, ScalarDiscrepancyIndexMatchesClosedForm) {
  DenseOperator op = scalar_op(2.0);
  PriorSet priors;
  SchemeConfig cfg = landweber_config(0.1, 1.1, /*delta=*/0.1, 1000);
  SchemeRun run = run_scheme(cfg, op, scalar_sino(4.0), scalar_image(0.0), priors);
  EXPECT_EQ(run.trace.stop_reason, StopReason::kDiscrepancy);
  EXPECT_EQ(run.trace.stop_index, 8);
  for (int k = 0; k <= 8; ++k) {
    EXPECT_NEAR(run.trace.records[k].residual_norm, 4.0 * std::pow(0.6, k), 1e-12);
  }
  EXPECT_LE(run.trace.records[8].residual_norm, 0.11);
  EXPECT_GT(run.trace.records[7].residual_norm, 0.11);
}

TEST(RunScheme, DiscrepancyContractHoldsOnStop) {
  Rng rng(20);
  RadonTransform op(6, 6, equispaced_angles(10));
  GridImage truth = random_nonnegative_image(rng, 6, 6);
  Sinogram y = op.apply(truth);
  Sinogram y_d = y;
  for (Eigen::Index i = 0; i < y_d.values.size(); ++i) y_d.values[i] += 0.05 * rng.gaussian();
  const double delta = (y_d.values - y.values).norm();
  const double est = estimate_operator_norm(op, 80).value;
  PriorSet priors;
  SchemeConfig cfg = landweber_config(0.9 / (est * est), 1.2, delta, 4000);
  SchemeRun run = run_scheme(cfg, op, y_d, GridImage(6, 6), priors, &truth);
  ASSERT_EQ(run.trace.stop_reason, StopReason::kDiscrepancy);
  const double threshold = cfg.stop.tau * delta;
  const int k_star = run.trace.stop_index;
  EXPECT_LE(run.trace.records[k_star].residual_norm, threshold);
  for (int k = 0; k < k_star; ++k) {
    EXPECT_GT(run.trace.records[k].residual_norm, threshold);
  }
}

TEST(RunScheme, LandweberResidualMonotoneUnderSafeStep) {
  Rng rng(23);
  RadonTransform op(4, 4, equispaced_angles(12));
  GridImage truth = random_nonnegative_image(rng, 4, 4);
  Sinogram y_d = op.apply(truth);
  for (Eigen::Index i = 0; i < y_d.values.size(); ++i) y_d.values[i] += 0.1 * rng.gaussian();
  const double est = estimate_operator_norm(op, 100).value;
  PriorSet priors;
  SchemeConfig cfg = landweber_config(1.0 / (est * est), 2.0, 0.0, 200);
  SchemeRun run = run_scheme(cfg, op, y_d, GridImage(4, 4), priors);
  for (std::size_t k = 1; k < run.trace.records.size(); ++k) {
    EXPECT_LE(run.trace.records[k].residual_norm,
              run.trace.records[k - 1].residual_norm * (1.0 + 1e-12));
  }
}

TEST(RunScheme, DdirliCZeroMatchesLandweberBitwise) {
  Rng rng(24);
  RadonTransform op(5, 5, equispaced_angles(8));
  std::vector<GridImage> imgs;
  std::vector<Sinogram> sinos;
  for (int i = 0; i < 4; ++i) {
    imgs.push_back(random_nonnegative_image(rng, 5, 5));
    sinos.push_back(op.apply(imgs.back()));
  }
  PriorSet priors(imgs, sinos);
  GridImage truth = random_nonnegative_image(rng, 5, 5);
  Sinogram y_d = op.apply(truth);
  y_d.values[3] += 0.25;

  SchemeConfig ddirli;
  ddirli.kind = SchemeKind::kDdirli;
  ddirli.omega = 0.02;
  ddirli.ddirli_c = 0.0;
  ddirli.stop = StoppingRule{1.5, 0.0};
  ddirli.max_iterations = 40;

  SchemeConfig landweber = landweber_config(0.02, 1.5, 0.0, 40);

  PriorSet p1 = priors;
  PriorSet p2 = priors;
  SchemeRun a = run_scheme(ddirli, op, y_d, GridImage(5, 5), p1);
  SchemeRun b = run_scheme(landweber, op, y_d, GridImage(5, 5), p2);
  ASSERT_EQ(a.trace.records.size(), b.trace.records.size());
  for (std::size_t k = 0; k < a.trace.records.size(); ++k) {
    EXPECT_EQ(a.trace.records[k].residual_norm, b.trace.records[k].residual_norm);
  }
  for (Eigen::Index i = 0; i < a.reconstruction.values.size(); ++i) {
    EXPECT_EQ(a.reconstruction.values[i], b.reconstruction.values[i]);
  }
}

TEST(RunScheme, IrliRevisedWithOnePriorMatchesIrliBitwise) {
  Rng rng(25);
  RadonTransform op(5, 5, equispaced_angles(8));
  GridImage anchor = random_nonnegative_image(rng, 5, 5);
  PriorSet priors({anchor});
  GridImage truth = random_nonnegative_image(rng, 5, 5);
  Sinogram y_d = op.apply(truth);

  SchemeConfig irli;
  irli.kind = SchemeKind::kIrli;
  irli.omega = 0.02;
  irli.lambda = LambdaSequence::constant(0.003);
  irli.stop = StoppingRule{1.5, 0.0};
  irli.max_iterations = 30;

  SchemeConfig revised;
  revised.kind = SchemeKind::kIrliRevised;
  revised.omega = 0.02;
  revised.mu = 0.003;
  revised.stop = StoppingRule{1.5, 0.0};
  revised.max_iterations = 30;

  PriorSet p1 = priors;
  PriorSet p2 = priors;
  SchemeRun a = run_scheme(irli, op, y_d, anchor, p1);  // IRLI anchors at its u0
  SchemeRun b = run_scheme(revised, op, y_d, anchor, p2);
  for (Eigen::Index i = 0; i < a.reconstruction.values.size(); ++i) {
    EXPECT_EQ(a.reconstruction.values[i], b.reconstruction.values[i]);
  }
}

TEST(RunScheme, IrliRevisedCyclesThroughPriors) {
  Rng rng(26);
  RadonTransform op(3, 3, equispaced_angles(4));
  std::vector<GridImage> imgs;
  for (int i = 0; i < 3; ++i) imgs.push_back(random_nonnegative_image(rng, 3, 3));
  PriorSet priors(imgs);
  GridImage u0 = random_nonnegative_image(rng, 3, 3);
  Sinogram y_d = op.apply(random_nonnegative_image(rng, 3, 3));

  SchemeConfig cfg;
  cfg.kind = SchemeKind::kIrliRevised;
  cfg.omega = 0.03;
  cfg.mu = 0.01;
  cfg.stop = StoppingRule{1.5, 0.0};
  cfg.max_iterations = 7;
  PriorSet run_priors = priors;
  SchemeRun engine = run_scheme(cfg, op, y_d, u0, run_priors);

  GridImage u = u0;
  for (int k = 0; k < 6; ++k) {
    u = step_irli_revised(u, op, y_d, cfg.omega, cfg.mu, priors.image(kacz_index(k, 3)));
  }
  EXPECT_LE((engine.reconstruction.values - u.values).norm(),
            1e-13 * (1.0 + u.values.norm()));
}

TEST(RunScheme, GirliAdaptPrunesAfterK0) {
  Rng rng(27);
  RadonTransform op(5, 5, equispaced_angles(8));
  GridImage truth = random_nonnegative_image(rng, 5, 5);
  std::vector<GridImage> imgs;
  // One prior very close to the truth, two far away.
  GridImage close = truth;
  close.values.array() += 0.01;
  imgs.push_back(close);
  for (int i = 0; i < 2; ++i) {
    GridImage far = random_nonnegative_image(rng, 5, 5);
    far.values.array() += 3.0;
    imgs.push_back(far);
  }
  PriorSet priors(imgs);
  Sinogram y_d = op.apply(truth);

  SchemeConfig cfg;
  cfg.kind = SchemeKind::kGirliAdapt;
  cfg.omega = 0.02;
  cfg.lambda = LambdaSequence::constant(0.05);
  cfg.adapt = AdaptConfig{3, 5.0};
  cfg.stop = StoppingRule{1.5, 0.0};
  cfg.max_iterations = 30;

  GridImage u0 = priors.mean();
  SchemeRun run = run_scheme(cfg, op, y_d, u0, priors, &truth);
  // Counts never increase, and pruning is inactive through k0.
  for (std::size_t k = 1; k < run.trace.records.size(); ++k) {
    EXPECT_LE(run.trace.records[k].active_prior_count,
              run.trace.records[k - 1].active_prior_count);
  }
  for (int k = 0; k <= 3 && k < static_cast<int>(run.trace.records.size()); ++k) {
    EXPECT_EQ(run.trace.records[k].active_prior_count, 3);
  }
  EXPECT_EQ(priors.active_count(), 1);
  EXPECT_TRUE(priors.is_active(0));
}

TEST(RunScheme, GirliEngineMatchesManualSteps) {
  Rng rng(29);
  RadonTransform op(5, 5, equispaced_angles(7));
  GridImage truth = random_nonnegative_image(rng, 5, 5);
  std::vector<GridImage> imgs;
  for (int i = 0; i < 3; ++i) imgs.push_back(random_nonnegative_image(rng, 5, 5));
  PriorSet priors(imgs);
  Sinogram y_d = op.apply(truth);
  y_d.values[5] += 0.4;

  SchemeConfig cfg;
  cfg.kind = SchemeKind::kGirli;
  cfg.omega = 0.015;
  cfg.lambda = LambdaSequence::geometric(0.04, 0.9);
  cfg.stop = StoppingRule{1.5, 0.0};
  cfg.max_iterations = 9;
  PriorSet run_priors = priors;
  GridImage u0 = priors.mean();
  SchemeRun engine = run_scheme(cfg, op, y_d, u0, run_priors);

  GridImage u = u0;
  for (int k = 0; k < 8; ++k) {
    u = step_girli(u, op, y_d, cfg.omega, make_lambda(*cfg.lambda, k), priors.mean());
  }
  EXPECT_LE((engine.reconstruction.values - u.values).norm(), 1e-13 * (1.0 + u.values.norm()));
}

TEST(RunScheme, GirliGmEngineMatchesManualSteps) {
  Rng rng(30);
  RadonTransform op(5, 5, equispaced_angles(7));
  GridImage truth = random_nonnegative_image(rng, 5, 5);
  std::vector<GridImage> imgs;
  for (int i = 0; i < 3; ++i) {
    GridImage img = random_nonnegative_image(rng, 5, 5);
    img.values.array() += 0.01;  // strictly positive so the gm is informative
    imgs.push_back(img);
  }
  PriorSet priors(imgs);
  Sinogram y_d = op.apply(truth);

  SchemeConfig cfg;
  cfg.kind = SchemeKind::kGirliGm;
  cfg.omega = 0.015;
  cfg.lambda = LambdaSequence::constant(0.03);
  cfg.stop = StoppingRule{1.5, 0.0};
  cfg.max_iterations = 7;
  PriorSet run_priors = priors;
  GridImage u0 = priors.geometric_mean();
  SchemeRun engine = run_scheme(cfg, op, y_d, u0, run_priors);

  GridImage u = u0;
  for (int k = 0; k < 6; ++k) {
    u = step_girli_gm(u, op, y_d, cfg.omega, 0.03, priors.geometric_mean());
  }
  EXPECT_LE((engine.reconstruction.values - u.values).norm(), 1e-13 * (1.0 + u.values.norm()));
}

TEST(RunScheme, DeterministicBitwiseTrace) {
  Rng rng(28);
  RadonTransform op(6, 6, equispaced_angles(9));
  GridImage truth = random_nonnegative_image(rng, 6, 6);
  std::vector<GridImage> imgs;
  std::vector<Sinogram> sinos;
  for (int i = 0; i < 3; ++i) {
    imgs.push_back(random_nonnegative_image(rng, 6, 6));
    sinos.push_back(op.apply(imgs.back()));
  }
  PriorSet priors(imgs, sinos);
  Sinogram y_d = op.apply(truth);
  y_d.values[7] += 0.3;

  SchemeConfig cfg;
  cfg.kind = SchemeKind::kGirli;
  cfg.omega = 0.01;
  cfg.lambda = LambdaSequence::geometric(0.05, 0.95);
  cfg.stop = StoppingRule{1.5, 0.0};
  cfg.max_iterations = 60;

  PriorSet p1 = priors;
  PriorSet p2 = priors;
  SchemeRun a = run_scheme(cfg, op, y_d, priors.mean(), p1, &truth);
  SchemeRun b = run_scheme(cfg, op, y_d, priors.mean(), p2, &truth);
  ASSERT_EQ(a.trace.records.size(), b.trace.records.size());
  for (std::size_t k = 0; k < a.trace.records.size(); ++k) {
    EXPECT_EQ(a.trace.records[k].residual_norm, b.trace.records[k].residual_norm);
    EXPECT_EQ(a.trace.records[k].error_norm, b.trace.records[k].error_norm);
  }
  for (Eigen::Index i = 0; i < a.reconstruction.values.size(); ++i) {
    EXPECT_EQ(a.reconstruction.values[i], b.reconstruction.values[i]);
  }
}

TEST(SchemeConfig, ValidationRules) {
  SchemeConfig cfg;
  cfg.kind = SchemeKind::kGirli;
  cfg.omega = 0.1;
  cfg.stop = StoppingRule{1.5, 0.0};
  cfg.max_iterations = 10;
  EXPECT_THROW(cfg.validate(), std::invalid_argument);  // missing lambda
  cfg.lambda = LambdaSequence::constant(0.01);
  EXPECT_NO_THROW(cfg.validate());

  cfg.adapt = AdaptConfig{5, 1.0};
  EXPECT_THROW(cfg.validate(), std::invalid_argument);  // adapt only for GIRLI-adapt
  cfg.kind = SchemeKind::kGirliAdapt;
  EXPECT_NO_THROW(cfg.validate());
  cfg.adapt.reset();
  EXPECT_THROW(cfg.validate(), std::invalid_argument);  // GIRLI-adapt needs adapt

  SchemeConfig bad_tau = cfg;
  bad_tau.kind = SchemeKind::kLandweber;
  bad_tau.lambda.reset();
  bad_tau.adapt.reset();
  bad_tau.stop.tau = 1.0;
  EXPECT_THROW(bad_tau.validate(), std::invalid_argument);

  SchemeConfig revised;
  revised.kind = SchemeKind::kIrliRevised;
  revised.omega = 0.1;
  revised.mu = 0.0;
  revised.stop = StoppingRule{1.5, 0.0};
  EXPECT_THROW(revised.validate(), std::invalid_argument);  // mu must be positive
}

TEST(RunScheme, EmptyPriorSetRejectedWhenNeeded) {
  DenseOperator op = scalar_op(1.0);
  PriorSet empty;
  SchemeConfig cfg;
  cfg.kind = SchemeKind::kIrliRevised;
  cfg.omega = 0.1;
  cfg.mu = 0.01;
  cfg.stop = StoppingRule{1.5, 0.0};
  cfg.max_iterations = 5;
  EXPECT_THROW(run_scheme(cfg, op, scalar_sino(1.0), scalar_image(0.0), empty),
               std::invalid_argument);
}

TEST(SchemeKindNames, RoundTrip) {
  for (SchemeKind kind : {SchemeKind::kLandweber, SchemeKind::kIrli, SchemeKind::kIrliRevised,
                          SchemeKind::kGirli, SchemeKind::kGirliAdapt, SchemeKind::kGirliGm,
                          SchemeKind::kDdirli}) {
    EXPECT_EQ(scheme_kind_from_string(to_string(kind)), kind);
  }
  EXPECT_THROW(scheme_kind_from_string("NONSENSE"), std::invalid_argument);
}

}  // namespace
}  // namespace iterreg
