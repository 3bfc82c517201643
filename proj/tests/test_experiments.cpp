#include "oracles.hpp"
#include "support.hpp"

#include "wed/experiments.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace wed;
using testing_support::builtin;
using testing_support::instance;

TEST(Distances, Definitions) {
  const ProblemInstance inst = instance("instance.N = 4\ninstance.M = 4\n");
  const Trajectory a = Trajectory::constant(inst.u0, 4, 1.0);
  Trajectory b = a;
  b.states().bottomRows(4).array() += 1.0;
  const double unit = std::sqrt(4 * inst.grid.spacing());
  EXPECT_NEAR(l2h_distance(a, b, inst.grid), unit, 1e-14);
  EXPECT_NEAR(final_distance(a, b, inst.grid), unit, 1e-14);
  EXPECT_EQ(l2h_distance(a, a, inst.grid), 0.0);
  EXPECT_THROW(l2h_distance(a, Trajectory::constant(inst.u0, 2, 1.0), inst.grid), ConfigError);
}

TEST(CausalSweep, HeatErrorsDecrease) {
  const ProblemInstance inst = builtin("heat", 16, 64);
  const SweepTable t = causal_sweep(inst, {0.25, 0.125, 0.0625}, 0.0, OptimizeConfig{});
  ASSERT_EQ(t.rows.size(), 3u);
  for (std::size_t i = 1; i < t.rows.size(); ++i) EXPECT_LT(t.rows[i].err_L2H, t.rows[i - 1].err_L2H);
  for (const SweepRow& r : t.rows) {
    EXPECT_TRUE(r.converged);
    EXPECT_FALSE(r.failed);
    EXPECT_FALSE(r.minimizer.has_value());
    EXPECT_GE(r.energy_slack, -1e-6);
  }
  ASSERT_TRUE(t.slope.has_value());
  EXPECT_GT(*t.slope, 0.5);
  ASSERT_TRUE(t.reference.has_value());
}

TEST(CausalSweep, ZeroDatumGivesZeroErrors) {
  const ProblemInstance inst = instance("instance.N = 6\ninstance.M = 8\ninstance.u0.name = table\n"
                                        "instance.u0.table = 0,0,0,0,0,0\ninstance.beta.name = linear(1)\n");
  const SweepTable t = causal_sweep(inst, {0.5, 0.25}, 0.0, OptimizeConfig{});
  for (const SweepRow& r : t.rows) {
    EXPECT_EQ(r.err_L2H, 0.0);
    EXPECT_EQ(r.err_final, 0.0);
  }
  EXPECT_FALSE(t.slope.has_value());
}

TEST(CausalSweep, WarmAndColdAgree) {
  const ProblemInstance inst = builtin("kirchhoff", 16, 32);
  SweepOptions cold;
  cold.warm_start = false;
  cold.workers = 2;
  OptimizeConfig opt;
  opt.g_tol = 1e-9;
  const SweepTable a = causal_sweep(inst, {0.5, 0.25}, 0.0, opt);
  const SweepTable b = causal_sweep(inst, {0.5, 0.25}, 0.0, opt, cold);
  for (std::size_t i = 0; i < 2; ++i) EXPECT_NEAR(a.rows[i].err_L2H, b.rows[i].err_L2H, 1e-6);
}

TEST(CausalSweep, InvalidInputs) {
  const ProblemInstance inst = builtin("heat", 8, 16);
  EXPECT_THROW(causal_sweep(inst, {}, 0.0, OptimizeConfig{}), ConfigError);
  EXPECT_THROW(causal_sweep(inst, {0.25, 0.5}, 0.0, OptimizeConfig{}), ConfigError);
  EXPECT_THROW(causal_sweep(inst, {0.25, -0.1}, 0.0, OptimizeConfig{}), ConfigError);
  EXPECT_THROW(causal_sweep(inst, {0.25, 0.25}, 0.0, OptimizeConfig{}), ConfigError);
}

TEST(CausalSweep, Deterministic) {
  const ProblemInstance inst = builtin("rational", 16, 32);
  const SweepTable a = causal_sweep(inst, {0.5, 0.25}, 0.0, OptimizeConfig{});
  const SweepTable b = causal_sweep(inst, {0.5, 0.25}, 0.0, OptimizeConfig{});
  for (std::size_t i = 0; i < 2; ++i) {
    EXPECT_EQ(a.rows[i].err_L2H, b.rows[i].err_L2H);
    EXPECT_EQ(a.rows[i].iterations, b.rows[i].iterations);
  }
}

TEST(LambdaSweep, SmoothBetaApproachesUnregularized) {
  for (const std::string name : {"kirchhoff", "heat"}) {
    const ProblemInstance inst = builtin(name, 16, 32);
    OptimizeConfig opt;
    opt.g_tol = 1e-9;
    const SweepTable t = lambda_sweep(inst, 0.25, {0.1, 0.01, 0.001, 0.0}, opt);
    ASSERT_EQ(t.rows.size(), 4u);
    for (std::size_t i = 1; i < 3; ++i) EXPECT_LT(t.rows[i].err_L2H, t.rows[i - 1].err_L2H) << name;
    EXPECT_EQ(t.rows[3].err_L2H, 0.0);
    ASSERT_TRUE(t.reference.has_value());
  }
}

TEST(LambdaSweep, NonsmoothUsesCauchyDistances) {
  const ProblemInstance inst = builtin("nonsmooth", 16, 32);
  const SweepTable t = lambda_sweep(inst, 0.25, {0.1, 0.05, 0.025}, OptimizeConfig{});
  EXPECT_EQ(t.rows[0].cauchy_L2H, 0.0);
  for (std::size_t i = 1; i < 3; ++i) EXPECT_GT(t.rows[i].cauchy_L2H, 0.0);
  EXPECT_LT(t.rows[2].cauchy_L2H, t.rows[1].cauchy_L2H);
  EXPECT_FALSE(t.reference.has_value());
  EXPECT_THROW(lambda_sweep(inst, 0.25, {0.1, 0.0}, OptimizeConfig{}), ConfigError);
}

TEST(LambdaSweep, SingleRowAndOrdering) {
  const ProblemInstance inst = builtin("kirchhoff", 8, 16);
  const SweepTable t = lambda_sweep(inst, 0.25, {0.05}, OptimizeConfig{});
  ASSERT_EQ(t.rows.size(), 1u);
  EXPECT_EQ(t.rows[0].lambda, 0.05);
  EXPECT_THROW(lambda_sweep(inst, 0.25, {0.01, 0.1}, OptimizeConfig{}), ConfigError);
  EXPECT_THROW(lambda_sweep(inst, 0.25, {0.1, -0.1}, OptimizeConfig{}), ConfigError);
}

TEST(AssumptionConstants, ClosedForms) {
  const ProblemInstance inst = instance("instance.N = 16\ninstance.alpha = 0.5\ninstance.g.name = quadratic\n"
                                        "instance.kernel.name = delta\n");
  const AssumptionConstants c = assumption_constants(inst, 2.0);
  const double k = c.kernel_norm;
  EXPECT_GT(k, 0.0);
  EXPECT_DOUBLE_EQ(c.c4, 4.0);
  EXPECT_DOUBLE_EQ(c.c10, 0.5);
  EXPECT_DOUBLE_EQ(c.c12, 0.25);
  EXPECT_DOUBLE_EQ(c.c7, std::pow(1 + k * k * 4, 2));
  EXPECT_DOUBLE_EQ(c.c11, (c.c7 + 1) / 2);
  EXPECT_DOUBLE_EQ(c.c13, c.c8 * c.c8 / (2 * c.c10));
}

TEST(VerifyAssumptions, ConstantCoefficientIsExact) {
  const ProblemInstance inst = builtin("heat", 16, 16);
  const AssumptionReport rep = verify_assumptions(inst, 1.0, 200, 3);
  EXPECT_TRUE(rep.dissipation_pass);
  for (const InequalityRecord& r : rep.records) {
    EXPECT_EQ(r.sample_count, 200) << r.name;
    if (r.constant_name == "c5" || r.constant_name == "c8" || r.constant_name == "c9") {
      EXPECT_EQ(r.worst_ratio, 0.0) << r.name;
    }
  }
}

TEST(VerifyAssumptions, BuiltinsPassAndAreDeterministic) {
  for (const std::string name : {"kirchhoff", "rational"}) {
    const ProblemInstance inst = builtin(name, 16, 16);
    const AssumptionReport a = verify_assumptions(inst, 2.0, 1000, 11);
    const AssumptionReport b = verify_assumptions(inst, 2.0, 1000, 11);
    EXPECT_TRUE(a.dissipation_pass) << name;
    EXPECT_TRUE(a.potential_pass) << name;
    ASSERT_EQ(a.records.size(), b.records.size());
    for (std::size_t i = 0; i < a.records.size(); ++i) {
      EXPECT_EQ(a.records[i].worst_ratio, b.records[i].worst_ratio);
      EXPECT_LE(a.records[i].worst_ratio, 1 + kRatioSlack) << name << " " << a.records[i].name;
    }
  }
}

TEST(VerifyAssumptions, FailureKeepsWitness) {
  ProblemInstance inst = builtin("kirchhoff", 8, 8);
  const AssumptionReport rep = verify_assumptions(inst, 1.0, 100, 1);
  for (const InequalityRecord& r : rep.records)
    if (!r.pass) EXPECT_FALSE(r.witness.empty());
  EXPECT_THROW(verify_assumptions(inst, 0.0, 10, 1), ConfigError);
  EXPECT_THROW(verify_assumptions(inst, 1.0, 99, 1), ConfigError);
}

TEST(SmoothSample, PinnedAndFirstOrderChainDefect) {
  const ProblemInstance inst = builtin("kirchhoff", 16, 32);
  const Trajectory t = smooth_sample_trajectory(inst, 32);
  EXPECT_TRUE(t.state(0) == inst.u0);
  EXPECT_NEAR(t.state(32)(3), std::cos(1.0) * inst.u0(3) + 0.5 * std::sin(1.0) * sine_mode(inst.grid, 2)(3), 1e-15);
  const double a = chain_rule_check(t, inst, WedConfig{0.25, 0.0, 32});
  ProblemInstance fine = inst;
  fine.steps = 64;
  const double b = chain_rule_check(smooth_sample_trajectory(fine, 64), fine, WedConfig{0.25, 0.0, 64});
  EXPECT_NEAR(a / b, 2.0, 0.3);
}
