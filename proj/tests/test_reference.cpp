#include "oracles.hpp"
#include "support.hpp"

#include "wed/reference.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace wed;
using testing_support::builtin;
using testing_support::instance;

TEST(Step, RestStateStays) {
  const ProblemInstance inst = builtin("kirchhoff", 8, 16);
  EXPECT_EQ(step(Vector::Zero(8), 0.1, inst, StepperConfig{}), Vector::Zero(8));
  EXPECT_THROW(step(inst.u0, 0.0, inst, StepperConfig{}), ConfigError);
}

TEST(Step, LinearCasesMatchDenseSolve) {
  const int n = 12;
  const double tau = 0.05;
  const double mu = oracle::sine_eigenvalue(n, 1);
  const ProblemInstance heat = instance("instance.N = 12\n");
  const ProblemInstance react = instance("instance.N = 12\ninstance.beta.name = linear(1)\n");
  const Matrix A = oracle::laplacian(n, heat.grid.spacing());
  const Matrix I = Matrix::Identity(n, n);
  EXPECT_LT((step(heat.u0, tau, heat, StepperConfig{}) - heat.u0 / (1 + tau * mu)).norm(), 1e-12);
  EXPECT_LT((step(heat.u0, tau, heat, StepperConfig{}) - (I + tau * A).ldlt().solve(heat.u0)).norm(), 1e-12);
  EXPECT_LT((step(react.u0, tau, react, StepperConfig{}) - react.u0 / (1 + tau * (mu + 1))).norm(), 1e-12);
}

TEST(Step, ImplicitCoefficientSolvesItsEquation) {
  const ProblemInstance inst = builtin("kirchhoff", 16, 16);
  StepperConfig cfg;
  cfg.g_evaluation = CoefficientEvaluation::implicit;
  const double tau = 0.05;
  const Vector u = step(inst.u0, tau, inst, cfg);
  const Matrix K = oracle::convolution_matrix(inst.dissipation.kernel(), inst.grid.spacing());
  const Vector ku = K * u;
  const Vector g = (1.0 + ku.array().square()).matrix();
  const Vector res = g.cwiseProduct(u - inst.u0) / tau + oracle::laplacian(16, inst.grid.spacing()) * u + u;
  EXPECT_LT(inst.grid.norm(res), 1e-9);
  const Vector lagged = step(inst.u0, tau, inst, StepperConfig{});
  EXPECT_LT(inst.grid.norm((u - lagged).eval()), 0.1);
}

TEST(SolveFlow, ZeroDatumGivesZeroTrajectory) {
  const ProblemInstance inst = instance("instance.N = 6\ninstance.u0.name = table\ninstance.u0.table = 0,0,0,0,0,0\n");
  EXPECT_EQ(solve_flow(inst, StepperConfig{}).states().norm(), 0.0);
}

TEST(SolveFlow, HeatClosedRecursion) {
  const ProblemInstance inst = builtin("heat", 32, 128);
  StepperConfig cfg;
  cfg.steps = 128;
  const Trajectory t = solve_flow(inst, cfg);
  const double mu = oracle::sine_eigenvalue(32, 1);
  for (int m = 0; m <= 128; ++m) {
    const Vector exact = inst.u0 / std::pow(1 + t.tau() * mu, m);
    EXPECT_LT(inst.grid.norm((t.state(m) - exact).eval()), 1e-11) << m;
  }
}

TEST(SolveFlow, EnergyDecayAndRateControlOnBuiltins) {
  for (const std::string name : {"heat", "kirchhoff", "rational", "nonsmooth"}) {
    for (CoefficientEvaluation mode : {CoefficientEvaluation::lagged, CoefficientEvaluation::implicit}) {
      const ProblemInstance inst = builtin(name, 32, 128);
      StepperConfig cfg;
      cfg.steps = 128;
      cfg.g_evaluation = mode;
      const Trajectory t = solve_flow(inst, cfg);
      double rates = 0.0;
      for (int m = 1; m <= 128; ++m) {
        EXPECT_LE(phi(inst, t.state(m)), phi(inst, t.state(m - 1))) << name << " step " << m;
        rates += t.tau() * inst.grid.inner(t.rate(m), t.rate(m));
        EXPECT_LE(inst.grid.norm(t.state(m)), inst.grid.norm(inst.u0) * (1 + 1e-12)) << name;
      }
      EXPECT_TRUE(t.states().allFinite());
      EXPECT_LE(rates, 2.0 / inst.dissipation.alpha() * phi(inst, inst.u0) * (1 + 1e-9)) << name;
    }
  }
}

TEST(SolveFlow, FirstOrderSelfConvergence) {
  const ProblemInstance inst = builtin("kirchhoff", 32, 256);
  auto final_state = [&](int steps) {
    StepperConfig cfg;
    cfg.steps = steps;
    return Vector(solve_flow(inst, cfg).state(steps));
  };
  const Vector a = final_state(256), b = final_state(512), c = final_state(1024);
  const double order = std::log2(inst.grid.norm((a - b).eval()) / inst.grid.norm((b - c).eval()));
  EXPECT_NEAR(order, 1.0, 0.15);
}

TEST(SolveFlow, NewtonFailureNamesTheTime) {
  const ProblemInstance inst = builtin("kirchhoff", 16, 8);
  StepperConfig cfg;
  cfg.steps = 8;
  cfg.newton_max = 1;
  cfg.newton_tol = 1e-300;
  try {
    solve_flow(inst, cfg);
    FAIL();
  } catch (const NumericalError& e) {
    EXPECT_NE(std::string(e.what()).find("step failure at t"), std::string::npos);
  }
}
