#include "oracles.hpp"

#include "wed/moreau_yosida.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace wed;

TEST(ResolventA, IdentityAtZeroAndSineMode) {
  const SpatialGrid g = SpatialGrid::unit_interval(16);
  const Vector u = sine_mode(g, 1);
  EXPECT_EQ(resolve_A(g, u, 0.0), u);
  const double mu = oracle::sine_eigenvalue(16, 1);
  for (double lam : {0.01, 0.1, 1.0}) {
    EXPECT_LT((resolve_A(g, u, lam) - u / (1 + lam * mu)).norm(), 1e-12);
    EXPECT_LT((yosida_A(g, u, lam) - mu / (1 + lam * mu) * u).norm(), 1e-10 * mu);
    const Matrix dense = Matrix::Identity(16, 16) + lam * oracle::laplacian(16, g.spacing());
    EXPECT_LT((resolve_A(g, u, lam) - dense.ldlt().solve(u)).norm(), 1e-12);
  }
  EXPECT_THROW(yosida_A(g, u, 0.0), ConfigError);
  EXPECT_EQ(yosida_A(g, Vector::Zero(16), 0.1), Vector::Zero(16));
}

TEST(ResolventA, ContractionAndIdentity) {
  const SpatialGrid g = SpatialGrid::unit_interval(12);
  std::mt19937_64 rng(4);
  for (int s = 0; s < 30; ++s) {
    const Vector u = oracle::random_vector(rng, 12, 1.0), w = oracle::random_vector(rng, 12, 1.0);
    const double lam = 0.05;
    EXPECT_LE(g.norm((resolve_A(g, u, lam) - resolve_A(g, w, lam)).eval()), g.norm((u - w).eval()) + 1e-15);
    const Vector lhs = yosida_A(g, u, lam), rhs = apply_A(g, resolve_A(g, u, lam));
    EXPECT_LT((lhs - rhs).norm(), 1e-9 * rhs.norm());
  }
}

TEST(ResolveBeta, ClosedForms) {
  EXPECT_NEAR(resolve_beta(linear_potential(1.0), 3.0, 0.5), 3.0 / 1.5, 1e-12);
  EXPECT_EQ(resolve_beta(zero_potential(), -2.5, 0.7), -2.5);
  const double r = resolve_beta(linear_plus_sign_potential(1.0, 1.0), 2.0, 1.0);
  const double oracle_r = oracle::bisect([](double x) { return x + (x + (x > 0) - (x < 0)) - 2.0; }, -10, 10);
  EXPECT_NEAR(r, 0.5, 1e-12);
  EXPECT_NEAR(r, oracle_r, 1e-12);
  // Inside the jump the resolvent sits at the kink.
  EXPECT_EQ(resolve_beta(linear_plus_sign_potential(1.0, 1.0), 0.5, 1.0), 0.0);
}

TEST(ResolveBeta, NonMonotoneGraphFailsBracketing) {
  ConvexPotential bad = linear_potential(1.0);
  bad.lower = bad.upper = [](double r) { return -2.0 * r; };
  bad.slope = [](double) { return -2.0; };
  EXPECT_THROW(resolve_beta(bad, 1.0, 1.0), NumericalError);
}

TEST(RegularizedEnergies, BelowAndMonotoneInLambda) {
  const SpatialGrid g = SpatialGrid::unit_interval(10);
  const ConvexPotential beta = linear_plus_sign_potential(1.0, 0.5);
  std::mt19937_64 rng(9);
  for (int s = 0; s < 100; ++s) {
    const Vector u = oracle::random_vector(rng, 10, 2.0);
    double prev1 = phi1(g, u), prev2 = phi2(beta, g, u);
    for (double lam : {0.001, 0.01, 0.1, 1.0}) {
      const double p1 = phi1_lambda(g, u, lam), p2 = phi2_lambda(beta, g, u, lam);
      EXPECT_LE(p1, prev1 * (1 + 1e-12));
      EXPECT_LE(p2, prev2 * (1 + 1e-12));
      const double d = g.norm((u - resolve_phi2(beta, u, lam)).eval());
      EXPECT_LE(d * d, 2 * lam * p2 * (1 + 1e-12));
      prev1 = p1;
      prev2 = p2;
    }
  }
  EXPECT_EQ(phi1_lambda(g, Vector::Zero(10), 0.1), 0.0);
  EXPECT_EQ(phi2_lambda(beta, g, Vector::Zero(10), 0.1), 0.0);
}

TEST(RegularizedEnergies, QuadraticDensityMatchesScalarInf) {
  const SpatialGrid g = SpatialGrid::unit_interval(2);
  const double lam = 0.3, s = 1.7;
  Vector u = Vector::Constant(2, s);
  // Grid minimization of |s - r|^2/(2 lam) + r^2/2.
  double best = 1e300;
  for (int i = 0; i <= 200000; ++i) {
    const double r = -3 + 6.0 * i / 200000;
    best = std::min(best, (s - r) * (s - r) / (2 * lam) + r * r / 2);
  }
  EXPECT_NEAR(phi2_lambda(linear_potential(1.0), g, u, lam) / (2 * g.spacing()), s * s / (2 * (1 + lam)), 1e-12);
  EXPECT_NEAR(best, s * s / (2 * (1 + lam)), 1e-8);
}

TEST(YosidaBeta, GradientAndSelection) {
  const SpatialGrid g = SpatialGrid::unit_interval(8);
  const double lam = 0.2;
  const Vector u = Vector::LinSpaced(8, -1.3, 1.1);
  EXPECT_LT((d_phi2_lambda(linear_potential(1.0), u, lam) - u / (1 + lam)).norm(), 1e-12);
  EXPECT_EQ(d_phi2_lambda(linear_plus_sign_potential(1.0, 1.0), Vector::Zero(8), lam), Vector::Zero(8));
  const ConvexPotential beta = linear_plus_sign_potential(1.0, 0.5);
  const Vector grad = d_phi2_lambda(beta, u, lam);
  const Vector fd =
      oracle::central_gradient([&](const Vector& x) { return phi2_lambda(beta, g, x, lam); }, u, 1e-6) / g.spacing();
  EXPECT_LT((fd - grad).norm(), 1e-6 * grad.norm());
  const Vector r = resolve_phi2(beta, u, lam);
  for (int i = 0; i < 8; ++i) {
    EXPECT_GE(grad(i), beta.lower(r(i)) - 1e-9);
    EXPECT_LE(grad(i), beta.upper(r(i)) + 1e-9);
  }
  std::mt19937_64 rng(1);
  for (int s = 0; s < 20; ++s) {
    const Vector a = oracle::random_vector(rng, 8, 2.0), b = oracle::random_vector(rng, 8, 2.0);
    EXPECT_LE(g.norm((d_phi2_lambda(beta, a, lam) - d_phi2_lambda(beta, b, lam)).eval()),
              g.norm((a - b).eval()) / lam + 1e-12);
    EXPECT_LE(g.norm((resolve_phi2(beta, a, lam) - resolve_phi2(beta, b, lam)).eval()), g.norm((a - b).eval()) + 1e-12);
  }
}
