#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "ladder/kappa.hpp"
#include "oracles.hpp"

using namespace ladder;

TEST(GAnyBeta, ReflectionAboveOne) {
  const auto p = validate(0.8, 0.25);
  const double want = std::log1p(-0.5) - std::log1p(-std::pow(0.5, 0.8)) + 0.2 * std::log(2.0);
  EXPECT_NEAR(g_any_beta(p, 2.0).value, want, 1e-12);
  EXPECT_NEAR(g_any_beta(p, 2.0).value, oracle::g(0.8, 0.25, 2.0), 1e-10);
}

TEST(GAnyBeta, BandUsesQuadrature) {
  const auto p = validate(std::sqrt(2.0), 0.5);
  EXPECT_EQ(g_any_beta(p, 1.0).method, MethodChoice::Quadrature);
  EXPECT_EQ(g_any_beta(p, 0.97, MethodChoice::Series).method, MethodChoice::Quadrature);
  EXPECT_EQ(gprime_any_beta(p, 1.02).method, MethodChoice::Quadrature);
  EXPECT_EQ(g_any_beta(p, 0.3).method, MethodChoice::Series);
  EXPECT_EQ(g_any_beta(validate(0.8, 0.25), 0.3).method, MethodChoice::Doney);
}

TEST(GAnyBeta, ZeroAndInvalid) {
  const auto p = validate(1.3, 0.5);
  EXPECT_EQ(g_any_beta(p, 0.0).value, 0.0);
  EXPECT_THROW(g_any_beta(p, -0.1), OutOfRange);
  EXPECT_THROW(g_any_beta(p, std::nan("")), OutOfRange);
  EXPECT_THROW(g_any_beta(p, std::numeric_limits<double>::infinity()), OutOfRange);
}

TEST(GAnyBeta, MethodsAgreeOnIrrationalAlpha) {
  Tolerance tol{1e-11};
  for (double alpha : {std::sqrt(2.0), std::sqrt(3.0), 2.0 - std::sqrt(2.0)}) {
    const double rho = 0.5 * (std::max(0.0, 1.0 - 1.0 / alpha) + std::min(1.0, 1.0 / alpha));
    const auto p = validate(alpha, rho);
    for (double beta : {0.1, 0.6, 0.9, 1.0, 1.3, 4.0, 20.0}) {
      const auto s = g_any_beta(p, beta, MethodChoice::Series, tol);
      const auto q = g_any_beta(p, beta, MethodChoice::Quadrature, tol);
      EXPECT_NEAR(s.value, q.value, 1e-9) << alpha << ' ' << beta;
      const auto ds = gprime_any_beta(p, beta, MethodChoice::Series, tol);
      const auto dq = gprime_any_beta(p, beta, MethodChoice::Quadrature, tol);
      EXPECT_NEAR(ds.value, dq.value, 1e-9) << alpha << ' ' << beta;
      EXPECT_NEAR(s.value, oracle::g(alpha, rho, beta), 1e-9 + s.abs_error_bound);
    }
  }
}

TEST(GAnyBeta, ReflectionResidualSmall) {
  for (double alpha : {0.7, 1.0, std::sqrt(2.0), 1.9}) {
    const double rho = 0.5 * (std::max(0.0, 1.0 - 1.0 / alpha) + std::min(1.0, 1.0 / alpha));
    const auto p = validate(alpha, rho);
    for (double beta : {0.1, 0.5, 0.8}) {
      const auto lo = g_any_beta(p, beta);
      const auto hi = g_any_beta(p, 1.0 / beta);
      const double residual = hi.value - lo.value - alpha * rho * std::log(1.0 / beta);
      EXPECT_LE(std::fabs(residual), hi.abs_error_bound + lo.abs_error_bound + 1e-14);
    }
  }
}

TEST(GPrimeAnyBeta, RationalAutoAgreesWithIntegral) {
  const auto p = validate(0.5, 0.3);
  const auto r = gprime_any_beta(p, 0.4);
  EXPECT_EQ(r.method, MethodChoice::Rational);
  EXPECT_NEAR(r.value, oracle::gprime(0.5, 0.3, 0.4), 1e-9);
  EXPECT_NEAR(gprime_any_beta(p, 2.5).value, oracle::gprime(0.5, 0.3, 2.5), 1e-9);
}

TEST(GPrimeAnyBeta, LimitAtZero) {
  // alpha > 1: g'(0) = sin(pi rho) / sin(pi / alpha), rational alpha included.
  for (double alpha : {1.5, std::sqrt(2.0)}) {
    const auto p = validate(alpha, 0.5);
    const double at0 = gprime_any_beta(p, 0.0).value;
    EXPECT_NEAR(at0, 1.0 / std::sin(std::numbers::pi / alpha), 1e-15);
    // the correction is of order beta^(alpha - 1)
    const double beta = 1e-9;
    EXPECT_NEAR(at0, gprime_any_beta(p, beta).value, 10.0 * std::pow(beta, alpha - 1.0));
  }
  EXPECT_THROW(gprime_any_beta(validate(0.7, 0.5), 0.0), OutOfRange);
}

// ---------------------------------------------------------------------------

TEST(Kappa, BetaZeroIsPowerExactly) {
  const auto p = validate(1.3, 0.4);
  for (double gamma : {0.1, 1.0, 3.7}) {
    EXPECT_EQ(kappa(p, {gamma, 0.0}).value, std::pow(gamma, 0.4));
  }
}

TEST(Kappa, DoneyExample) {
  const auto p = validate(0.8, 0.25);
  const double want = (1.0 - 0.5) / (1.0 - std::pow(0.5, 0.8));
  EXPECT_NEAR(kappa(p, {1.0, 0.5}).value, want, 1e-12);
  EXPECT_NEAR(want, 1.1747, 1e-4);
}

TEST(Kappa, ScalingIdentity) {
  // kappa(gamma, beta) = gamma^rho kappa(1, beta gamma^(-1/alpha))
  const auto p = validate(std::sqrt(2.0), 0.45);
  for (double gamma : {0.2, 1.0, 5.0}) {
    for (double beta : {0.05, 0.5, 2.0}) {
      const double scaled = beta * std::pow(gamma, -1.0 / p.alpha());
      const double lhs = kappa(p, {gamma, beta}).value;
      const double rhs = std::pow(gamma, p.rho()) * kappa(p, {1.0, scaled}).value;
      EXPECT_EQ(lhs, rhs) << gamma << ' ' << beta;
      EXPECT_NEAR(lhs, kappa(p, {gamma, beta}, MethodChoice::Quadrature).value, 1e-8 * lhs);
    }
  }
}

TEST(Kappa, IncreasingInBeta) {
  const auto p = validate(1.7, 0.5);
  double previous = 0.0;
  for (int i = 0; i < 50; ++i) {
    const double beta = 0.1 * i;
    const double v = kappa(p, {1.3, beta}).value;
    EXPECT_GT(v, previous) << beta;
    previous = v;
  }
}

TEST(Kappa, RejectsBadQuery) {
  const auto p = validate(1.0, 0.5);
  EXPECT_THROW(kappa(p, {0.0, 1.0}), OutOfRange);
  EXPECT_THROW(kappa(p, {1.0, -1.0}), OutOfRange);
}

// ---------------------------------------------------------------------------

TEST(ExitTransform, SymmetricBitForBit) {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> d(0.0, 4.0);
  const auto p = validate(1.2, 0.55);
  for (int i = 0; i < 30; ++i) {
    const double eta = 0.1 + d(rng), gamma = d(rng), theta = d(rng);
    EXPECT_EQ(exit_transform(p, eta, gamma, theta).value,
              exit_transform(p, eta, theta, gamma).value);
  }
}

TEST(ExitTransform, GammaZeroReducesToSingleKappa) {
  const auto p = validate(0.8, 0.25);
  const double eta = 2.0, theta = 0.7;
  const double want = 1.0 / (theta * std::pow(eta, 0.25) * kappa(p, {eta, theta}).value);
  EXPECT_NEAR(exit_transform(p, eta, 0.0, theta).value, want, 1e-15 * want);
}

TEST(ExitTransform, Errors) {
  const auto p = validate(0.8, 0.25);
  EXPECT_THROW(exit_transform(p, 1.0, 0.0, 0.0), DivisionByZero);
  EXPECT_THROW(exit_transform(p, 0.0, 1.0, 1.0), OutOfRange);
  EXPECT_THROW(exit_transform(p, 1.0, -1.0, 1.0), OutOfRange);
}
