#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "ladder/quadrature.hpp"
#include "oracles.hpp"

using namespace ladder;

namespace {

QuadConfig cfg(double tol = 1e-11) {
  QuadConfig c;
  c.abs_tol = tol;
  return c;
}

}  // namespace

// The 15-point Kronrod rule integrates polynomials up to degree 22 exactly.
TEST(GaussKronrod, PolynomialExactness) {
  for (int degree = 0; degree <= 22; ++degree) {
    auto f = [&](double x) { return std::pow(x, degree); };
    const double a = -0.3, b = 1.7;
    const auto r = detail::gauss_kronrod_15(f, a, b);
    const double want = (std::pow(b, degree + 1) - std::pow(a, degree + 1)) / (degree + 1);
    EXPECT_NEAR(r.value, want, 1e-14 * std::max(1.0, std::fabs(want))) << degree;
  }
}

TEST(Integrate, EndpointSingularity) {
  const auto r = integrate([](double x) { return std::sqrt(x); }, 0.0, 1.0, cfg(1e-12));
  EXPECT_NEAR(r.value, 2.0 / 3.0, 1e-12);
  EXPECT_LE(r.abs_error, 1e-12);
}

TEST(Integrate, BudgetExhaustionThrows) {
  QuadConfig c = cfg(1e-15);
  c.max_refinements = 1;
  EXPECT_THROW(integrate([](double x) { return 1.0 / std::sqrt(x); }, 0.0, 1.0, c),
               ConvergenceFailure);
}

TEST(GQuad, DoneyExampleClosedForm) {
  const auto p = validate(0.8, 0.25);
  const double beta = 0.5;
  const auto r = g_quad(p, beta, cfg());
  EXPECT_NEAR(r.value, std::log1p(-beta) - std::log1p(-std::pow(beta, 0.8)), 1e-10);
  EXPECT_NEAR(r.value, 0.1610, 5e-5);
  EXPECT_EQ(r.method, MethodChoice::Quadrature);
  EXPECT_GT(r.terms_or_nodes_used, 0);
}

TEST(GQuad, SpectrallyOneSidedIsLogOnePlusBeta) {
  const auto p = validate(1.5, 2.0 / 3.0);
  EXPECT_NEAR(g_quad(p, 0.5, cfg()).value, std::log(1.5), 1e-10);
  EXPECT_NEAR(gprime_quad(p, 0.5, cfg()).value, 2.0 / 3.0, 1e-10);
}

TEST(GQuad, VanishesContinuouslyAtZero) {
  const auto p = validate(1.2, 0.4);
  EXPECT_EQ(g_quad(p, 0.0, cfg()).value, 0.0);
  double previous = 1.0;
  for (double beta : {1e-2, 1e-4, 1e-6, 1e-8}) {
    const double v = g_quad(p, beta, cfg()).value;
    EXPECT_LT(v, previous);
    previous = v;
  }
  EXPECT_LT(previous, 1e-6);
  EXPECT_THROW(g_quad(p, -1.0, cfg()), OutOfRange);
}

TEST(GPrimeQuad, DoneyExampleClosedForm) {
  const auto p = validate(0.8, 0.25);
  const double b = 0.5, a = 0.8;
  const double want = -1.0 / (1.0 - b) + a * std::pow(b, a - 1.0) / (1.0 - std::pow(b, a));
  EXPECT_NEAR(gprime_quad(p, b, cfg()).value, want, 1e-10);
}

TEST(GQuad, AgreesWithIndependentQuadrature) {
  for (double alpha : {0.3, 0.8, 1.0, std::sqrt(2.0), 1.9}) {
    const double lo = std::max(0.02, 1.0 - 1.0 / alpha), hi = std::min(0.98, 1.0 / alpha);
    for (double t : {0.0, 0.5, 1.0}) {
      const double rho = lo + t * (hi - lo);
      const auto p = validate(alpha, rho);
      for (double beta : {0.05, 0.5, 0.97, 3.0}) {
        const auto r = g_quad(p, beta, cfg());
        EXPECT_NEAR(r.value, oracle::g(alpha, rho, beta), 1e-10 + r.abs_error_bound)
            << alpha << ' ' << rho << ' ' << beta;
        const auto d = gprime_quad(p, beta, cfg());
        EXPECT_NEAR(d.value, oracle::gprime(alpha, rho, beta), 1e-10 + d.abs_error_bound)
            << alpha << ' ' << rho << ' ' << beta;
      }
    }
  }
}

TEST(GQuad, PositiveOnGrid) {
  for (double alpha : {0.2, 0.7, 1.0, 1.4, 2.0}) {
    const double lo = std::max(0.01, 1.0 - 1.0 / alpha), hi = std::min(0.99, 1.0 / alpha);
    for (double t : {0.0, 0.25, 0.5, 0.75, 1.0}) {
      const auto p = validate(alpha, lo + t * (hi - lo));
      for (double beta : {1e-3, 0.2, 1.0, 7.0}) {
        EXPECT_GT(g_quad(p, beta, cfg(1e-9)).value, 0.0);
        EXPECT_GT(gprime_quad(p, beta, cfg(1e-9)).value, 0.0);
      }
    }
  }
}

TEST(GQuad, ReflectionIdentity) {
  for (double alpha : {0.6, std::sqrt(2.0), 1.8}) {
    const double rho = 0.5 * (std::max(0.0, 1.0 - 1.0 / alpha) + std::min(1.0, 1.0 / alpha));
    const auto p = validate(alpha, rho);
    for (double beta : {1.5, 2.0, 5.0}) {
      const auto hi = g_quad(p, beta, cfg());
      const auto lo = g_quad(p, 1.0 / beta, cfg());
      EXPECT_NEAR(hi.value - lo.value, alpha * rho * std::log(beta),
                  hi.abs_error_bound + lo.abs_error_bound);
    }
  }
}

TEST(GQuad, CentralDifferenceMatchesDerivative) {
  const double h = 1e-5;
  for (double alpha : {0.5, 1.1, 1.7}) {
    for (double t : {0.2, 0.8}) {
      const double lo = std::max(0.0, 1.0 - 1.0 / alpha), hi = std::min(1.0, 1.0 / alpha);
      const auto p = validate(alpha, lo + t * (hi - lo));
      for (double beta : {0.3, 0.7, 2.0}) {
        const double fd =
            (g_quad(p, beta + h, cfg(1e-13)).value - g_quad(p, beta - h, cfg(1e-13)).value) / (2 * h);
        EXPECT_NEAR(fd, gprime_quad(p, beta, cfg()).value, 1e-6);
      }
    }
  }
}

TEST(GQuad, NearDegenerateDenominator) {
  // rho close to 1 puts a sharp peak near x = beta.
  const auto p = validate(0.5, 0.97);
  for (double beta : {0.1, 0.6, 2.5}) {
    const auto r = g_quad(p, beta, cfg());
    EXPECT_NEAR(r.value, oracle::g(0.5, 0.97, beta), 1e-10 + r.abs_error_bound);
  }
}

TEST(GQuad, TighterToleranceNeverLoosensEstimate) {
  const auto p = validate(std::sqrt(3.0), 0.5);
  double previous = std::numeric_limits<double>::infinity();
  for (double tol : {1e-4, 1e-6, 1e-8, 1e-10, 1e-12}) {
    const auto r = g_quad(p, 0.7, cfg(tol));
    EXPECT_LE(r.abs_error_bound, previous * (1 + 1e-12));
    EXPECT_LE(r.abs_error_bound, tol);
    previous = r.abs_error_bound;
  }
}

TEST(GQuad, DeterministicAcrossRuns) {
  const auto p = validate(1.3, 0.45);
  const auto a = g_quad(p, 0.77, cfg());
  const auto b = g_quad(p, 0.77, cfg());
  EXPECT_EQ(a.value, b.value);
  EXPECT_EQ(a.abs_error_bound, b.abs_error_bound);
  EXPECT_EQ(a.terms_or_nodes_used, b.terms_or_nodes_used);
}
