#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "ladder/quadrature.hpp"
#include "ladder/series.hpp"
#include "ladder/special.hpp"
#include "oracles.hpp"

using namespace ladder;

TEST(FindDoneyCase, Examples) {
  EXPECT_EQ(find_doney_case(validate(0.8, 0.25)), (DoneyCase{1, 1}));
  EXPECT_EQ(find_doney_case(validate(2.0, 0.5)), (DoneyCase{1, 3}));
  EXPECT_FALSE(find_doney_case(validate(std::sqrt(2.0), 0.5), 20));
  EXPECT_THROW(find_doney_case(validate(0.8, 0.25), 0), OutOfRange);
}

TEST(FindDoneyCase, ReturnsSmallestK) {
  // 1.5, rho = 2/3: rho + 2 = 4 / 1.5 and rho + 4 = 7 / 1.5
  EXPECT_EQ(find_doney_case(validate(1.5, 2.0 / 3.0)), (DoneyCase{2, 4}));
}

TEST(GkSeries, Basics) {
  for (double x : {-0.7, 0.2, 0.9}) {
    EXPECT_NEAR(g_k_series(0.37, x, 1, 2000), -std::log1p(-x), 1e-13);
    EXPECT_EQ(g_k_series(0.37, x, 0, 50), 0.0);
    EXPECT_EQ(g_k_closed(0.37, x, 0), 0.0);
  }
  EXPECT_NEAR(g_k_series(0.37, 0.5, 2, 200), g_k_closed(0.37, 0.5, 2), 1e-12);
  EXPECT_THROW(g_k_series(0.3, 1.0, 2, 10), OutOfRange);
}

TEST(GkClosed, Examples) {
  EXPECT_DOUBLE_EQ(g_k_closed(0.2, 0.4, 1), -std::log1p(-0.4));
  EXPECT_NEAR(g_k_closed(0.5, 0.6, 2), -std::log(0.36 + 1.0), 1e-15);
  EXPECT_NEAR(g_k_closed(0.21, 0.6, 4), g_k_series(0.21, 0.6, 4, 400), 1e-10);
}

// |g_k_series(M) - g_k_closed| <= k |x|^(M+1) / ((M+1)(1 - |x|))
TEST(GkClosed, SeriesConvergesWithinGeometricBound) {
  for (int k = 0; k <= 8; ++k) {
    for (double a : {0.13, 0.5, 0.77, 1.31}) {
      for (double x : {-0.9, -0.4, 0.3, 0.9}) {
        const double closed = g_k_closed(a, x, k);
        for (std::int64_t m : {10, 50, 200}) {
          const double bound =
              k * std::pow(std::fabs(x), m + 1.0) / ((m + 1.0) * (1.0 - std::fabs(x))) + 1e-13;
          EXPECT_LE(std::fabs(g_k_series(a, x, k, m) - closed), bound)
              << "k=" << k << " a=" << a << " x=" << x << " M=" << m;
        }
      }
    }
  }
}

TEST(GDoney, KEqualsLEqualsOne) {
  const auto p = validate(0.8, 0.25);
  for (double beta : {0.1, 0.5, 0.9}) {
    const auto r = g_doney(p, beta, {1, 1});
    EXPECT_NEAR(r.value, std::log1p(-beta) - std::log1p(-std::pow(beta, 0.8)), 1e-14);
    EXPECT_EQ(r.method, MethodChoice::Doney);
  }
  EXPECT_NEAR(g_doney(p, 0.5, {1, 1}).value, 0.1610, 5e-5);
}

TEST(GDoney, GaussianCase) {
  const auto p = validate(2.0, 0.5);
  EXPECT_NEAR(g_doney(p, 0.4, {1, 3}).value, oracle::g(2.0, 0.5, 0.4), 1e-9);
}

TEST(GDoney, WrongCaseRejected) {
  EXPECT_THROW(g_doney(validate(0.8, 0.25), 0.5, {1, 2}), NotApplicable);
  EXPECT_THROW(g_doney(validate(0.8, 0.25), 1.0, {1, 1}), OutOfRange);
}

// Larger (k, l) against the integral, rational and irrational alpha.
TEST(GDoney, AgainstIntegral) {
  struct Case {
    double alpha;
    int k;
    int l;
  };
  for (const auto& c : {Case{1.25, 4, 6}, Case{1.2, 2, 3}, Case{std::sqrt(3.0), 7, 13},
                        Case{0.75, 2, 2}, Case{1.5, 2, 4}}) {
    const double rho = c.l / c.alpha - c.k;
    const auto p = validate(c.alpha, rho);
    for (double beta : {0.2, 0.6, 0.9}) {
      EXPECT_NEAR(g_doney(p, beta, {c.k, c.l}).value, oracle::g(c.alpha, rho, beta), 1e-10)
          << c.alpha << ' ' << beta;
    }
  }
}

// ---------------------------------------------------------------------------

TEST(RationalAlpha, Validation) {
  EXPECT_NO_THROW(RationalAlpha(3, 2));
  EXPECT_THROW(RationalAlpha(2, 4), OutOfRange);
  EXPECT_THROW(RationalAlpha(5, 2), OutOfRange);
  EXPECT_THROW(RationalAlpha(0, 1), OutOfRange);
}

TEST(GPrimeRational, HalfAgainstIntegralAndClosedForm) {
  Tolerance tol;
  for (double rho : {0.2, 0.3, 0.5, 0.8}) {
    for (double beta : {0.1, 0.25, 0.4, 0.7, 0.9}) {
      const auto r = gprime_rational(RationalAlpha(1, 2), rho, beta, tol);
      const double want = oracle::gprime(0.5, rho, beta);
      EXPECT_NEAR(r.value, want, 1e-9) << rho << ' ' << beta;
      EXPECT_LE(std::fabs(r.value - want), r.abs_error_bound + 1e-13);
      EXPECT_NEAR(gprime_half_closed(rho, beta), want, 1e-12) << rho << ' ' << beta;
    }
  }
  EXPECT_NEAR(gprime_half_closed(0.5, 0.25),
              gprime_rational(RationalAlpha(1, 2), 0.5, 0.25, Tolerance{1e-13}).value, 1e-12);
}

TEST(GPrimeRational, SymmetricCauchy) {
  const auto r = gprime_rational(RationalAlpha(1, 1), 0.5, 0.5, Tolerance{});
  QuadConfig cfg;
  cfg.abs_tol = 1e-11;
  EXPECT_NEAR(r.value, gprime_quad(validate(1.0, 0.5), 0.5, cfg).value, 1e-9);
}

TEST(GPrimeRational, OneSided) {
  EXPECT_NEAR(gprime_rational(RationalAlpha(3, 2), 2.0 / 3.0, 0.5, Tolerance{}).value, 2.0 / 3.0,
              1e-10);
}

TEST(GPrimeRational, OtherFractionsAgainstIntegral) {
  Tolerance tol;
  struct Case {
    std::int64_t p, q;
    double rho;
  };
  for (const auto& c : {Case{2, 3, 0.4}, Case{3, 4, 0.9}, Case{5, 3, 0.5}, Case{7, 5, 0.3},
                        Case{2, 1, 0.5}, Case{1, 3, 0.6}}) {
    const double alpha = static_cast<double>(c.p) / c.q;
    for (double beta : {0.2, 0.55, 0.85}) {
      EXPECT_NEAR(gprime_rational(RationalAlpha(c.p, c.q), c.rho, beta, tol).value,
                  oracle::gprime(alpha, c.rho, beta), 1e-9)
          << c.p << '/' << c.q << ' ' << beta;
    }
  }
}

TEST(GPrimeRational, Preconditions) {
  Tolerance tol;
  EXPECT_THROW(gprime_rational(RationalAlpha(1, 2), 0.3, 1.0, tol), ConvergenceFailure);
  EXPECT_THROW(gprime_rational(RationalAlpha(1, 2), 0.3, 0.0, tol), OutOfRange);
  EXPECT_THROW(gprime_rational(RationalAlpha(3, 2), 0.1, 0.5, tol), OutOfRange);
}

TEST(GPrimeHalfClosed, SmallRhoLimit) {
  const double beta = 0.36;
  // The integrand carries sin(pi rho), so g' vanishes as rho -> 0.
  EXPECT_NEAR(gprime_half_closed(1e-9, beta), 0.0, 1e-8);
  EXPECT_NEAR(oracle::gprime(0.5, 1e-6, beta), gprime_half_closed(1e-6, beta), 1e-12);
}

// Resonant pairs at alpha_j = p/q + eps, in 50-digit arithmetic, tend to the
// closed limit term; the two resonant sums reindexed by n reproduce it.
TEST(ResonantLimit, ResonantPairsConvergeToLimitTerm) {
  const oracle::big eps("1e-15");  // smaller eps loses digits in the 50-digit sin near multiples of pi
  struct Case {
    std::int64_t p, q;
    double rho, beta;
  };
  for (const auto& c : {Case{1, 2, 0.5, 0.4}, Case{1, 2, 0.3, 0.7}, Case{3, 2, 0.5, 0.6},
                        Case{2, 3, 0.45, 0.5}}) {
    const RationalAlpha ra(c.p, c.q);
    for (std::int64_t n = 1; n <= 20; ++n) {
      const double limit = resonant_limit_term(ra, c.rho, c.beta, n);
      const double pair = oracle::resonant_pair(c.p, c.q, c.rho, c.beta, n, eps);
      EXPECT_NEAR(limit, pair, 1e-13 + 1e-12 * std::fabs(pair)) << c.p << '/' << c.q << " n=" << n;
      const auto t = resonant_terms(ra, c.rho, c.beta, n);
      EXPECT_NEAR(t.log_term + t.cos_term, limit, 1e-15 + 1e-13 * std::fabs(limit));
    }
  }
}

TEST(ResonantLimit, IrrationalApproximantsApproachRationalFormula) {
  Tolerance tol;
  const double limit = gprime_rational(RationalAlpha(1, 2), 0.5, 0.4, tol).value;
  double previous = std::numeric_limits<double>::infinity();
  for (int j : {10, 20, 40, 80}) {
    const double a = 0.5 + std::sqrt(2.0) / j;
    const double v = gprime_series(validate(a, 0.5), 0.4, tol, classify(a, tol, 0.4)).value;
    const double err = std::fabs(v - limit);
    EXPECT_LT(err, previous) << j;
    EXPECT_NEAR(v, oracle::gprime(a, 0.5, 0.4), 1e-8);
    previous = err;
  }
}
