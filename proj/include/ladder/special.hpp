#pragma once

// Closed forms and rational-alpha evaluators.
//
// When rho + k = l/alpha, g(beta) collapses to
//   g_k(alpha, (-1)^(l+1) beta^alpha) - g_l(1/alpha, (-1)^(k+1) beta),
// g_k(a, x) = sum_m x^m U_{k-1}(cos(m pi a)) / m, which in turn is a finite
// sum of logarithms. For rational alpha = p/q the derivative g' is a sum of
// two small-divisor-free series plus two resonant series carrying log(beta).

#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <numeric>
#include <optional>
#include <string>

#include "ladder/numeric.hpp"
#include "ladder/params.hpp"

namespace ladder {

/// The relation rho + k = l / alpha with k >= 1, l >= 0.
struct DoneyCase {
  int k = 1;
  int l = 0;
  friend bool operator==(const DoneyCase&, const DoneyCase&) = default;
};

inline constexpr int kDefaultDoneySearch = 32;

/// |rho + k - l/alpha| <= 4 eps (rho + k)
inline bool matches_doney_case(const StableParams& params, DoneyCase c) {
  if (c.k < 1 || c.l < 0) return false;
  const double lhs = params.rho() + c.k;
  const double rhs = c.l / params.alpha();
  return std::fabs(lhs - rhs) <= 4.0 * detail::kEps * lhs;
}

/// Smallest k in [1, k_max] admitting an integer l with rho + k = l / alpha.
inline std::optional<DoneyCase> find_doney_case(const StableParams& params,
                                                int k_max = kDefaultDoneySearch) {
  if (k_max < 1) throw OutOfRange("find_doney_case requires k_max >= 1");
  for (int k = 1; k <= k_max; ++k) {
    const double l = std::nearbyint((params.rho() + k) * params.alpha());
    if (l < 0.0) continue;
    const DoneyCase c{k, static_cast<int>(l)};
    if (matches_doney_case(params, c)) return c;
  }
  return std::nullopt;
}

namespace detail {

inline double g_k_series(DoubleDouble a, double x, int k, std::int64_t terms) {
  CompensatedSum sum;
  double power = 1.0;
  for (std::int64_t m = 1; m <= terms; ++m) {
    power *= x;
    const double c = cos_pi(static_cast<double>(m), a);
    sum.add(power * chebyshev_u(k - 1, c) / static_cast<double>(m));
  }
  return sum.value();
}

/// log(x^2 - 2 x cos(pi t) + 1) with t = j * a, written as a sum of squares
/// so the argument carries no cancellation.
inline double log_quadratic(double x, double j, DoubleDouble a) {
  double arg;
  if (x >= 0.0) {
    const double s = sin_pi(0.5 * j, a);
    arg = (1.0 - x) * (1.0 - x) + 4.0 * x * s * s;
  } else {
    const double c = cos_pi(0.5 * j, a);
    arg = (1.0 + x) * (1.0 + x) - 4.0 * x * c * c;
  }
  if (!(arg > 0.0)) throw DegenerateLog("log argument vanished in g_k closed form");
  return std::log(arg);
}

struct ClosedSum {
  double value;      // g_k(a, x)
  double magnitude;  // sum of |log terms|
  int logs;
};

inline ClosedSum g_k_closed(DoubleDouble a, double x, int k) {
  if (k <= 0) return {0.0, 0.0, 0};
  CompensatedSum minus_g;
  int logs = 0;
  if (k % 2 == 0) {
    for (int n = 0; n <= k / 2 - 1; ++n) {
      minus_g.add(log_quadratic(x, 2.0 * n + 1.0, a));
      ++logs;
    }
  } else {
    if (!(x < 1.0)) throw DegenerateLog("log(1 - x) with x >= 1");
    minus_g.add(std::log1p(-x));
    ++logs;
    for (int n = 1; n <= (k - 1) / 2; ++n) {
      minus_g.add(log_quadratic(x, 2.0 * n, a));
      ++logs;
    }
  }
  return {-minus_g.value(), minus_g.magnitude(), logs};
}

}  // namespace detail

/// Partial sum of g_k(a, x) = sum_{m=1}^{terms} x^m U_{k-1}(cos(m pi a)) / m.
inline double g_k_series(double a, double x, int k, std::int64_t terms) {
  if (!(std::fabs(x) < 1.0)) throw OutOfRange("g_k_series requires |x| < 1");
  if (k < 0) throw OutOfRange("g_k_series requires k >= 0");
  if (terms < 1) throw OutOfRange("g_k_series requires at least one term");
  return detail::g_k_series(detail::exact(a), x, k, terms);
}

/// g_k(a, x) from the parity-split finite sums of logarithms.
inline double g_k_closed(double a, double x, int k) {
  if (!(std::fabs(x) < 1.0)) throw OutOfRange("g_k_closed requires |x| < 1");
  if (k < 0) throw OutOfRange("g_k_closed requires k >= 0");
  return detail::g_k_closed(detail::exact(a), x, k).value;
}

/// g(beta) for parameters on a Doney line rho + k = l / alpha.
inline EvalResult g_doney(const StableParams& params, double beta, DoneyCase c) {
  if (!matches_doney_case(params, c)) {
    throw NotApplicable("rho + k = l / alpha does not hold for k=" + std::to_string(c.k) +
                        ", l=" + std::to_string(c.l));
  }
  if (beta == 0.0) return {0.0, 0.0, MethodChoice::Doney, 0};
  if (!(beta > 0.0 && beta < 1.0)) throw OutOfRange("g_doney requires 0 < beta < 1");
  const double alpha = params.alpha();
  const double x_first = detail::sign_power(c.l + 1) * std::pow(beta, alpha);
  const double x_second = detail::sign_power(c.k + 1) * beta;
  const auto first = detail::g_k_closed(detail::exact(alpha), x_first, c.k);
  const auto second = detail::g_k_closed(detail::reciprocal(alpha), x_second, c.l);
  const double value = first.value - second.value;
  // Each log carries a few ulps from its argument and from cos/sin.
  const double bound = 8.0 * detail::kEps * (first.magnitude + second.magnitude + first.logs +
                                             second.logs + std::fabs(value));
  return {value, bound, MethodChoice::Doney, first.logs + second.logs};
}

// ---------------------------------------------------------------------------
// Rational alpha
// ---------------------------------------------------------------------------

/// alpha = p / q in lowest terms, 0 < p/q <= 2.
class RationalAlpha {
 public:
  RationalAlpha(std::int64_t p, std::int64_t q) : p_(p), q_(q) {
    if (p < 1 || q < 1) throw OutOfRange("rational alpha needs p, q >= 1");
    if (std::gcd(p, q) != 1) throw OutOfRange("rational alpha must be in lowest terms");
    if (p > 2 * q) throw OutOfRange("rational alpha must not exceed 2");
  }
  std::int64_t p() const { return p_; }
  std::int64_t q() const { return q_; }
  double value() const { return static_cast<double>(p_) / static_cast<double>(q_); }

 private:
  std::int64_t p_;
  std::int64_t q_;
};

namespace detail {

/// sin(pi * num / den) for integers, reduced exactly modulo 2 first.
inline double sin_pi_ratio(std::int64_t num, std::int64_t den) {
  const std::int64_t r = ((num % (2 * den)) + 2 * den) % (2 * den);
  return sin_pi(static_cast<double>(r), reciprocal(static_cast<double>(den)));
}

inline double cos_pi_ratio(std::int64_t num, std::int64_t den) {
  const std::int64_t r = ((num % (2 * den)) + 2 * den) % (2 * den);
  return cos_pi(static_cast<double>(r), reciprocal(static_cast<double>(den)));
}

/// rho * p / q as a double-double, so rho * (k p / q) reduces as k * (rho/q) * p.
inline DoubleDouble rho_over(double rho, std::int64_t q) {
  return product(rho, reciprocal(static_cast<double>(q)));
}

}  // namespace detail

/// The n-th terms (m = n p, k = n q) of the two resonant sums of g' for
/// rational alpha: the log(beta) sum and the cos sum. Both carry the sign
/// (-1)^(n p + n q + 1); this is the limit of the resonant pairs of the
/// irrational series as alpha_j -> p/q.
struct ResonantTerms {
  double log_term = 0.0;
  double cos_term = 0.0;
};

inline ResonantTerms resonant_terms(const RationalAlpha& ra, double rho, double beta,
                                    std::int64_t n) {
  const std::int64_t p = ra.p();
  const std::int64_t q = ra.q();
  const double alpha = ra.value();
  const std::int64_t m = n * p;
  const std::int64_t k = n * q;
  const double bpow = std::pow(beta, static_cast<double>(m - 1));  // alpha k - 1 = m - 1
  const double sign = -detail::sign_power(m + k);
  ResonantTerms t;
  t.log_term = alpha * std::log(beta) / std::numbers::pi * sign * bpow *
               detail::sin_pi(static_cast<double>(m), detail::exact(rho));
  t.cos_term = alpha * rho * sign * bpow *
               detail::cos_pi(static_cast<double>(k * p), detail::rho_over(rho, q));
  return t;
}

/// n-th term of the limit of the resonant pairs as alpha_j -> p/q:
///   (-1)^(n q) (-beta)^(n p - 1) p (pi rho cos(n p pi rho) + log(beta) sin(n p pi rho)) / (pi q)
inline double resonant_limit_term(const RationalAlpha& ra, double rho, double beta,
                                  std::int64_t n) {
  const std::int64_t p = ra.p();
  const std::int64_t q = ra.q();
  const double np = static_cast<double>(n * p);
  const double sign = detail::sign_power(n * q) * detail::sign_power(n * p - 1);
  const double angle_c = detail::cos_pi(np, detail::exact(rho));
  const double angle_s = detail::sin_pi(np, detail::exact(rho));
  return sign * std::pow(beta, np - 1.0) * static_cast<double>(p) *
         (std::numbers::pi * rho * angle_c + std::log(beta) * angle_s) /
         (std::numbers::pi * static_cast<double>(q));
}

/// g'(beta) for rational alpha: the non-resonant sums over p !| m and q !| k
/// (divisors bounded below by sin(pi / max(p, q))) plus the log(beta) and
/// cos sums over p | m and q | k. Each index loop stops once its geometric
/// tail is below abs_tol / 4.
inline EvalResult gprime_rational(const RationalAlpha& ra, double rho, double beta,
                                  const Tolerance& tol) {
  tol.check();
  const double alpha = ra.value();
  (void)validate(alpha, rho);
  if (!(beta > 0.0)) throw OutOfRange("gprime_rational requires beta > 0");
  if (!(beta < 1.0)) throw ConvergenceFailure("gprime_rational series diverge for beta >= 1");

  const std::int64_t p = ra.p();
  const std::int64_t q = ra.q();
  const std::int64_t pq_max = std::max(p, q);
  const double divisor_floor = pq_max >= 2 ? std::sin(std::numbers::pi / pq_max) : 1.0;
  const double log_beta = std::log(beta);
  const double target = tol.abs_tol / 4.0;
  const auto rho_dd = detail::exact(rho);
  const auto rho_q = detail::rho_over(rho, q);

  // m-indexed: sin(rho m pi) / sin(m pi q / p)  and the log(beta) sum.
  detail::CompensatedSum m_sum;
  const double m_amp = std::max(1.0 / divisor_floor, alpha * std::fabs(log_beta) / std::numbers::pi);
  std::int64_t m = 0;
  double bpow = 1.0 / beta;  // beta^(m-1) at m = 0
  double m_tail = std::numeric_limits<double>::infinity();
  while (true) {
    ++m;
    if (m > tol.max_terms) {
      throw ConvergenceFailure("gprime_rational: m-series exceeded max_terms");
    }
    bpow *= beta;
    const double num = detail::sin_pi(static_cast<double>(m), rho_dd);
    if (m % p != 0) {
      m_sum.add(detail::sign_power(m + 1) * bpow * num / detail::sin_pi_ratio(m * q, p));
    } else {
      // resonant: sign (-1)^(m + m/alpha + 1)
      m_sum.add(-alpha * log_beta / std::numbers::pi * detail::sign_power(m + (m / p) * q) * bpow *
                num);
    }
    m_tail = m_amp * bpow * beta / (1.0 - beta);
    if (m_tail <= target) break;
  }

  // k-indexed: sin(rho alpha k pi) / sin(alpha k pi)  and the cos sum.
  detail::CompensatedSum k_sum;
  const double b_alpha = std::pow(beta, alpha);
  const double k_amp = alpha * std::max(1.0 / divisor_floor, rho);
  std::int64_t k = 0;
  double k_tail = std::numeric_limits<double>::infinity();
  while (true) {
    ++k;
    if (k > tol.max_terms) {
      throw ConvergenceFailure("gprime_rational: k-series exceeded max_terms");
    }
    const double kpow =
        std::pow(beta, static_cast<double>(k * p - q) / static_cast<double>(q));  // beta^(alpha k - 1)
    const double kp = static_cast<double>(k * p);
    if (k % q != 0) {
      k_sum.add(alpha * detail::sign_power(k + 1) * kpow * detail::sin_pi(kp, rho_q) /
                detail::sin_pi_ratio(k * p, q));
    } else {
      // resonant: sign (-1)^(k (alpha + 1) + 1)
      k_sum.add(-alpha * rho * detail::sign_power(k * p / q + k) * kpow * detail::cos_pi(kp, rho_q));
    }
    k_tail = k_amp * kpow * b_alpha / (1.0 - b_alpha);
    if (k_tail <= target) break;
  }

  const double value = m_sum.value() + k_sum.value();
  const double rounding =
      8.0 * detail::kEps * (m_sum.magnitude() + k_sum.magnitude()) + detail::kEps * std::fabs(value);
  return {value, m_tail + k_tail + rounding, MethodChoice::Rational, m + k};
}

/// Closed form of g'(beta) for alpha = 1/2:
///   ((1 - beta) sin(pi rho / 2) / (2 sqrt(beta)) + rho (beta + cos(pi rho)) / 2
///    + log(beta) sin(pi rho) / (2 pi)) / (beta^2 + 2 beta cos(pi rho) + 1)
inline double gprime_half_closed(double rho, double beta) {
  if (!(beta > 0.0)) throw OutOfRange("gprime_half_closed requires beta > 0");
  if (!(rho > 0.0 && rho < 1.0)) throw OutOfRange("gprime_half_closed requires 0 < rho < 1");
  const double c = detail::cos_pi(rho);
  const double s = detail::sin_pi(rho);
  const double numer = (1.0 - beta) * detail::sin_pi(0.5 * rho) / (2.0 * std::sqrt(beta)) +
                       rho * (beta + c) / 2.0 + std::log(beta) * s / (2.0 * std::numbers::pi);
  return numer / (beta * beta + 2.0 * beta * c + 1.0);
}

}  // namespace ladder
