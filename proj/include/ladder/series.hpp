#pragma once

// g and g' from the double power series
//
//   g(beta) = sum_m (-1)^(m+1) beta^m sin(rho m pi) / (m sin(m pi / alpha))
//           + sum_k (-1)^(k+1) beta^(alpha k) sin(rho alpha k pi) / (k sin(alpha k pi))
//
// for 0 <= beta < 1, together with the auxiliary alternating series and the
// classical trigonometric identities used to cross-check them.

#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <string>

#include "ladder/diophantine.hpp"
#include "ladder/numeric.hpp"
#include "ladder/params.hpp"
#include "ladder/quadrature.hpp"
#include "ladder/special.hpp"

namespace ladder {

struct SeriesReport {
  double value = 0.0;
  std::int64_t terms_first_series = 0;
  std::int64_t terms_second_series = 0;
  double tail_bound = 0.0;
  double divisor_floor_used = 1.0;
  double rounding_bound = 0.0;
  // Tail bound relies on the estimated irrationality exponent.
  bool heuristic = false;

  EvalResult to_eval() const {
    return {value, tail_bound + rounding_bound, MethodChoice::Series,
            terms_first_series + terms_second_series, heuristic};
  }
};

namespace detail {

enum class SeriesKind { Value, Derivative };

/// Shared driver for g and g'. Ratios sin(rho m pi)/sin(m pi/alpha) and
/// sin(rho alpha k pi)/sin(alpha k pi) are taken directly, or, on a Doney
/// line, replaced termwise by (-1)^(k m) U_{l-1}(cos(m pi/alpha)) and
/// (-1)^(l k + 1) U_{k-1}(cos(alpha k pi)); the latter removes the 0/0 terms
/// of rational alpha.
inline SeriesReport sum_double_series(const StableParams& params, double beta,
                                       const Tolerance& tol, const AlphaClass& aclass,
                                       std::optional<DoneyCase> doney, SeriesKind kind) {
  tol.check();
  const double alpha = params.alpha();
  const double rho = params.rho();
  const bool derivative = kind == SeriesKind::Derivative;
  if (!(beta >= 0.0 && beta < 1.0)) throw OutOfRange("series requires 0 <= beta < 1");
  if (doney && !matches_doney_case(params, *doney)) {
    throw NotApplicable("Doney relation does not hold for these parameters");
  }
  const auto inv_alpha = reciprocal(alpha);
  const auto alpha_dd = exact(alpha);
  const auto rho_dd = exact(rho);
  const auto rho_alpha = product(rho, alpha);

  SeriesReport report;
  if (beta == 0.0) {
    if (!derivative) return report;
    if (!(alpha > 1.0)) throw OutOfRange("g'(0) diverges for alpha <= 1");
    const double ratio = doney ? sign_power(doney->k) * chebyshev_u(doney->l - 1, cos_pi(1.0, inv_alpha))
                               : sin_pi(1.0, rho_dd) / sin_pi(1.0, inv_alpha);
    report.value = ratio;
    report.terms_first_series = 1;
    report.rounding_bound = 4.0 * kEps * std::fabs(ratio);
    return report;
  }

  // Only sin(pi / alpha) divides at beta = 0, so the checks wait until here.
  if (!doney) {
    if (aclass.kind == AlphaKind::Rational) {
      throw NotApplicable("series has resonant divisors for rational alpha");
    }
    if (aclass.kind == AlphaKind::IllConditioned) {
      throw IllConditioned("small divisors: series projected to exceed the term budget");
    }
  }

  // Envelopes |term_m| <= scale * base^m * m^power.
  TermEnvelope first_env;
  TermEnvelope second_env;
  const double b_alpha = std::pow(beta, alpha);
  if (doney) {
    // |U_{j-1}| <= j
    const double l_amp = std::max(1, doney->l);
    const double k_amp = std::max(1, doney->k);
    first_env = derivative ? TermEnvelope{l_amp / beta, beta, 0.0} : TermEnvelope{l_amp, beta, -1.0};
    second_env = derivative ? TermEnvelope{alpha * k_amp / beta, b_alpha, 0.0}
                            : TermEnvelope{k_amp, b_alpha, -1.0};
  } else {
    const double power = aclass.exponent_estimate - 1.0;
    const double c1 = aclass.inverse_floor.constant;
    const double c2 = aclass.direct_floor.constant;
    first_env = derivative ? TermEnvelope{1.0 / (c1 * beta), beta, power}
                           : TermEnvelope{1.0 / c1, beta, power - 1.0};
    second_env = derivative ? TermEnvelope{alpha / (c2 * beta), b_alpha, power}
                            : TermEnvelope{1.0 / c2, b_alpha, power - 1.0};
    report.heuristic = true;
  }
  const double target = tol.abs_tol / 4.0;
  double floor_used = 1.0;

  // First series, index m.
  CompensatedSum first;
  double first_tail = first_env.tail_after(0.0);
  std::int64_t m = 0;
  while (!(first_tail <= target)) {
    ++m;
    if (m > tol.max_terms) {
      throw ConvergenceFailure("first series needs more than " + std::to_string(tol.max_terms) +
                               " terms");
    }
    const double md = static_cast<double>(m);
    double ratio;
    if (doney) {
      ratio = sign_power(static_cast<long long>(doney->k) * m) *
              chebyshev_u(doney->l - 1, cos_pi(md, inv_alpha));
    } else {
      const double divisor = sin_pi(md, inv_alpha);
      if (divisor == 0.0) throw IllConditioned("vanishing divisor sin(m pi / alpha)");
      ratio = sin_pi(md, rho_dd) / divisor;
      floor_used = std::min(floor_used, aclass.inverse_floor(md));
    }
    const double weight = derivative ? std::pow(beta, md - 1.0) : std::pow(beta, md) / md;
    first.add(sign_power(m + 1) * weight * ratio);
    first_tail = first_env.tail_after(md);
  }

  // Second series, index k.
  CompensatedSum second;
  double second_tail = second_env.tail_after(0.0);
  std::int64_t k = 0;
  while (!(second_tail <= target)) {
    ++k;
    if (k > tol.max_terms) {
      throw ConvergenceFailure("second series needs more than " + std::to_string(tol.max_terms) +
                               " terms");
    }
    const double kd = static_cast<double>(k);
    double ratio;
    if (doney) {
      ratio = sign_power(static_cast<long long>(doney->l) * k + 1) *
              chebyshev_u(doney->k - 1, cos_pi(kd, alpha_dd));
    } else {
      const double divisor = sin_pi(kd, alpha_dd);
      if (divisor == 0.0) throw IllConditioned("vanishing divisor sin(alpha k pi)");
      ratio = sin_pi(kd, rho_alpha) / divisor;
      floor_used = std::min(floor_used, aclass.direct_floor(kd));
    }
    const double weight =
        derivative ? alpha * std::pow(beta, alpha * kd - 1.0) : std::pow(beta, alpha * kd) / kd;
    second.add(sign_power(k + 1) * weight * ratio);
    second_tail = second_env.tail_after(kd);
  }

  report.value = first.value() + second.value();
  report.terms_first_series = m;
  report.terms_second_series = k;
  report.tail_bound = first_tail + second_tail;
  report.divisor_floor_used = floor_used;
  // Each term carries a handful of ulps from pow, sin and the division.
  report.rounding_bound =
      8.0 * kEps * (first.magnitude() + second.magnitude()) + kEps * std::fabs(report.value);
  return report;
}

}  // namespace detail

/// g(beta), 0 <= beta < 1. Pass a Doney case to sum the Chebyshev-resolved
/// form (valid for every alpha, including rational ones).
inline SeriesReport g_series(const StableParams& params, double beta, const Tolerance& tol,
                             const AlphaClass& aclass,
                             std::optional<DoneyCase> doney = std::nullopt) {
  return detail::sum_double_series(params, beta, tol, aclass, doney, detail::SeriesKind::Value);
}

/// g'(beta), termwise derivative of g_series.
inline SeriesReport gprime_series(const StableParams& params, double beta, const Tolerance& tol,
                                  const AlphaClass& aclass,
                                  std::optional<DoneyCase> doney = std::nullopt) {
  return detail::sum_double_series(params, beta, tol, aclass, doney,
                                    detail::SeriesKind::Derivative);
}

// ---------------------------------------------------------------------------
// Auxiliary integrals
// ---------------------------------------------------------------------------

namespace detail {

/// sum_{j>=0} (-1)^j b^(c+j) / (c+j) = int_0^b y^(c-1) / (1+y) dy, c > 0,
/// 0 <= b <= 1. Terms decrease, so the first omitted term bounds the
/// remainder. When the direct sum would not meet the tolerance within
/// max_terms (b at or near 1), the remainder after a short head is taken
/// from its own integral (-1)^J int_0^b y^(c+J-1)/(1+y) dy.
inline EvalResult alternating_power_series(double c, double b, const Tolerance& tol) {
  tol.check();
  if (b == 0.0) return {0.0, 0.0, MethodChoice::Series, 0};
  auto term = [&](double j) { return std::pow(b, c + j) / (c + j); };
  const double target = tol.abs_tol / 2.0;
  const bool direct = term(static_cast<double>(tol.max_terms)) <= target;
  const std::int64_t head = direct ? tol.max_terms : std::min<std::int64_t>(64, tol.max_terms);

  CompensatedSum sum;
  std::int64_t j = 0;
  for (; j < head; ++j) {
    const double t = term(static_cast<double>(j));
    if (direct && t <= target) break;
    sum.add(sign_power(j) * t);
  }
  const double rounding = 4.0 * kEps * sum.magnitude();
  if (direct) {
    return {sum.value(), term(static_cast<double>(j)) + rounding, MethodChoice::Series, j};
  }
  const double exponent = c + static_cast<double>(j) - 1.0;
  QuadConfig cfg = QuadConfig::from(tol);
  cfg.abs_tol = target;
  const auto rem = integrate([&](double y) { return std::pow(y, exponent) / (1.0 + y); }, 0.0, b,
                             cfg);
  const double value = sum.value() + sign_power(j) * rem.value;
  return {value, rem.abs_error + rounding, MethodChoice::Series, j + rem.evaluations};
}

}  // namespace detail

/// int_0^b y^p / (1+y) dy = sum_{k>=0} (-1)^k b^(k+1+p) / (k+1+p), p > 0, 0 < b < 1.
inline EvalResult aux_int0b(double p, double b, const Tolerance& tol) {
  if (!(p > 0.0)) throw OutOfRange("aux_int0b requires p > 0");
  if (!(b >= 0.0 && b < 1.0)) throw OutOfRange("aux_int0b requires 0 < b < 1");
  return detail::alternating_power_series(1.0 + p, b, tol);
}

/// int_b^inf y^-p / (1+y) dy for 0 < b <= 1, p > 0:
///   pi / sin(p pi) + sum_{k>=0} (-1)^(k+1) b^(k+1-p) / (k+1-p)
/// and, for p within 4 eps of an integer n,
///   (-1)^n ln b + sum_{k != n-1} (-1)^(k+1) b^(k+1-n) / (k+1-n).
inline EvalResult aux_intbinfty(double p, double b, const Tolerance& tol) {
  if (!(p > 0.0)) throw OutOfRange("aux_intbinfty requires p > 0");
  if (!(b > 0.0 && b <= 1.0)) throw OutOfRange("aux_intbinfty requires 0 < b <= 1");
  tol.check();
  const double n = std::nearbyint(p);
  const bool integer_branch = n >= 1.0 && std::fabs(p - n) <= 4.0 * detail::kEps * p;
  const double shift = integer_branch ? n : p;

  // Terms with k + 1 - shift < 0 sit before the alternating decreasing part.
  detail::CompensatedSum head;
  std::int64_t k = 0;
  for (; static_cast<double>(k) + 1.0 - shift < 0.0; ++k) {
    const double e = static_cast<double>(k) + 1.0 - shift;
    head.add(detail::sign_power(k + 1) * std::pow(b, e) / e);
  }
  if (integer_branch) {
    k = static_cast<std::int64_t>(n);  // skip k = n - 1
    head.add(detail::sign_power(static_cast<long long>(n)) * std::log(b));
  } else {
    head.add(std::numbers::pi / detail::sin_pi(p));
  }
  // Remaining tail: (-1)^(k+1) sum_j (-1)^j b^(c+j) / (c+j), c = k + 1 - shift > 0.
  const double c = static_cast<double>(k) + 1.0 - shift;
  const auto tail = detail::alternating_power_series(c, b, tol);
  const double value = head.value() + detail::sign_power(k + 1) * tail.value;
  const double bound = tail.abs_error_bound + 4.0 * detail::kEps * head.magnitude();
  return {value, bound, MethodChoice::Series, k + tail.terms_or_nodes_used};
}

// ---------------------------------------------------------------------------
// Classical identities
// ---------------------------------------------------------------------------

struct KernelPair {
  double partial_sum = 0.0;
  double closed_form = 0.0;
};

/// sum_{m=1}^{M} (-1)^(m+1) m sin(m z) / (m^2 - w^2)  vs  (pi/2) sin(z w) / sin(w pi)
inline KernelPair kernel_tmp1(double z, double w, std::int64_t M) {
  if (!(std::fabs(z) < std::numbers::pi)) throw OutOfRange("kernel_tmp1 requires |z| < pi");
  if (w == std::nearbyint(w)) throw OutOfRange("kernel_tmp1 requires non-integer w");
  detail::CompensatedSum sum;
  for (std::int64_t m = 1; m <= M; ++m) {
    const double md = static_cast<double>(m);
    sum.add(detail::sign_power(m + 1) * md * std::sin(md * z) / (md * md - w * w));
  }
  return {sum.value(), std::numbers::pi / 2.0 * std::sin(z * w) / detail::sin_pi(w)};
}

/// Abel-summation bound on the remainder of kernel_tmp1 after M terms:
/// partial sums of (-1)^(m+1) sin(m z) are bounded by 1/|cos(z/2)| and
/// m/(m^2 - w^2) decreases for m > |w|.
inline double kernel_tmp1_envelope(double z, double w, std::int64_t M) {
  const double next = static_cast<double>(M + 1);
  if (!(next > std::fabs(w))) return std::numeric_limits<double>::infinity();
  return next / (next * next - w * w) / std::fabs(std::cos(z / 2.0));
}

/// 1/z - sum_{k=1}^{K} (-1)^k 2z / (k^2 - z^2)  vs  pi / sin(pi z)
inline KernelPair kernel_tmp2(double z, std::int64_t K) {
  if (z == std::nearbyint(z)) throw OutOfRange("kernel_tmp2 requires non-integer z");
  detail::CompensatedSum sum;
  sum.add(1.0 / z);
  for (std::int64_t k = 1; k <= K; ++k) {
    const double kd = static_cast<double>(k);
    sum.add(-detail::sign_power(k) * 2.0 * z / (kd * kd - z * z));
  }
  return {sum.value(), std::numbers::pi / detail::sin_pi(z)};
}

/// Alternating-series remainder of kernel_tmp2 after K terms.
inline double kernel_tmp2_envelope(double z, std::int64_t K) {
  const double next = static_cast<double>(K + 1);
  if (!(next > std::fabs(z))) return std::numeric_limits<double>::infinity();
  return 2.0 * std::fabs(z) / (next * next - z * z);
}

/// sum_{k=1}^{n-1} p^k sin(k x)  vs
/// (p sin x - p^n sin(n x) + p^(n+1) sin((n-1) x)) / (1 - 2 p cos x + p^2)
inline KernelPair kernel_tmp3(double p, double x, std::int64_t n) {
  if (n < 1) throw OutOfRange("kernel_tmp3 requires n >= 1");
  detail::CompensatedSum sum;
  double power = 1.0;
  for (std::int64_t k = 1; k <= n - 1; ++k) {
    power *= p;
    sum.add(power * std::sin(static_cast<double>(k) * x));
  }
  const double nd = static_cast<double>(n);
  const double pn = std::pow(p, nd);
  const double numer = p * std::sin(x) - pn * std::sin(nd * x) + pn * p * std::sin((nd - 1.0) * x);
  // 1 - 2p cos x + p^2 as a sum of two nonnegative squares
  double denom;
  if (p >= 0.0) {
    const double half = std::sin(x / 2.0);
    denom = (1.0 - p) * (1.0 - p) + 4.0 * p * half * half;
  } else {
    const double half = std::cos(x / 2.0);
    denom = (1.0 + p) * (1.0 + p) - 4.0 * p * half * half;
  }
  KernelPair out{sum.value(), 0.0};
  if (numer == 0.0) return out;
  out.closed_form = numer / denom;
  return out;
}

/// sum_{m=0}^{M} (-1)^m x^m sin((m+1) z)  vs  sin z / (x^2 + 2 x cos z + 1), |x| < 1
inline KernelPair kernel_poisson(double x, double z, std::int64_t M) {
  if (!(std::fabs(x) < 1.0)) throw OutOfRange("kernel_poisson requires |x| < 1");
  detail::CompensatedSum sum;
  double power = 1.0;
  for (std::int64_t m = 0; m <= M; ++m) {
    sum.add(detail::sign_power(m) * power * std::sin(static_cast<double>(m + 1) * z));
    power *= x;
  }
  return {sum.value(), std::sin(z) / (x * x + 2.0 * x * std::cos(z) + 1.0)};
}

/// |x|^(M+1) / (1 - |x|)
inline double kernel_poisson_envelope(double x, std::int64_t M) {
  return std::pow(std::fabs(x), static_cast<double>(M + 1)) / (1.0 - std::fabs(x));
}

}  // namespace ladder
