#pragma once

// Continued fractions of alpha, an irrationality-exponent estimate, and the
// small-divisor conditioning verdict that drives automatic method selection.
//
// A double cannot certify that alpha is badly or well approximable; every
// verdict here is a statement about alpha *as a double* and about the work
// a series evaluation would need at a given beta and tolerance.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "ladder/numeric.hpp"
#include "ladder/params.hpp"

namespace ladder {

struct Convergent {
  std::int64_t p = 0;
  std::int64_t q = 1;
  friend bool operator==(const Convergent&, const Convergent&) = default;
};

struct ContinuedFraction {
  std::vector<std::int64_t> quotients;
  std::vector<Convergent> convergents;
  // The last convergent reproduces x to within 4 machine epsilons (or the
  // expansion terminated with a zero remainder).
  bool reproduces_input = false;
};

/// Largest denominator accepted as "rational": q^2 * eps <= 2^-10.
inline constexpr std::int64_t kRationalDenominatorCap = 2097152;

/// Expands x > 0. The double is split into an exact dyadic fraction and run
/// through Euclid's algorithm in 128-bit integers, so every partial quotient
/// is exact for the stored value. Expansion stops at max_terms, at a zero
/// remainder, when the latest convergent is within 4 eps of x, or before a
/// convergent would overflow int64.
inline ContinuedFraction cf_expand(double x, int max_terms) {
  using i128 = __int128;
  using u128 = unsigned __int128;
  if (!(x > 0.0) || !std::isfinite(x) || x >= 0x1p62) {
    throw OutOfRange("cf_expand requires 0 < x < 2^62");
  }
  if (max_terms < 1) throw OutOfRange("cf_expand requires max_terms >= 1");

  int exponent = 0;
  const double mantissa = std::frexp(x, &exponent);  // x = mantissa * 2^exponent
  auto digits = static_cast<std::uint64_t>(std::ldexp(mantissa, 53));
  int shift = 53 - exponent;  // x = digits / 2^shift
  u128 num = 0;
  u128 den = 1;
  if (shift <= 0) {
    num = static_cast<u128>(digits) << (-shift);
  } else if (shift <= 62) {
    num = digits;
    den = static_cast<u128>(1) << shift;
  } else {
    // Tiny x: round onto the 2^-62 grid.
    num = static_cast<u128>(std::max(1.0, std::nearbyint(std::ldexp(x, 62))));
    den = static_cast<u128>(1) << 62;
  }
  const u128 x_num = num;
  const u128 x_den = den;

  ContinuedFraction cf;
  constexpr i128 kLimit = std::numeric_limits<std::int64_t>::max();
  i128 p_prev = 1, q_prev = 0;  // p_{-1}, q_{-1}
  i128 p_prev2 = 0, q_prev2 = 1;  // p_{-2}, q_{-2}
  while (static_cast<int>(cf.quotients.size()) < max_terms) {
    const u128 a = num / den;
    const u128 rem = num % den;
    if (a > static_cast<u128>(kLimit)) break;
    const i128 p = static_cast<i128>(a) * p_prev + p_prev2;
    const i128 q = static_cast<i128>(a) * q_prev + q_prev2;
    if (p > kLimit || q > kLimit) break;

    cf.quotients.push_back(static_cast<std::int64_t>(a));
    cf.convergents.push_back({static_cast<std::int64_t>(p), static_cast<std::int64_t>(q)});
    if (rem == 0) {
      cf.reproduces_input = true;
      break;
    }
    // |x - p/q| <= 4 eps x  <=>  |x_num q - x_den p| <= 4 eps x_num q
    const i128 lhs = static_cast<i128>(x_num) * q - static_cast<i128>(x_den) * p;
    const long double diff = static_cast<long double>(lhs < 0 ? -lhs : lhs);
    const long double scale = static_cast<long double>(static_cast<i128>(x_num) * q);
    if (diff <= 4.0L * static_cast<long double>(detail::kEps) * scale) {
      cf.reproduces_input = true;
      break;
    }
    p_prev2 = p_prev;
    q_prev2 = q_prev;
    p_prev = p;
    q_prev = q;
    num = den;
    den = rem;
  }
  return cf;
}

/// Estimated irrationality exponent from convergent growth:
///   max_k (1 + log q_{k+1} / log q_k), clamped below at 2.
/// Only pairs with q_k >= 100 enter when at least one exists, so that the
/// first few tiny denominators do not dominate; otherwise pairs with
/// q_k >= 2 are used.
inline double estimate_exponent(const ContinuedFraction& cf) {
  if (cf.convergents.size() < 3) {
    throw InsufficientData("estimate_exponent needs at least 3 convergents");
  }
  auto scan = [&](std::int64_t q_min) {
    double best = -1.0;
    for (std::size_t k = 0; k + 1 < cf.convergents.size(); ++k) {
      const auto qk = cf.convergents[k].q;
      if (qk < q_min) continue;
      const double ratio = std::log(static_cast<double>(cf.convergents[k + 1].q)) /
                           std::log(static_cast<double>(qk));
      best = std::max(best, 1.0 + ratio);
    }
    return best;
  };
  double n_hat = scan(100);
  if (n_hat < 0.0) n_hat = scan(2);
  return std::max(2.0, n_hat);
}

/// min over 1 <= m <= count of |sin(m pi x)|, with x carried as hi + lo.
inline double min_abs_sin(detail::DoubleDouble x, std::int64_t count) {
  if (count < 1) throw OutOfRange("min_abs_sin requires M >= 1");
  double best = std::numeric_limits<double>::infinity();
  for (std::int64_t m = 1; m <= count; ++m) {
    best = std::min(best, std::fabs(detail::sin_pi(static_cast<double>(m), x)));
  }
  return best;
}

inline double min_abs_sin(double x, std::int64_t count) {
  return min_abs_sin(detail::exact(x), count);
}

/// Power-law lower-bound model  |sin(m pi x)| >= constant * m^-power.
/// The constant is fitted so the model holds for every m up to the
/// calibration range; beyond it the model is only as good as the exponent.
struct DivisorFloor {
  double constant = 0.0;
  double power = 1.0;

  double operator()(double m) const { return constant * std::pow(m, -power); }
};

inline constexpr std::int64_t kFloorCalibrationTerms = 1000;

inline DivisorFloor calibrate_floor(detail::DoubleDouble x, double power,
                                    std::int64_t count = kFloorCalibrationTerms) {
  double c = std::numeric_limits<double>::infinity();
  for (std::int64_t m = 1; m <= count; ++m) {
    const double md = static_cast<double>(m);
    c = std::min(c, std::fabs(detail::sin_pi(md, x)) * std::pow(md, power));
  }
  return {c, power};
}

/// Envelope scale * base^m * m^power for the size of term m of a series.
struct TermEnvelope {
  double scale = 1.0;
  double base = 0.0;
  double power = 0.0;

  double operator()(double m) const {
    if (base == 0.0) return 0.0;
    return scale * std::pow(base, m) * std::pow(m, power);
  }

  /// Bound on sum_{j > m} envelope(j), or +inf when the terms after m are
  /// not yet geometrically decreasing.
  double tail_after(double m) const {
    if (base == 0.0) return 0.0;
    const double ratio = base * std::pow((m + 2.0) / (m + 1.0), std::max(power, 0.0));
    if (!(ratio < 1.0)) return std::numeric_limits<double>::infinity();
    return (*this)(m + 1.0) / (1.0 - ratio);
  }
};

struct WorkProjection {
  std::int64_t terms = 0;   // index after which the tail meets the target
  double magnitude = 0.0;   // bound on sum of |term| up to that index
  bool feasible = false;
};

inline WorkProjection project_work(const TermEnvelope& env, double tail_target,
                                   std::int64_t max_terms) {
  WorkProjection w;
  if (env.tail_after(0.0) <= tail_target) {
    w.feasible = true;
    return w;
  }
  for (std::int64_t m = 1; m <= max_terms; ++m) {
    const double md = static_cast<double>(m);
    w.magnitude += env(md);
    w.terms = m;
    if (env.tail_after(md) <= tail_target) {
      w.feasible = true;
      return w;
    }
  }
  return w;
}

enum class AlphaKind { Rational, Irrational, IllConditioned };

constexpr std::string_view to_string(AlphaKind k) {
  switch (k) {
    case AlphaKind::Rational: return "rational";
    case AlphaKind::Irrational: return "irrational";
    case AlphaKind::IllConditioned: return "ill_conditioned";
  }
  return "unknown";
}

struct AlphaClass {
  AlphaKind kind = AlphaKind::IllConditioned;
  std::int64_t p = 0;  // Rational only, lowest terms
  std::int64_t q = 0;
  // N-hat; +inf when the expansion is too short to estimate it.
  double exponent_estimate = std::numeric_limits<double>::infinity();
  DivisorFloor inverse_floor;  // model for |sin(m pi / alpha)|
  DivisorFloor direct_floor;   // model for |sin(m pi alpha)|
  WorkProjection first_series;
  WorkProjection second_series;
  ContinuedFraction expansion;
};

inline constexpr int kClassifyExpansionTerms = 64;
inline constexpr double kDefaultConditioningBeta = 0.9;

/// Classifies alpha for series use at beta (values beyond 1 are reflected to
/// 1/beta). Rational when the expansion reproduces alpha with a denominator
/// at most kRationalDenominatorCap. Otherwise the term envelopes of both
/// series of g are projected from the fitted divisor floors; the verdict is
/// IllConditioned when either needs more than max_terms terms or when the
/// projected rounding of the partial sums exceeds the tolerance.
inline AlphaClass classify(double alpha, const Tolerance& tol,
                           double beta = kDefaultConditioningBeta) {
  if (!(alpha > 0.0 && alpha <= 2.0)) throw OutOfRange("classify requires 0 < alpha <= 2");
  tol.check();
  if (!(beta >= 0.0) || !std::isfinite(beta)) throw OutOfRange("classify requires beta >= 0");
  if (beta > 1.0) beta = 1.0 / beta;

  AlphaClass out;
  out.expansion = cf_expand(alpha, kClassifyExpansionTerms);
  const auto& last = out.expansion.convergents.back();
  if (out.expansion.reproduces_input && last.q <= kRationalDenominatorCap) {
    out.kind = AlphaKind::Rational;
    out.p = last.p;
    out.q = last.q;
    return out;
  }

  try {
    const auto inv = cf_expand(1.0 / alpha, kClassifyExpansionTerms);
    out.exponent_estimate =
        std::max(estimate_exponent(out.expansion), estimate_exponent(inv));
  } catch (const InsufficientData&) {
    out.kind = AlphaKind::IllConditioned;
    return out;
  }

  const double power = out.exponent_estimate - 1.0;
  out.inverse_floor = calibrate_floor(detail::reciprocal(alpha), power);
  out.direct_floor = calibrate_floor(detail::exact(alpha), power);
  if (!(out.inverse_floor.constant > 0.0) || !(out.direct_floor.constant > 0.0)) {
    out.kind = AlphaKind::IllConditioned;
    return out;
  }

  // |term_m| <= beta^m m^(power-1) / c for both series of g (base beta^alpha
  // for the second).
  const TermEnvelope first{1.0 / out.inverse_floor.constant, beta, power - 1.0};
  const TermEnvelope second{1.0 / out.direct_floor.constant, std::pow(beta, alpha),
                            power - 1.0};
  const double target = tol.abs_tol / 4.0;
  out.first_series = project_work(first, target, tol.max_terms);
  out.second_series = project_work(second, target, tol.max_terms);
  const double rounding =
      8.0 * detail::kEps * (out.first_series.magnitude + out.second_series.magnitude);
  const bool feasible = out.first_series.feasible && out.second_series.feasible &&
                        rounding <= target;
  out.kind = feasible ? AlphaKind::Irrational : AlphaKind::IllConditioned;
  return out;
}

}  // namespace ladder
