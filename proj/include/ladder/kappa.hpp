#pragma once

// g and g' on the whole half-line, kappa(gamma, beta) and the exit-time
// transform 1 / ((theta + gamma) kappa(eta, gamma) kappa(eta, theta)).
//
// For beta >= 1.05 the reflection g(beta) = g(1/beta) + alpha rho log(beta)
// brings the argument into (0, 1); the band (0.95, 1.05) always goes to
// quadrature since both series converge slowly there.

#include <cmath>
#include <optional>

#include "ladder/diophantine.hpp"
#include "ladder/numeric.hpp"
#include "ladder/params.hpp"
#include "ladder/quadrature.hpp"
#include "ladder/series.hpp"
#include "ladder/special.hpp"

namespace ladder {

inline constexpr double kBandLow = 0.95;
inline constexpr double kBandHigh = 1.05;

struct KappaQuery {
  double gamma = 1.0;
  double beta = 0.0;

  void check() const {
    if (!(gamma > 0.0) || !std::isfinite(gamma)) throw OutOfRange("gamma must be > 0");
    if (!(beta >= 0.0) || !std::isfinite(beta)) throw OutOfRange("beta must be >= 0");
  }
};

namespace detail {

inline EvalResult g_quad_tol(const StableParams& params, double beta, const Tolerance& tol) {
  return g_quad(params, beta, QuadConfig::from(tol));
}

inline EvalResult gprime_quad_tol(const StableParams& params, double beta, const Tolerance& tol) {
  return gprime_quad(params, beta, QuadConfig::from(tol));
}

inline std::optional<RationalAlpha> rational_of(const AlphaClass& ac) {
  if (ac.kind != AlphaKind::Rational) return std::nullopt;
  return RationalAlpha(ac.p, ac.q);
}

/// g on 0 < beta <= kBandLow.
inline EvalResult g_inner(const StableParams& params, double beta, MethodChoice method,
                          const Tolerance& tol) {
  switch (method) {
    case MethodChoice::Quadrature:
      return g_quad_tol(params, beta, tol);
    case MethodChoice::Doney: {
      const auto c = find_doney_case(params);
      if (!c) throw NotApplicable("no Doney relation rho + k = l/alpha with k <= 32");
      return g_doney(params, beta, *c);
    }
    case MethodChoice::Rational:
      throw NotApplicable("the rational-alpha formula gives g' only");
    case MethodChoice::Series: {
      const auto c = find_doney_case(params);
      return g_series(params, beta, tol, classify(params.alpha(), tol, beta), c).to_eval();
    }
    case MethodChoice::Auto:
      break;
  }
  if (const auto c = find_doney_case(params)) {
    try {
      return g_doney(params, beta, *c);
    } catch (const DegenerateLog&) {
    }
  }
  const auto ac = classify(params.alpha(), tol, beta);
  if (ac.kind == AlphaKind::Irrational) {
    try {
      return g_series(params, beta, tol, ac).to_eval();
    } catch (const ConvergenceFailure&) {
    } catch (const IllConditioned&) {
    }
  }
  return g_quad_tol(params, beta, tol);
}

/// g' on 0 < beta <= kBandLow.
inline EvalResult gprime_inner(const StableParams& params, double beta, MethodChoice method,
                               const Tolerance& tol) {
  switch (method) {
    case MethodChoice::Quadrature:
      return gprime_quad_tol(params, beta, tol);
    case MethodChoice::Doney:
      throw NotApplicable("the Doney closed form gives g only");
    case MethodChoice::Rational: {
      const auto ra = rational_of(classify(params.alpha(), tol, beta));
      if (!ra) throw NotApplicable("alpha is not rational");
      return gprime_rational(*ra, params.rho(), beta, tol);
    }
    case MethodChoice::Series: {
      const auto c = find_doney_case(params);
      return gprime_series(params, beta, tol, classify(params.alpha(), tol, beta), c).to_eval();
    }
    case MethodChoice::Auto:
      break;
  }
  const auto ac = classify(params.alpha(), tol, beta);
  try {
    if (const auto ra = rational_of(ac)) return gprime_rational(*ra, params.rho(), beta, tol);
    if (const auto c = find_doney_case(params)) {
      return gprime_series(params, beta, tol, ac, c).to_eval();
    }
    if (ac.kind == AlphaKind::Irrational) return gprime_series(params, beta, tol, ac).to_eval();
  } catch (const ConvergenceFailure&) {
  } catch (const IllConditioned&) {
  }
  return gprime_quad_tol(params, beta, tol);
}

}  // namespace detail

/// g(beta) for any beta >= 0.
inline EvalResult g_any_beta(const StableParams& params, double beta,
                             MethodChoice method = MethodChoice::Auto, const Tolerance& tol = {}) {
  tol.check();
  if (!(beta >= 0.0) || !std::isfinite(beta)) throw OutOfRange("beta must be >= 0");
  if (beta == 0.0) return {0.0, 0.0, method == MethodChoice::Auto ? MethodChoice::Series : method, 0};
  if (beta > kBandLow && beta < kBandHigh) return detail::g_quad_tol(params, beta, tol);
  if (beta <= kBandLow) return detail::g_inner(params, beta, method, tol);
  // Reflection: g(beta) = g(1/beta) + alpha rho log(beta)
  auto r = detail::g_inner(params, 1.0 / beta, method, tol);
  const double shift = params.alpha() * params.rho() * std::log(beta);
  r.value += shift;
  r.abs_error_bound += 2.0 * detail::kEps * (std::fabs(shift) + std::fabs(r.value));
  return r;
}

/// g'(beta) for beta > 0 (and beta = 0 when alpha > 1).
inline EvalResult gprime_any_beta(const StableParams& params, double beta,
                                  MethodChoice method = MethodChoice::Auto,
                                  const Tolerance& tol = {}) {
  tol.check();
  if (!(beta >= 0.0) || !std::isfinite(beta)) throw OutOfRange("beta must be >= 0");
  if (beta == 0.0) {
    const auto c = find_doney_case(params);
    return gprime_series(params, 0.0, tol, classify(params.alpha(), tol), c).to_eval();
  }
  if (beta > kBandLow && beta < kBandHigh) return detail::gprime_quad_tol(params, beta, tol);
  if (beta <= kBandLow) return detail::gprime_inner(params, beta, method, tol);
  // d/dbeta of the reflection: g'(beta) = alpha rho / beta - g'(1/beta) / beta^2
  auto r = detail::gprime_inner(params, 1.0 / beta, method, tol);
  const double first = params.alpha() * params.rho() / beta;
  const double second = r.value / (beta * beta);
  r.value = first - second;
  r.abs_error_bound = r.abs_error_bound / (beta * beta) +
                      4.0 * detail::kEps * (std::fabs(first) + std::fabs(second));
  return r;
}

/// kappa(gamma, beta) = gamma^rho exp(g(beta gamma^(-1/alpha))).
inline EvalResult kappa(const StableParams& params, const KappaQuery& q,
                        MethodChoice method = MethodChoice::Auto, const Tolerance& tol = {}) {
  q.check();
  const double scale = std::pow(q.gamma, params.rho());
  if (q.beta == 0.0) {
    return {scale, 0.0, method == MethodChoice::Auto ? MethodChoice::Series : method, 0};
  }
  const double b = q.beta * std::pow(q.gamma, -1.0 / params.alpha());
  const auto g = g_any_beta(params, b, method, tol);
  EvalResult out = g;
  out.value = scale * std::exp(g.value);
  out.abs_error_bound = std::fabs(out.value) * (std::expm1(g.abs_error_bound) +
                                                4.0 * detail::kEps * (1.0 + std::fabs(g.value)));
  return out;
}

/// 1 / ((theta + gamma) kappa(eta, gamma) kappa(eta, theta)). Symmetric in
/// (gamma, theta) bit for bit.
inline EvalResult exit_transform(const StableParams& params, double eta, double gamma,
                                 double theta, MethodChoice method = MethodChoice::Auto,
                                 const Tolerance& tol = {}) {
  if (!(eta > 0.0) || !std::isfinite(eta)) throw OutOfRange("eta must be > 0");
  if (!(gamma >= 0.0) || !(theta >= 0.0)) throw OutOfRange("gamma and theta must be >= 0");
  const double sum = theta + gamma;
  if (sum == 0.0) throw DivisionByZero("theta + gamma = 0");
  const auto kg = kappa(params, {eta, gamma}, method, tol);
  const auto kt = kappa(params, {eta, theta}, method, tol);
  const double prod = kg.value * kt.value;
  EvalResult out;
  out.value = 1.0 / (sum * prod);
  const double rel = kg.abs_error_bound / kg.value + kt.abs_error_bound / kt.value;
  out.abs_error_bound = std::fabs(out.value) * (rel / std::max(1.0 - rel, 0.5) + 4.0 * detail::kEps);
  out.method = kg.method == kt.method ? kg.method : MethodChoice::Auto;
  out.terms_or_nodes_used = kg.terms_or_nodes_used + kt.terms_or_nodes_used;
  out.heuristic_bound = kg.heuristic_bound || kt.heuristic_bound;
  return out;
}

}  // namespace ladder
