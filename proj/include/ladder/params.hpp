#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace ladder {

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A parameter lies outside the domain of the requested operation.
class OutOfRange : public Error {
 public:
  using Error::Error;
};

/// The refinement or term budget ran out before the error target was met.
class ConvergenceFailure : public Error {
 public:
  using Error::Error;
};

/// Small divisors make the series unusable at the requested tolerance.
class IllConditioned : public Error {
 public:
  using Error::Error;
};

class InsufficientData : public Error {
 public:
  using Error::Error;
};

/// log(0) encountered in a closed-form finite sum.
class DegenerateLog : public Error {
 public:
  using Error::Error;
};

class DivisionByZero : public Error {
 public:
  using Error::Error;
};

/// The requested evaluator has no formula for these parameters.
class NotApplicable : public Error {
 public:
  using Error::Error;
};

// ---------------------------------------------------------------------------
// Method selection
// ---------------------------------------------------------------------------

enum class MethodChoice { Auto, Series, Quadrature, Rational, Doney };

constexpr std::string_view to_string(MethodChoice m) {
  switch (m) {
    case MethodChoice::Auto: return "auto";
    case MethodChoice::Series: return "series";
    case MethodChoice::Quadrature: return "quadrature";
    case MethodChoice::Rational: return "rational";
    case MethodChoice::Doney: return "doney";
  }
  return "unknown";
}

inline std::optional<MethodChoice> parse_method(std::string_view name) {
  for (auto m : {MethodChoice::Auto, MethodChoice::Series, MethodChoice::Quadrature,
                 MethodChoice::Rational, MethodChoice::Doney}) {
    if (to_string(m) == name) return m;
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Tolerances and results
// ---------------------------------------------------------------------------

struct Tolerance {
  double abs_tol = 1e-10;
  int max_terms = 10000;
  int max_quad_refinements = 30;

  void check() const {
    if (!(abs_tol > 0.0) || max_terms < 1 || max_quad_refinements < 1) {
      throw OutOfRange("tolerance settings must be positive");
    }
  }
};

struct EvalResult {
  double value = 0.0;
  double abs_error_bound = 0.0;
  MethodChoice method = MethodChoice::Auto;
  std::int64_t terms_or_nodes_used = 0;
  // Set when the bound rests on an estimated irrationality exponent.
  bool heuristic_bound = false;
};

// ---------------------------------------------------------------------------
// Stable parameters
// ---------------------------------------------------------------------------

class StableParams;
StableParams validate(double alpha, double rho);

/// Admissible (alpha, rho) pair. Only constructible through validate().
class StableParams {
 public:
  double alpha() const { return alpha_; }
  double rho() const { return rho_; }

  friend bool operator==(const StableParams&, const StableParams&) = default;

 private:
  StableParams(double alpha, double rho) : alpha_(alpha), rho_(rho) {}
  friend StableParams validate(double alpha, double rho);

  double alpha_;
  double rho_;
};

/// Accepts 0 < alpha <= 2 and rho in [1 - 1/alpha, 1/alpha] intersected with
/// (0, 1). The endpoints are compared exactly against 1/alpha as rounded in
/// double precision.
inline StableParams validate(double alpha, double rho) {
  if (!(alpha > 0.0 && alpha <= 2.0)) {
    throw OutOfRange("alpha must lie in (0, 2], got " + std::to_string(alpha));
  }
  const double upper = 1.0 / alpha;
  const double lower = 1.0 - upper;
  if (!(rho > 0.0 && rho < 1.0 && rho >= lower && rho <= upper)) {
    throw OutOfRange("rho must lie in [1 - 1/alpha, 1/alpha] and (0, 1), got " +
                     std::to_string(rho));
  }
  return StableParams(alpha, rho);
}

}  // namespace ladder
