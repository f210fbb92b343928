#pragma once

// Low-level helpers shared by the evaluators: extended-precision argument
// reduction for sin(pi*m*x), compensated accumulation and Chebyshev U.

#include <cmath>
#include <limits>
#include <numbers>

namespace ladder::detail {

inline constexpr double kEps = std::numeric_limits<double>::epsilon();

/// Unevaluated sum hi + lo, |lo| <= ulp(hi)/2.
struct DoubleDouble {
  double hi = 0.0;
  double lo = 0.0;
};

inline DoubleDouble exact(double x) { return {x, 0.0}; }

/// 1/x with a correction term; 1 - hi*x is exact under FMA.
inline DoubleDouble reciprocal(double x) {
  const double hi = 1.0 / x;
  const double residual = std::fma(-hi, x, 1.0);
  return {hi, residual / x};
}

inline DoubleDouble product(double a, double b) {
  const double hi = a * b;
  return {hi, std::fma(a, b, -hi)};
}

/// a * (x.hi + x.lo) to roughly double-double accuracy.
inline DoubleDouble product(double a, DoubleDouble x) {
  const double hi = a * x.hi;
  return {hi, std::fma(a, x.hi, -hi) + a * x.lo};
}

struct Reduced {
  double r;  // m*x = n + r with |r| <= 1/2
  bool odd;  // parity of n
};

/// Reduces m*x modulo 2 without forming the rounded product. Exact in the
/// leading part for |m*x| < 2^52.
inline Reduced reduce(double m, DoubleDouble x) {
  const double p = m * x.hi;
  const double e = std::fma(m, x.hi, -p) + m * x.lo;
  double n = std::nearbyint(p);
  double r = (p - n) + e;
  if (r > 0.5) {
    r -= 1.0;
    n += 1.0;
  } else if (r < -0.5) {
    r += 1.0;
    n -= 1.0;
  }
  return {r, std::fmod(n, 2.0) != 0.0};
}

/// sin(pi * m * x)
inline double sin_pi(double m, DoubleDouble x) {
  const auto [r, odd] = reduce(m, x);
  const double s = std::sin(std::numbers::pi * r);
  return odd ? -s : s;
}

/// cos(pi * m * x)
inline double cos_pi(double m, DoubleDouble x) {
  const auto [r, odd] = reduce(m, x);
  const double c = std::cos(std::numbers::pi * r);
  return odd ? -c : c;
}

inline double sin_pi(double x) { return sin_pi(1.0, exact(x)); }
inline double cos_pi(double x) { return cos_pi(1.0, exact(x)); }

/// (-1)^n for integer-valued n.
inline double sign_power(long long n) { return (n % 2 == 0) ? 1.0 : -1.0; }

/// Neumaier's variant of Kahan summation. Also tracks sum |x_i| so callers
/// can bound the accumulated rounding of the terms themselves.
class CompensatedSum {
 public:
  void add(double v) {
    const double t = sum_ + v;
    if (std::fabs(sum_) >= std::fabs(v)) {
      comp_ += (sum_ - t) + v;
    } else {
      comp_ += (v - t) + sum_;
    }
    sum_ = t;
    magnitude_ += std::fabs(v);
  }
  double value() const { return sum_ + comp_; }
  double magnitude() const { return magnitude_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
  double magnitude_ = 0.0;
};

/// Chebyshev polynomial of the second kind, U_j(c), with U_{-1} = 0.
inline double chebyshev_u(int j, double c) {
  if (j < 0) return 0.0;
  double prev = 0.0;  // U_{-1}
  double cur = 1.0;   // U_0
  for (int i = 1; i <= j; ++i) {
    const double next = 2.0 * c * cur - prev;
    prev = cur;
    cur = next;
  }
  return cur;
}

}  // namespace ladder::detail
