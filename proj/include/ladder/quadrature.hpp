#pragma once

// Reference evaluation of g and g' by globally adaptive Gauss-Kronrod
// quadrature of their integral representations over (0, inf).
//
// The half-line is cut at beta and 1 (plus a band around beta when the
// denominator is nearly singular). The head [0, s] is integrated in
// x = s t^2, the tail [1, inf) in x = u^-2 (the x -> 1/y substitution
// followed by y = u^2), which keeps every transformed integrand bounded.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <queue>
#include <span>
#include <string>
#include <vector>

#include "ladder/numeric.hpp"
#include "ladder/params.hpp"

namespace ladder {

struct QuadConfig {
  double abs_tol = 1e-10;
  double rel_tol = 1e-15;
  int max_refinements = 30;
  // Interior cut points in x; empty means the default {beta, 1}.
  std::vector<double> split_points;

  static QuadConfig from(const Tolerance& tol) {
    QuadConfig cfg;
    cfg.abs_tol = tol.abs_tol;
    cfg.max_refinements = tol.max_quad_refinements;
    return cfg;
  }

  void check() const {
    if (!(abs_tol > 0.0) || !(rel_tol > 0.0) || max_refinements < 1) {
      throw OutOfRange("quadrature tolerances must be positive");
    }
  }
};

struct QuadratureResult {
  double value = 0.0;
  double abs_error = 0.0;
  std::int64_t evaluations = 0;
};

struct Interval {
  double a;
  double b;
};

namespace detail {

// 15-point Kronrod extension of the 7-point Gauss rule (QUADPACK qk15).
inline constexpr std::array<double, 8> kKronrodNodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kKronrodWeights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
// Gauss weights for nodes 1, 3, 5 and the centre.
inline constexpr std::array<double, 4> kGaussWeights = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct RuleResult {
  double value;
  double error;
};

/// Kronrod estimate on [a, b] and |Kronrod - Gauss| as its error.
template <class F>
RuleResult gauss_kronrod_15(F&& f, double a, double b) {
  const double centre = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double fc = f(centre);
  double kronrod = kKronrodWeights[7] * fc;
  double gauss = kGaussWeights[3] * fc;
  for (int i = 0; i < 7; ++i) {
    const double dx = half * kKronrodNodes[i];
    const double pair = f(centre - dx) + f(centre + dx);
    kronrod += kKronrodWeights[i] * pair;
    if (i % 2 == 1) gauss += kGaussWeights[i / 2] * pair;
  }
  return {kronrod * half, std::fabs((kronrod - gauss) * half)};
}

struct Panel {
  int segment;
  double a;
  double b;
  double value;
  double error;
  int depth;
};

struct PanelOrder {
  bool operator()(const Panel& x, const Panel& y) const {
    if (x.error != y.error) return x.error < y.error;
    if (x.segment != y.segment) return x.segment > y.segment;
    return x.a > y.a;
  }
};

inline constexpr std::size_t kMaxPanels = std::size_t{1} << 16;

}  // namespace detail

/// Globally adaptive integration of f(segment, t) over each segment. The
/// panel with the largest error estimate is bisected until the summed
/// estimate drops below max(abs_tol, rel_tol |value|). Panels at depth
/// max_refinements are frozen. The final sum runs in segment/position order.
template <class F>
QuadratureResult integrate_segments(F&& f, std::span<const Interval> segments,
                                    const QuadConfig& cfg) {
  cfg.check();
  std::priority_queue<detail::Panel, std::vector<detail::Panel>, detail::PanelOrder> open;
  std::vector<detail::Panel> frozen;
  std::int64_t evaluations = 0;
  double total_value = 0.0;
  double total_error = 0.0;

  auto make_panel = [&](int seg, double a, double b, int depth) {
    auto rule = detail::gauss_kronrod_15([&](double t) { return f(seg, t); }, a, b);
    evaluations += 15;
    return detail::Panel{seg, a, b, rule.value, rule.error, depth};
  };

  for (int s = 0; s < static_cast<int>(segments.size()); ++s) {
    if (!(segments[s].b > segments[s].a)) continue;
    auto panel = make_panel(s, segments[s].a, segments[s].b, 0);
    total_value += panel.value;
    total_error += panel.error;
    open.push(panel);
  }

  auto threshold = [&] { return std::max(cfg.abs_tol, cfg.rel_tol * std::fabs(total_value)); };

  while (!open.empty() && total_error > threshold()) {
    if (open.size() + frozen.size() >= detail::kMaxPanels) break;
    const detail::Panel worst = open.top();
    open.pop();
    if (worst.depth >= cfg.max_refinements) {
      frozen.push_back(worst);
      continue;
    }
    const double mid = 0.5 * (worst.a + worst.b);
    auto left = make_panel(worst.segment, worst.a, mid, worst.depth + 1);
    auto right = make_panel(worst.segment, mid, worst.b, worst.depth + 1);
    total_value += (left.value + right.value) - worst.value;
    total_error += (left.error + right.error) - worst.error;
    open.push(left);
    open.push(right);
  }

  std::vector<detail::Panel> all = std::move(frozen);
  while (!open.empty()) {
    all.push_back(open.top());
    open.pop();
  }
  std::sort(all.begin(), all.end(), [](const detail::Panel& x, const detail::Panel& y) {
    return x.segment != y.segment ? x.segment < y.segment : x.a < y.a;
  });
  detail::CompensatedSum value;
  detail::CompensatedSum error;
  for (const auto& p : all) {
    value.add(p.value);
    error.add(p.error);
  }
  QuadratureResult out{value.value(), error.value(), evaluations};
  const double limit = std::max(cfg.abs_tol, cfg.rel_tol * std::fabs(out.value));
  if (!(out.abs_error <= limit)) {
    throw ConvergenceFailure("quadrature error estimate " + std::to_string(out.abs_error) +
                             " above tolerance " + std::to_string(limit) +
                             " after " + std::to_string(evaluations) + " evaluations");
  }
  return out;
}

template <class F>
QuadratureResult integrate(F&& f, double a, double b, const QuadConfig& cfg) {
  const Interval seg{a, b};
  return integrate_segments([&](int, double t) { return f(t); },
                            std::span<const Interval>(&seg, 1), cfg);
}

namespace detail {

/// Integrand on (0, inf) given in two forms: f(x) for finite x, and the tail
/// form f(u^-2) * 2 u^-3 evaluated stably in u.
template <class Body, class Tail>
QuadratureResult integrate_half_line(Body&& body, Tail&& tail, std::vector<double> cuts,
                                     const QuadConfig& cfg) {
  cuts.push_back(1.0);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  cuts.erase(std::remove_if(cuts.begin(), cuts.end(),
                            [](double c) { return !(c > 0.0) || !std::isfinite(c); }),
             cuts.end());

  std::vector<double> body_cuts;  // cuts in (0, 1]
  std::vector<double> tail_cuts;  // u = x^-1/2 for cuts > 1
  for (double c : cuts) {
    if (c <= 1.0) {
      body_cuts.push_back(c);
    } else {
      tail_cuts.push_back(1.0 / std::sqrt(c));
    }
  }
  std::sort(tail_cuts.begin(), tail_cuts.end());

  enum Kind { Head, Linear, TailKind };
  struct Segment {
    Kind kind;
    Interval range;
  };
  std::vector<Segment> segs;
  const double head_end = body_cuts.front();
  segs.push_back({Head, {0.0, 1.0}});
  for (std::size_t i = 0; i + 1 < body_cuts.size(); ++i) {
    segs.push_back({Linear, {body_cuts[i], body_cuts[i + 1]}});
  }
  double u_prev = 0.0;
  for (double u : tail_cuts) {
    segs.push_back({TailKind, {u_prev, u}});
    u_prev = u;
  }
  segs.push_back({TailKind, {u_prev, 1.0}});

  std::vector<Interval> ranges;
  ranges.reserve(segs.size());
  for (const auto& s : segs) ranges.push_back(s.range);

  auto integrand = [&](int seg, double t) -> double {
    switch (segs[seg].kind) {
      case Head: {
        if (t == 0.0) return 0.0;
        return body(head_end * t * t) * 2.0 * head_end * t;
      }
      case Linear:
        return body(t);
      case TailKind:
        return t == 0.0 ? 0.0 : tail(t);
    }
    return 0.0;
  };
  return integrate_segments(integrand, std::span<const Interval>(ranges), cfg);
}

inline constexpr double kPeakBand = 0.1;

inline std::vector<double> default_cuts(double rho, double beta, const QuadConfig& cfg) {
  std::vector<double> cuts = cfg.split_points;
  if (cuts.empty()) cuts = {beta, 1.0};
  if (rho > 0.9 || rho < 0.1) {
    cuts.push_back(beta * (1.0 - kPeakBand));
    cuts.push_back(beta * (1.0 + kPeakBand));
  }
  return cuts;
}

/// The raw integral is multiplied by prefactor afterwards; half the budget
/// is left for the rounding term of the scaled result.
inline QuadConfig inner_config(const QuadConfig& cfg, double prefactor) {
  QuadConfig inner = cfg;
  inner.abs_tol = 0.5 * cfg.abs_tol / prefactor;
  return inner;
}

}  // namespace detail

/// g(beta) = sin(pi rho)/pi * int_0^inf beta log(1 + x^alpha) /
///           (x^2 + 2 x beta cos(pi rho) + beta^2) dx
inline EvalResult g_quad(const StableParams& params, double beta, const QuadConfig& cfg) {
  if (beta == 0.0) return {0.0, 0.0, MethodChoice::Quadrature, 0};
  if (!(beta > 0.0) || !std::isfinite(beta)) throw OutOfRange("g_quad requires beta > 0");
  const double alpha = params.alpha();
  const double c = detail::cos_pi(params.rho());
  const double s = detail::sin_pi(params.rho());
  const double bc = beta * c;
  const double bs = beta * s;

  auto body = [&](double x) {
    const double shifted = x + bc;
    const double den = shifted * shifted + bs * bs;
    return beta * std::log1p(std::pow(x, alpha)) / den;
  };
  auto tail = [&](double u) {
    const double u2 = u * u;
    const double a = 1.0 + bc * u2;
    const double b = bs * u2;
    const double log_term = std::log1p(std::pow(u, 2.0 * alpha)) - 2.0 * alpha * std::log(u);
    return 2.0 * beta * u * log_term / (a * a + b * b);
  };
  const double pref = s / std::numbers::pi;
  const auto r = detail::integrate_half_line(body, tail, detail::default_cuts(params.rho(), beta, cfg),
                                             detail::inner_config(cfg, pref));
  return {pref * r.value, pref * r.abs_error + 2.0 * detail::kEps * std::fabs(pref * r.value),
          MethodChoice::Quadrature, r.evaluations};
}

/// g'(beta) = alpha sin(pi rho)/pi * int_0^inf x^alpha/(1 + x^alpha) /
///            (x^2 + 2 x beta cos(pi rho) + beta^2) dx
inline EvalResult gprime_quad(const StableParams& params, double beta, const QuadConfig& cfg) {
  if (!(beta > 0.0) || !std::isfinite(beta)) throw OutOfRange("gprime_quad requires beta > 0");
  const double alpha = params.alpha();
  const double c = detail::cos_pi(params.rho());
  const double s = detail::sin_pi(params.rho());
  const double bc = beta * c;
  const double bs = beta * s;

  auto body = [&](double x) {
    const double xa = std::pow(x, alpha);
    const double shifted = x + bc;
    const double den = shifted * shifted + bs * bs;
    return xa / (1.0 + xa) / den;
  };
  auto tail = [&](double u) {
    const double u2 = u * u;
    const double a = 1.0 + bc * u2;
    const double b = bs * u2;
    return 2.0 * u / ((1.0 + std::pow(u, 2.0 * alpha)) * (a * a + b * b));
  };
  const double pref = alpha * s / std::numbers::pi;
  const auto r = detail::integrate_half_line(body, tail, detail::default_cuts(params.rho(), beta, cfg),
                                             detail::inner_config(cfg, pref));
  return {pref * r.value, pref * r.abs_error + 2.0 * detail::kEps * std::fabs(pref * r.value),
          MethodChoice::Quadrature, r.evaluations};
}

}  // namespace ladder
