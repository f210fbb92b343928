#pragma once

// Command-line front end. Kept in a header so the test suite can drive
// run_cli() in-process.

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <functional>
#include <iomanip>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "ladder/ladder.hpp"

namespace ladder::cli {

using json = nlohmann::ordered_json;

enum ExitCode : int { kOk = 0, kInvalid = 1, kFailure = 2 };

/// Shortest representation that reads back to the same double.
inline std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return ec == std::errc{} ? std::string(buf, end) : std::string("nan");
}

inline json json_number(double v) {
  if (!std::isfinite(v)) return json(format_double(v));
  return json(v);
}

struct Record {
  std::string quantity;
  double alpha = 0.0;
  double rho = 0.0;
  std::optional<double> beta;
  std::optional<double> gamma;
  std::optional<double> eta;
  std::optional<double> theta;
  std::string method;
  std::optional<double> value;
  std::optional<double> abs_error_bound;
  std::int64_t terms_or_nodes_used = 0;
  bool heuristic_bound = false;
  std::string status = "ok";

  void set(const EvalResult& r) {
    value = r.value;
    abs_error_bound = r.abs_error_bound;
    method = std::string(to_string(r.method));
    terms_or_nodes_used = r.terms_or_nodes_used;
    heuristic_bound = r.heuristic_bound;
  }

  json to_json() const {
    json j;
    j["quantity"] = quantity;
    j["alpha"] = json_number(alpha);
    j["rho"] = json_number(rho);
    if (beta) j["beta"] = json_number(*beta);
    if (gamma) j["gamma"] = json_number(*gamma);
    if (eta) j["eta"] = json_number(*eta);
    if (theta) j["theta"] = json_number(*theta);
    j["method"] = method;
    j["value"] = value ? json_number(*value) : json(nullptr);
    j["abs_error_bound"] = abs_error_bound ? json_number(*abs_error_bound) : json(nullptr);
    j["terms_or_nodes_used"] = terms_or_nodes_used;
    j["heuristic_bound"] = heuristic_bound;
    j["status"] = status;
    return j;
  }

  static std::string csv_header() {
    return "quantity,alpha,rho,beta,gamma,eta,theta,method,value,abs_error_bound,"
           "terms_or_nodes_used,heuristic_bound,status";
  }

  std::string csv_row() const {
    auto opt = [](const std::optional<double>& v) { return v ? format_double(*v) : std::string(); };
    std::ostringstream s;
    s << quantity << ',' << format_double(alpha) << ',' << format_double(rho) << ',' << opt(beta)
      << ',' << opt(gamma) << ',' << opt(eta) << ',' << opt(theta) << ',' << method << ','
      << opt(value) << ',' << opt(abs_error_bound) << ',' << terms_or_nodes_used << ','
      << (heuristic_bound ? "true" : "false") << ',' << status;
    return s.str();
  }

  std::string text() const {
    auto opt = [](const std::optional<double>& v) { return v ? format_double(*v) : std::string("-"); };
    std::ostringstream s;
    s << quantity << "  alpha=" << format_double(alpha) << " rho=" << format_double(rho);
    if (beta) s << " beta=" << format_double(*beta);
    if (gamma) s << " gamma=" << format_double(*gamma);
    if (eta) s << " eta=" << format_double(*eta);
    if (theta) s << " theta=" << format_double(*theta);
    s << "\n  value            " << opt(value) << "\n  abs_error_bound  " << opt(abs_error_bound)
      << (heuristic_bound ? " (heuristic)" : "") << "\n  method           " << method
      << "\n  terms/nodes      " << terms_or_nodes_used << "\n  status           " << status;
    return s.str();
  }
};

inline void emit(std::ostream& out, const Record& r, const std::string& format) {
  if (format == "csv") {
    out << Record::csv_header() << '\n' << r.csv_row() << '\n';
  } else if (format == "text") {
    out << r.text() << '\n';
  } else {
    out << r.to_json().dump() << '\n';
  }
}

/// Runs f and folds library errors into the record status. Returns the exit code.
inline int guarded(Record& rec, std::ostream& err, const std::function<EvalResult()>& f) {
  try {
    rec.set(f());
    return kOk;
  } catch (const OutOfRange& e) {
    rec.status = "invalid_params";
    err << "error: " << e.what() << '\n';
    return kInvalid;
  } catch (const NotApplicable& e) {
    rec.status = "invalid_params";
    err << "error: " << e.what() << '\n';
    return kInvalid;
  } catch (const DivisionByZero& e) {
    rec.status = "invalid_params";
    err << "error: " << e.what() << '\n';
    return kInvalid;
  } catch (const Error& e) {
    rec.status = "convergence_failure";
    err << "error: " << e.what() << '\n';
    return kFailure;
  }
}

struct Shared {
  double alpha = std::numeric_limits<double>::quiet_NaN();
  double rho = std::numeric_limits<double>::quiet_NaN();
  double beta = std::numeric_limits<double>::quiet_NaN();
  double gamma = 1.0;
  std::string method = "auto";
  double tol = 1e-10;
  int max_terms = 10000;
  std::string format = "json";
  bool derivative = false;

  Tolerance tolerance() const {
    Tolerance t;
    t.abs_tol = tol;
    t.max_terms = max_terms;
    return t;
  }
  MethodChoice method_choice() const { return *parse_method(method); }
};

inline void add_point_flags(CLI::App* cmd, Shared& s, bool need_beta = true) {
  cmd->add_option("--alpha", s.alpha, "stability index, 0 < alpha <= 2")->required();
  cmd->add_option("--rho", s.rho, "positivity parameter")->required();
  auto* beta = cmd->add_option("--beta", s.beta, "argument of g");
  if (need_beta) beta->required();
}

inline void add_eval_flags(CLI::App* cmd, Shared& s, std::vector<std::string> formats) {
  cmd->add_option("--method", s.method, "auto, series, quadrature, rational or doney")
      ->check(CLI::IsMember({"auto", "series", "quadrature", "rational", "doney"}));
  cmd->add_option("--tol", s.tol, "absolute tolerance")->check(CLI::PositiveNumber);
  cmd->add_option("--max-terms", s.max_terms, "series term budget")->check(CLI::PositiveNumber);
  cmd->add_option("--format", s.format, "output format")->check(CLI::IsMember(formats));
}

// ---------------------------------------------------------------------------

inline int cmd_eval(const Shared& s, std::ostream& out, std::ostream& err) {
  Record rec;
  rec.quantity = s.derivative ? "gprime" : "g";
  rec.alpha = s.alpha;
  rec.rho = s.rho;
  rec.beta = s.beta;
  rec.method = s.method;
  const int code = guarded(rec, err, [&] {
    const auto params = validate(s.alpha, s.rho);
    return s.derivative ? gprime_any_beta(params, s.beta, s.method_choice(), s.tolerance())
                        : g_any_beta(params, s.beta, s.method_choice(), s.tolerance());
  });
  emit(out, rec, s.format);
  return code;
}

inline int cmd_kappa(const Shared& s, const std::vector<double>& transform, std::ostream& out,
                     std::ostream& err) {
  Record rec;
  rec.alpha = s.alpha;
  rec.rho = s.rho;
  rec.method = s.method;
  int code;
  if (!transform.empty()) {
    rec.quantity = "exit_transform";
    rec.eta = transform[0];
    rec.gamma = transform[1];
    rec.theta = transform[2];
    code = guarded(rec, err, [&] {
      const auto params = validate(s.alpha, s.rho);
      return exit_transform(params, transform[0], transform[1], transform[2], s.method_choice(),
                            s.tolerance());
    });
  } else {
    rec.quantity = "kappa";
    rec.gamma = s.gamma;
    rec.beta = s.beta;
    code = guarded(rec, err, [&] {
      const auto params = validate(s.alpha, s.rho);
      if (std::isnan(s.beta)) throw OutOfRange("--beta is required without --transform");
      return kappa(params, {s.gamma, s.beta}, s.method_choice(), s.tolerance());
    });
  }
  emit(out, rec, s.format);
  return code;
}

struct TableSpec {
  double from = 0.1;
  double to = 0.9;
  int steps = 9;
  std::vector<double> gammas;
  int threads = 1;
};

inline int cmd_table(const Shared& s, const TableSpec& t, std::ostream& out, std::ostream& err) {
  if (t.steps < 1 || !(t.to >= t.from) || (t.steps > 1 && t.to == t.from)) {
    err << "error: empty beta range\n";
    return kInvalid;
  }
  try {
    (void)validate(s.alpha, s.rho);
  } catch (const OutOfRange& e) {
    err << "error: " << e.what() << '\n';
    return kInvalid;
  }
  struct Point {
    double beta;
    std::optional<double> gamma;
  };
  std::vector<Point> points;
  std::vector<double> gammas = t.gammas;
  std::vector<std::optional<double>> gamma_axis;
  if (gammas.empty()) {
    gamma_axis.push_back(std::nullopt);
  } else {
    for (double g : gammas) gamma_axis.push_back(g);
  }
  for (const auto& g : gamma_axis) {
    for (int i = 0; i < t.steps; ++i) {
      const double beta =
          t.steps == 1 ? t.from : t.from + (t.to - t.from) * static_cast<double>(i) / (t.steps - 1);
      points.push_back({beta, g});
    }
  }

  std::vector<Record> rows(points.size());
  std::vector<int> codes(points.size(), kOk);
  std::vector<std::string> messages(points.size());
  auto work = [&](std::size_t i) {
    Record& rec = rows[i];
    rec.alpha = s.alpha;
    rec.rho = s.rho;
    rec.beta = points[i].beta;
    rec.gamma = points[i].gamma;
    rec.method = s.method;
    std::ostringstream msg;
    const auto params = validate(s.alpha, s.rho);
    if (points[i].gamma) {
      rec.quantity = "kappa";
      codes[i] = guarded(rec, msg, [&] {
        return kappa(params, {*points[i].gamma, points[i].beta}, s.method_choice(), s.tolerance());
      });
    } else {
      rec.quantity = s.derivative ? "gprime" : "g";
      codes[i] = guarded(rec, msg, [&] {
        return s.derivative ? gprime_any_beta(params, points[i].beta, s.method_choice(), s.tolerance())
                            : g_any_beta(params, points[i].beta, s.method_choice(), s.tolerance());
      });
    }
    messages[i] = msg.str();
  };

  const int threads = std::max(1, std::min<int>(t.threads, static_cast<int>(points.size())));
  if (threads == 1) {
    for (std::size_t i = 0; i < points.size(); ++i) work(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> pool;
    for (int w = 0; w < threads; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < points.size(); i = next++) work(i);
      });
    }
  }

  int code = kOk;
  if (s.format == "csv") out << Record::csv_header() << '\n';
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (s.format == "csv") {
      out << rows[i].csv_row() << '\n';
    } else {
      out << rows[i].to_json().dump() << '\n';
    }
    err << messages[i];
    code = std::max(code, codes[i]);
  }
  return code;
}

struct MethodOutcome {
  std::string name;
  std::optional<EvalResult> result;
  std::string note;
};

inline int cmd_compare(const Shared& s, std::ostream& out, std::ostream& err) {
  std::optional<StableParams> params;
  try {
    params = validate(s.alpha, s.rho);
    if (!(s.beta > 0.0)) throw OutOfRange("compare requires beta > 0");
  } catch (const OutOfRange& e) {
    err << "error: " << e.what() << '\n';
    return kInvalid;
  }
  const auto tol = s.tolerance();
  std::vector<MethodChoice> methods = {MethodChoice::Quadrature, MethodChoice::Series,
                                       MethodChoice::Doney};
  if (s.derivative) methods.push_back(MethodChoice::Rational);

  std::vector<MethodOutcome> outcomes;
  for (auto m : methods) {
    MethodOutcome o{std::string(to_string(m)), std::nullopt, ""};
    try {
      if (s.derivative && m == MethodChoice::Doney) throw NotApplicable("g' has no Doney form");
      if (!s.derivative && m == MethodChoice::Rational) throw NotApplicable("g has no rational form");
      auto r = s.derivative ? gprime_any_beta(*params, s.beta, m, tol)
                            : g_any_beta(*params, s.beta, m, tol);
      if (r.method != m) {
        o.note = "skipped: overridden by " + std::string(to_string(r.method));
      } else {
        o.result = r;
      }
    } catch (const IllConditioned&) {
      o.note = "skipped: ill-conditioned";
    } catch (const NotApplicable&) {
      o.note = "skipped: not applicable";
    } catch (const ConvergenceFailure&) {
      o.note = "skipped: convergence failure";
    } catch (const Error& e) {
      o.note = std::string("skipped: ") + e.what();
    }
    outcomes.push_back(std::move(o));
  }

  const std::size_t n = outcomes.size();
  std::vector<std::vector<std::optional<double>>> delta(n, std::vector<std::optional<double>>(n));
  bool within = true;
  double max_delta = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (!outcomes[i].result || !outcomes[j].result) continue;
      const auto& a = *outcomes[i].result;
      const auto& b = *outcomes[j].result;
      const double d = std::fabs(a.value - b.value);
      delta[i][j] = d;
      max_delta = std::max(max_delta, d);
      if (d > a.abs_error_bound + b.abs_error_bound) within = false;
    }
  }

  if (s.format == "json") {
    json j;
    j["quantity"] = s.derivative ? "gprime" : "g";
    j["alpha"] = json_number(s.alpha);
    j["rho"] = json_number(s.rho);
    j["beta"] = json_number(s.beta);
    json rows = json::array();
    for (const auto& o : outcomes) {
      json r;
      r["method"] = o.name;
      if (o.result) {
        r["value"] = json_number(o.result->value);
        r["abs_error_bound"] = json_number(o.result->abs_error_bound);
        r["terms_or_nodes_used"] = o.result->terms_or_nodes_used;
        r["status"] = "ok";
      } else {
        r["status"] = o.note;
      }
      rows.push_back(r);
    }
    j["methods"] = rows;
    json matrix = json::array();
    for (std::size_t i = 0; i < n; ++i) {
      json row = json::array();
      for (std::size_t k = 0; k < n; ++k) {
        row.push_back(delta[i][k] ? json_number(*delta[i][k]) : json(nullptr));
      }
      matrix.push_back(row);
    }
    j["delta"] = matrix;
    j["max_delta"] = json_number(max_delta);
    j["within_bounds"] = within;
    out << j.dump() << '\n';
  } else {
    out << (s.derivative ? "g'" : "g") << "  alpha=" << format_double(s.alpha)
        << " rho=" << format_double(s.rho) << " beta=" << format_double(s.beta) << '\n';
    for (const auto& o : outcomes) {
      out << "  " << std::left << std::setw(12) << o.name;
      if (o.result) {
        out << format_double(o.result->value) << "  +- " << format_double(o.result->abs_error_bound)
            << "  (" << o.result->terms_or_nodes_used << ")\n";
      } else {
        out << o.note << '\n';
      }
    }
    out << "  |delta|";
    for (const auto& o : outcomes) out << "  " << std::setw(12) << o.name;
    out << '\n';
    for (std::size_t i = 0; i < n; ++i) {
      out << "  " << std::setw(12) << outcomes[i].name;
      for (std::size_t k = 0; k < n; ++k) {
        out << "  " << std::setw(12) << (delta[i][k] ? format_double(*delta[i][k]) : "-");
      }
      out << '\n';
    }
    out << "  max |delta| " << format_double(max_delta) << (within ? " within" : " EXCEEDS")
        << " summed bounds\n";
  }
  return within ? kOk : kFailure;
}

inline std::string recommend(const AlphaClass& ac, const std::optional<StableParams>& params) {
  if (params && find_doney_case(*params)) return "doney";
  switch (ac.kind) {
    case AlphaKind::Rational: return "quadrature (g), rational (g')";
    case AlphaKind::Irrational: return "series";
    case AlphaKind::IllConditioned: return "quadrature";
  }
  return "quadrature";
}

inline int cmd_classify(const Shared& s, std::ostream& out, std::ostream& err) {
  AlphaClass ac;
  std::optional<StableParams> params;
  const double beta = std::isnan(s.beta) ? kDefaultConditioningBeta : s.beta;
  try {
    ac = classify(s.alpha, s.tolerance(), beta);
    if (!std::isnan(s.rho)) params = validate(s.alpha, s.rho);
  } catch (const OutOfRange& e) {
    err << "error: " << e.what() << '\n';
    return kInvalid;
  }
  const auto& cf = ac.expansion;
  const bool has_exponent = ac.kind == AlphaKind::Irrational ||
                            (ac.kind == AlphaKind::IllConditioned && std::isfinite(ac.exponent_estimate));
  if (s.format == "json") {
    json j;
    j["alpha"] = json_number(s.alpha);
    j["beta"] = json_number(beta);
    j["kind"] = std::string(to_string(ac.kind));
    if (ac.kind == AlphaKind::Rational) {
      j["p"] = ac.p;
      j["q"] = ac.q;
    }
    j["exponent_estimate"] = has_exponent ? json_number(ac.exponent_estimate) : json(nullptr);
    j["quotients"] = cf.quotients;
    json conv = json::array();
    for (const auto& c : cf.convergents) conv.push_back(json::array({c.p, c.q}));
    j["convergents"] = conv;
    if (ac.kind != AlphaKind::Rational && has_exponent) {
      j["inverse_floor_constant"] = json_number(ac.inverse_floor.constant);
      j["direct_floor_constant"] = json_number(ac.direct_floor.constant);
      j["projected_terms"] = json::array({ac.first_series.terms, ac.second_series.terms});
    }
    j["recommended_method"] = recommend(ac, params);
    out << j.dump() << '\n';
  } else {
    out << "alpha            " << format_double(s.alpha) << '\n';
    out << "kind             " << to_string(ac.kind);
    if (ac.kind == AlphaKind::Rational) out << " (" << ac.p << '/' << ac.q << ')';
    out << '\n';
    out << "quotients        [";
    for (std::size_t i = 0; i < cf.quotients.size(); ++i) {
      out << (i == 0 ? "" : i == 1 ? "; " : ", ") << cf.quotients[i];
    }
    out << "]\nconvergents     ";
    for (std::size_t i = 0; i < std::min<std::size_t>(cf.convergents.size(), 12); ++i) {
      out << (i ? ", " : "") << cf.convergents[i].p << '/' << cf.convergents[i].q;
    }
    if (cf.convergents.size() > 12) out << ", ...";
    out << '\n';
    if (has_exponent) out << "exponent (N^)    " << format_double(ac.exponent_estimate) << '\n';
    if (ac.kind != AlphaKind::Rational && has_exponent) {
      out << "projected terms  " << ac.first_series.terms << " + " << ac.second_series.terms
          << " at beta=" << format_double(beta) << '\n';
    }
    out << "recommended      " << recommend(ac, params) << '\n';
  }
  return kOk;
}

// ---------------------------------------------------------------------------
// Self-test
// ---------------------------------------------------------------------------

struct Check {
  std::string group;
  std::string name;
  double value = 0.0;
  double reference = 0.0;
  double allowed = 0.0;
  std::string error;

  bool pass() const {
    return error.empty() && std::isfinite(value) && std::fabs(value - reference) <= allowed;
  }
};

inline std::vector<std::string> kSelftestGroups = {"kernels", "aux", "reflection", "limit",
                                                    "closed-forms"};

/// value/reference/allowed computed by f; library errors become failures.
inline Check run_check(std::string group, std::string name,
                       const std::function<void(Check&)>& f) {
  Check c;
  c.group = std::move(group);
  c.name = std::move(name);
  try {
    f(c);
  } catch (const std::exception& e) {
    c.error = e.what();
  }
  return c;
}

inline std::vector<Check> selftest_checks(const std::vector<std::string>& groups, double tol) {
  using std::numbers::pi;
  Tolerance t;
  t.abs_tol = tol;
  auto wanted = [&](const std::string& g) {
    return groups.empty() || std::find(groups.begin(), groups.end(), g) != groups.end();
  };
  std::vector<Check> checks;

  if (wanted("kernels")) {
    checks.push_back(run_check("kernels", "alternating sine sum z=1 w=0.3 M=1e5", [&](Check& c) {
      const auto k = kernel_tmp1(1.0, 0.3, 100000);
      c.value = k.partial_sum;
      c.reference = k.closed_form;
      c.allowed = tol + kernel_tmp1_envelope(1.0, 0.3, 100000);
    }));
    checks.push_back(run_check("kernels", "partial fractions of pi/sin z=1/3 K=1e5", [&](Check& c) {
      const auto k = kernel_tmp2(1.0 / 3.0, 100000);
      c.value = k.partial_sum;
      c.reference = 2.0 * pi / std::sqrt(3.0);
      c.allowed = tol + kernel_tmp2_envelope(1.0 / 3.0, 100000);
    }));
    checks.push_back(run_check("kernels", "finite sine sum p=0.5 x=1 n=7", [&](Check& c) {
      const auto k = kernel_tmp3(0.5, 1.0, 7);
      c.value = k.partial_sum;
      c.reference = k.closed_form;
      c.allowed = tol;
    }));
    checks.push_back(run_check("kernels", "Poisson kernel x=0.5 z=1 M=60", [&](Check& c) {
      const auto k = kernel_poisson(0.5, 1.0, 60);
      c.value = k.partial_sum;
      c.reference = k.closed_form;
      c.allowed = tol + kernel_poisson_envelope(0.5, 60);
    }));
  }

  if (wanted("aux")) {
    checks.push_back(run_check("aux", "int0b p=1 b=1/2", [&](Check& c) {
      const auto r = aux_int0b(1.0, 0.5, t);
      c.value = r.value;
      c.reference = 0.5 - std::log(1.5);
      c.allowed = tol;
    }));
    checks.push_back(run_check("aux", "intbinfty p=1/2 b=1", [&](Check& c) {
      c.value = aux_intbinfty(0.5, 1.0, t).value;
      c.reference = pi / 2.0;
      c.allowed = tol;
    }));
    checks.push_back(run_check("aux", "intbinfty p=1 b=1/2", [&](Check& c) {
      c.value = aux_intbinfty(1.0, 0.5, t).value;
      c.reference = std::log(3.0);
      c.allowed = tol;
    }));
    checks.push_back(run_check("aux", "intbinfty p=2+1e-5 -> p=2, b=1/2", [&](Check& c) {
      c.value = aux_intbinfty(2.0 + 1e-5, 0.5, t).value;
      c.reference = aux_intbinfty(2.0, 0.5, t).value;
      c.allowed = 1e-4;  // first-order in p - 2
    }));
  }

  if (wanted("reflection")) {
    for (double beta : {1.5, 2.0, 5.0}) {
      checks.push_back(run_check("reflection", "alpha=sqrt2 rho=0.5 beta=" + format_double(beta),
                                 [&](Check& c) {
        const auto params = validate(std::sqrt(2.0), 0.5);
        const auto hi = g_any_beta(params, beta, MethodChoice::Quadrature, t);
        const auto lo = g_any_beta(params, 1.0 / beta, MethodChoice::Auto, t);
        c.value = hi.value - lo.value;
        c.reference = params.alpha() * params.rho() * std::log(beta);
        c.allowed = tol + hi.abs_error_bound + lo.abs_error_bound;
      }));
    }
  }

  if (wanted("limit")) {
    const RationalAlpha half(1, 2);
    checks.push_back(run_check("limit", "resonant pairs n<=20 (p/q=1/2)", [&](Check& c) {
      double worst = 0.0;
      for (std::int64_t n = 1; n <= 20; ++n) {
        const auto r = resonant_terms(half, 0.5, 0.4, n);
        worst = std::max(worst, std::fabs(r.log_term + r.cos_term -
                                          resonant_limit_term(half, 0.5, 0.4, n)));
      }
      c.value = worst;
      c.reference = 0.0;
      c.allowed = tol;
    }));
    checks.push_back(run_check("limit", "alpha_j -> 1/2, j=40 closer than j=10", [&](Check& c) {
      const double limit = gprime_rational(half, 0.5, 0.4, t).value;
      auto at = [&](int j) {
        const double a = 0.5 + std::sqrt(2.0) / j;
        return gprime_series(validate(a, 0.5), 0.4, t, classify(a, t, 0.4)).value;
      };
      const double e10 = std::fabs(at(10) - limit);
      const double e40 = std::fabs(at(40) - limit);
      c.value = e40 < e10 ? 0.0 : e40 - e10;
      c.reference = 0.0;
      c.allowed = 0.0;
    }));
  }

  if (wanted("closed-forms")) {
    checks.push_back(run_check("closed-forms", "doney k=l=1 alpha=0.8 beta=0.5", [&](Check& c) {
      const auto params = validate(0.8, 0.25);
      const auto r = g_doney(params, 0.5, {1, 1});
      c.value = r.value;
      c.reference = std::log(0.5) - std::log1p(-std::pow(0.5, 0.8));
      c.allowed = tol;
    }));
    checks.push_back(run_check("closed-forms", "one-sided alpha=1.5 rho=2/3 beta=0.5", [&](Check& c) {
      const auto r = g_any_beta(validate(1.5, 2.0 / 3.0), 0.5, MethodChoice::Auto, t);
      c.value = r.value;
      c.reference = std::log(1.5);
      c.allowed = tol + r.abs_error_bound;
    }));
    checks.push_back(run_check("closed-forms", "g_k k=4 a=0.21 x=0.6 vs 400 terms", [&](Check& c) {
      c.value = g_k_closed(0.21, 0.6, 4);
      c.reference = g_k_series(0.21, 0.6, 4, 400);
      c.allowed = std::max(tol, 1e-10);
    }));
    checks.push_back(run_check("closed-forms", "alpha=1/2 rational vs closed rho=0.3 beta=0.4",
                               [&](Check& c) {
      const auto r = gprime_rational(RationalAlpha(1, 2), 0.3, 0.4, t);
      c.value = r.value;
      c.reference = gprime_half_closed(0.3, 0.4);
      c.allowed = tol + r.abs_error_bound;
    }));
  }
  return checks;
}

inline int cmd_selftest(const Shared& s, const std::vector<std::string>& only, std::ostream& out,
                        std::ostream& err) {
  for (const auto& g : only) {
    if (std::find(kSelftestGroups.begin(), kSelftestGroups.end(), g) == kSelftestGroups.end()) {
      err << "error: unknown selftest group '" << g << "'\n";
      return kInvalid;
    }
  }
  const auto checks = selftest_checks(only, s.tol);
  int failures = 0;
  for (const auto& c : checks) {
    if (!c.pass()) ++failures;
    if (s.format == "json") {
      json j;
      j["group"] = c.group;
      j["check"] = c.name;
      j["value"] = json_number(c.value);
      j["reference"] = json_number(c.reference);
      j["delta"] = json_number(std::fabs(c.value - c.reference));
      j["allowed"] = json_number(c.allowed);
      j["pass"] = c.pass();
      if (!c.error.empty()) j["error"] = c.error;
      out << j.dump() << '\n';
    } else {
      out << (c.pass() ? "PASS  " : "FAIL  ") << std::left << std::setw(13) << c.group
          << std::setw(46) << c.name;
      if (c.error.empty()) {
        out << " |delta|=" << format_double(std::fabs(c.value - c.reference))
            << " allowed=" << format_double(c.allowed);
      } else {
        out << " error: " << c.error;
      }
      out << '\n';
    }
  }
  if (s.format != "json") {
    out << checks.size() - failures << '/' << checks.size() << " checks passed\n";
  }
  return failures == 0 ? kOk : kFailure;
}

// ---------------------------------------------------------------------------

inline int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"g, g' and kappa for alpha-stable ladder processes", "ladder"};
  app.require_subcommand(1);

  Shared eval_s, kappa_s, table_s, compare_s, classify_s, selftest_s;

  auto* eval = app.add_subcommand("eval", "evaluate g(beta), or g'(beta) with --derivative");
  add_point_flags(eval, eval_s);
  add_eval_flags(eval, eval_s, {"json", "csv", "text"});
  eval->add_flag("--derivative", eval_s.derivative, "evaluate g' instead of g");

  std::vector<double> transform;
  auto* kap = app.add_subcommand("kappa", "evaluate kappa(gamma, beta) or the exit transform");
  add_point_flags(kap, kappa_s, false);
  add_eval_flags(kap, kappa_s, {"json", "csv", "text"});
  kap->add_option("--gamma", kappa_s.gamma, "time argument, > 0");
  kap->add_option("--transform", transform, "eta gamma theta")->expected(3);

  TableSpec spec;
  auto* table = app.add_subcommand("table", "sweep beta (and optionally gamma)");
  add_point_flags(table, table_s, false);
  table_s.format = "csv";
  add_eval_flags(table, table_s, {"csv", "json"});
  table->add_flag("--derivative", table_s.derivative, "tabulate g' instead of g");
  table->add_option("--from", spec.from, "first beta");
  table->add_option("--to", spec.to, "last beta");
  table->add_option("--steps", spec.steps, "number of beta values");
  table->add_option("--gammas", spec.gammas, "gamma values; rows become kappa(gamma, beta)");
  table->add_option("--threads", spec.threads, "worker threads")->check(CLI::PositiveNumber);

  auto* compare = app.add_subcommand("compare", "run every applicable method at one point");
  add_point_flags(compare, compare_s);
  compare_s.format = "text";
  add_eval_flags(compare, compare_s, {"json", "text"});
  compare->add_flag("--derivative", compare_s.derivative, "compare g' evaluators");

  auto* cls = app.add_subcommand("classify", "continued fraction and conditioning of alpha");
  classify_s.format = "text";
  cls->add_option("--alpha", classify_s.alpha, "stability index")->required();
  cls->add_option("--rho", classify_s.rho, "optional, enables the Doney-case check");
  cls->add_option("--beta", classify_s.beta, "conditioning point (default 0.9)");
  add_eval_flags(cls, classify_s, {"json", "text"});

  std::vector<std::string> only;
  auto* self = app.add_subcommand("selftest", "identity suite");
  selftest_s.format = "text";
  self->add_option("--tol", selftest_s.tol, "tolerance for the checks")->check(CLI::PositiveNumber);
  self->add_option("--only", only, "groups: kernels, aux, reflection, limit, closed-forms")
      ->delimiter(',');
  self->add_option("--format", selftest_s.format)->check(CLI::IsMember({"json", "text"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kInvalid;
  }

  if (eval->parsed()) return cmd_eval(eval_s, out, err);
  if (kap->parsed()) return cmd_kappa(kappa_s, transform, out, err);
  if (table->parsed()) return cmd_table(table_s, spec, out, err);
  if (compare->parsed()) return cmd_compare(compare_s, out, err);
  if (cls->parsed()) return cmd_classify(classify_s, out, err);
  if (self->parsed()) return cmd_selftest(selftest_s, only, out, err);
  return kInvalid;
}

}  // namespace ladder::cli
