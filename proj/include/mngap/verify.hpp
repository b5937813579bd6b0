#pragma once

// Executable checks of the bounds, monotonicity and contraction properties of
// the fixed-point problem. Every check produces a CheckReport with a pass flag,
// a signed margin (>= 0 means satisfied) and the tolerance it was judged at.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "mngap/errors.hpp"
#include "mngap/model.hpp"
#include "mngap/operators.hpp"
#include "mngap/quadrature.hpp"
#include "mngap/random.hpp"
#include "mngap/solver.hpp"

namespace mngap {

struct CheckReport {
  std::string name;
  bool passed = false;
  double margin = 0.0;
  double tolerance = 0.0;
  /// Informational checks are recorded but never fail a suite.
  bool informational = false;
  std::string detail;
  std::vector<std::pair<std::string, double>> metrics;
};

struct SuiteReport {
  std::vector<CheckReport> checks;

  bool passed() const {
    return std::all_of(checks.begin(), checks.end(),
                       [](const CheckReport& c) { return c.passed || c.informational; });
  }
  const CheckReport* find(const std::string& name) const {
    for (const auto& c : checks)
      if (c.name == name) return &c;
    return nullptr;
  }
};

// ---------------------------------------------------------------------------

/// w - slack <= u <= lambda sqrt(Lambda)/4 + slack at every node.
inline CheckReport check_in_V(const GridFn& u, const ModelParams& p, double slack) {
  const GridFn w = sample_w(u.grid_ptr(), p);
  const double ceiling = upper_bound_V(p);
  double lower = std::numeric_limits<double>::infinity();
  double top = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < u.size(); ++i) {
    lower = std::min(lower, u[i] - w[i]);
    top = std::max(top, u[i]);
  }
  CheckReport r{.name = "in_V", .tolerance = slack};
  r.margin = std::min(lower, ceiling - top);
  r.passed = lower >= -slack && top - ceiling <= slack;
  r.metrics = {{"lower_margin", lower}, {"upper_excess", top - ceiling}};
  r.detail = r.passed ? "iterate lies in the band [w, lambda sqrt(Lambda)/4]"
                      : "iterate leaves the band [w, lambda sqrt(Lambda)/4]";
  return r;
}

/// min over nodes of (A w - w)/w, required to exceed 1e-10.
inline CheckReport check_Aw_gt_w(const ModelParams& p, std::size_t grid_n = 1024, Rule rule = Rule::end_corrected) {
  p.validate();
  p.require_finite_cutoff();
  if (!check_cutoff(p).satisfied)
    throw RegimeError("check_Aw_gt_w: eps/Lambda exceeds cutoff_max_ratio(lambda)");
  const GridFn w = sample_w(make_grid(p.eps, p.big_lambda, grid_n), p);
  const GridFn Aw = apply_A(w, p, rule);
  double m = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < w.size(); ++i) m = std::min(m, (Aw[i] - w[i]) / w[i]);
  CheckReport r{.name = "Aw_gt_w", .margin = m, .tolerance = 1e-10};
  r.passed = m > r.tolerance;
  r.detail = "min relative gap (Aw - w)/w over the nodes";
  return r;
}

/// u(x_{i+1}) < u(x_i) for each adjacent pair of nodes.
inline CheckReport check_strict_decrease(const GridFn& u) {
  double m = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i + 1 < u.size(); ++i) m = std::min(m, u[i] - u[i + 1]);
  CheckReport r{.name = "strict_decrease", .margin = m, .tolerance = 0.0};
  r.passed = m > 0.0;
  r.detail = "min drop between adjacent nodes";
  return r;
}

// ---------------------------------------------------------------------------
// Derivative and ODE consistency

/// u'(x) = -lambda/(4x^2) int_eps^x y u/(y + u^2) dy. Exactly 0 at x = eps.
/// Nodes use the prefix sums of `rule`; other abscissae use the trapezoid rule.
inline double derivative_via_formula(const GridFn& u, const ModelParams& p, double x,
                                     Rule rule = Rule::end_corrected) {
  p.validate();
  const Grid& g = u.grid();
  if (!(x >= g.lo() && x <= g.hi())) throw ArgumentError("derivative_via_formula: x outside the grid");
  if (x == p.eps) return 0.0;
  std::vector<double> yg(u.size());
  for (std::size_t i = 0; i < yg.size(); ++i) yg[i] = g[i] * mass_nonlinearity(g[i], u[i]);
  const std::size_t i = g.cell_of(x);
  double integral;
  if (x == g[i] || x == g[i + 1]) {
    const std::size_t node = x == g[i] ? i : i + 1;
    const auto cells = cell_integrals(g, yg, rule);
    integral = 0.0;
    for (std::size_t k = 0; k < node; ++k) integral += cells[k];
  } else {
    integral = integrate(GridFn(u.grid_ptr(), std::move(yg)), g.lo(), x);
  }
  return -p.lambda / (4.0 * x * x) * integral;
}

/// derivative_via_formula at every node.
inline std::vector<double> derivative_via_formula_nodes(const GridFn& u, const ModelParams& p,
                                                        Rule rule = Rule::end_corrected) {
  const Grid& g = u.grid();
  std::vector<double> yg(u.size());
  for (std::size_t i = 0; i < yg.size(); ++i) yg[i] = g[i] * mass_nonlinearity(g[i], u[i]);
  const auto cells = cell_integrals(g, yg, rule);
  std::vector<double> d(u.size(), 0.0);
  double acc = 0.0;
  for (std::size_t i = 1; i < d.size(); ++i) {
    acc += cells[i - 1];
    d[i] = -p.lambda / (4.0 * g[i] * g[i]) * acc;
  }
  return d;
}

/// Max over interior nodes of |central difference - derivative formula| / max |u'|.
inline CheckReport check_derivative_formula(const GridFn& u, const ModelParams& p, double rel_tol = 1e-3,
                                            Rule rule = Rule::end_corrected) {
  const auto fd = nodal_derivative(u.grid().nodes(), u.values());
  const auto formula = derivative_via_formula_nodes(u, p, rule);
  double scale = 0.0, diff = 0.0;
  for (std::size_t i = 1; i + 1 < u.size(); ++i) {
    scale = std::max(scale, std::abs(formula[i]));
    diff = std::max(diff, std::abs(fd[i] - formula[i]));
  }
  const double rel = scale > 0.0 ? diff / scale : diff;
  CheckReport r{.name = "derivative_formula", .tolerance = rel_tol};
  r.margin = rel_tol - rel;
  r.passed = rel <= rel_tol && derivative_via_formula(u, p, p.eps, rule) == 0.0;
  r.metrics = {{"max_abs_diff", diff}, {"relative_diff", rel}, {"derivative_at_eps", formula[0]}};
  r.detail = "central differences vs the integral formula for u'";
  return r;
}

struct OdeResidual {
  double max_relative = 0.0;
  std::size_t worst_node = 0;
  bool precision_warning = false;
};

/// max over interior nodes of |x^2 u'' + 2x u' + (lambda/4) x u/(x+u^2)| / ((lambda/4) x u/(x+u^2)),
/// with three-point nonuniform differences for u' and u''.
inline OdeResidual ode_residual(const GridFn& u, const ModelParams& p) {
  p.validate();
  const auto x = u.grid().nodes();
  OdeResidual out;
  out.precision_warning = u.size() < 64;
  for (std::size_t i = 1; i + 1 < u.size(); ++i) {
    const double h0 = x[i] - x[i - 1];
    const double h1 = x[i + 1] - x[i];
    const double d1 = -h1 / (h0 * (h0 + h1)) * u[i - 1] + (h1 - h0) / (h0 * h1) * u[i] +
                      h0 / (h1 * (h0 + h1)) * u[i + 1];
    const double d2 = 2.0 * (u[i - 1] / (h0 * (h0 + h1)) - u[i] / (h0 * h1) + u[i + 1] / (h1 * (h0 + h1)));
    const double source = 0.25 * p.lambda * x[i] * mass_nonlinearity(x[i], u[i]);
    const double residual = x[i] * x[i] * d2 + 2.0 * x[i] * d1 + source;
    const double rel = source != 0.0 ? std::abs(residual / source) : std::abs(residual);
    if (rel > out.max_relative) {
      out.max_relative = rel;
      out.worst_node = i;
    }
  }
  return out;
}

inline CheckReport check_ode_residual(const GridFn& u, const ModelParams& p, double threshold = 1e-3) {
  const auto res = ode_residual(u, p);
  CheckReport r{.name = "ode_residual", .margin = threshold - res.max_relative, .tolerance = threshold};
  r.passed = res.max_relative <= threshold;
  r.metrics = {{"max_relative", res.max_relative}, {"worst_x", u.grid()[res.worst_node]}};
  r.detail = res.precision_warning ? "grid has fewer than 64 nodes; residual is imprecise"
                                   : "relative residual of x^2 u'' + 2x u' + (lambda/4) x u/(x+u^2)";
  return r;
}

/// u(x) <= sqrt(x) at every node. Informational: a failure leaves uniqueness undetermined.
inline CheckReport check_uniqueness_condition(const GridFn& u) {
  double m = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < u.size(); ++i) m = std::min(m, std::sqrt(u.grid()[i]) - u[i]);
  CheckReport r{.name = "uniqueness_condition", .margin = m, .tolerance = 0.0, .informational = true};
  r.passed = m >= 0.0;
  r.detail = r.passed ? "u <= sqrt(x) at every node: the fixed point in V is unique"
                      : "u > sqrt(x) at some node: uniqueness is undetermined";
  return r;
}

/// sup |A u - u| <= tol.
inline CheckReport check_fixed_point(const GridFn& u, const ModelParams& p, double tol,
                                     Rule rule = Rule::end_corrected) {
  const double res = sup_distance(apply_A(u, p, rule), u);
  CheckReport r{.name = "fixed_point_residual", .margin = tol - res, .tolerance = tol};
  r.passed = res <= tol;
  r.metrics = {{"residual", res}};
  r.detail = "sup |A u - u|";
  return r;
}

/// sup psi <= tol.
inline CheckReport check_zero_function(const GridFn& psi, double tol) {
  CheckReport r{.name = "zero_fixed_point", .margin = tol - psi.sup(), .tolerance = tol};
  r.passed = psi.sup() <= tol;
  r.detail = "sup of the converged iterate";
  return r;
}

// ---------------------------------------------------------------------------
// Lipschitz constants

struct LipschitzOptions {
  std::size_t grid_n = 1024;
  /// Certificate tolerance used to size the truncated domain of B.
  double tol = 1e-8;
  /// Sup bound of the random members of W.
  double psi_max = 1.0;
  std::size_t knots = 12;
  Rule rule = Rule::end_corrected;
};

struct LipschitzEstimate {
  OperatorId op = OperatorId::A;
  double max_ratio = 0.0;
  /// (lambda/4)(1 + ln(Lambda/eps)) for A, lambda for B and C.
  double bound = 0.0;
  std::size_t pairs = 0;
  double y_max = 0.0;
  bool passed = false;
};

inline double lipschitz_bound(OperatorId op, const ModelParams& p) {
  if (op == OperatorId::A) return 0.25 * p.lambda * (1.0 + std::log(p.big_lambda / p.eps));
  return p.lambda;
}

/// Max of sup|op u - op v| / sup|u - v| over random pairs from the operator's domain.
inline LipschitzEstimate estimate_lipschitz(OperatorId op, const ModelParams& p, std::size_t n_pairs,
                                            std::uint64_t seed, const LipschitzOptions& opt = {}) {
  p.validate();
  if (n_pairs < 1) throw ArgumentError("estimate_lipschitz: n_pairs must be >= 1");
  Rng rng(seed);
  LipschitzEstimate est{.op = op, .bound = lipschitz_bound(op, p)};

  GridPtr grid;
  if (op == OperatorId::B) {
    grid = make_B_grid(p, opt.psi_max, opt.tol, opt.grid_n);
  } else {
    p.require_finite_cutoff();
    grid = make_grid(p.eps, p.big_lambda, opt.grid_n);
  }
  est.y_max = grid->hi();

  auto draw = [&]() {
    return op == OperatorId::A ? random_in_V(grid, p, rng, opt.knots) : random_in_W(grid, opt.psi_max, rng, opt.knots);
  };
  auto apply = [&](const GridFn& f) {
    switch (op) {
      case OperatorId::A: return apply_A(f, p, opt.rule);
      case OperatorId::B: return apply_B(f, p, opt.tol, 0.0, opt.rule).value;
      default: return apply_C(f, p, opt.rule);
    }
  };
  for (std::size_t k = 0; k < n_pairs; ++k) {
    const GridFn u = draw();
    const GridFn v = draw();
    const double den = sup_distance(u, v);
    if (den == 0.0) continue;
    est.max_ratio = std::max(est.max_ratio, sup_distance(apply(u), apply(v)) / den);
    ++est.pairs;
  }
  est.passed = est.max_ratio <= est.bound + 1e-8;
  return est;
}

inline CheckReport check_lipschitz(OperatorId op, const ModelParams& p, std::size_t n_pairs, std::uint64_t seed,
                                   const LipschitzOptions& opt = {}) {
  const auto est = estimate_lipschitz(op, p, n_pairs, seed, opt);
  CheckReport r{.name = std::string("lipschitz_") + to_string(op), .passed = est.passed,
                .margin = est.bound - est.max_ratio, .tolerance = 1e-8};
  r.metrics = {{"max_ratio", est.max_ratio}, {"bound", est.bound}, {"pairs", static_cast<double>(est.pairs)}};
  r.detail = "sampled sup-norm Lipschitz ratio vs the analytic constant";
  return r;
}

// ---------------------------------------------------------------------------
// The inequality behind the contraction constant of B

/// sqrt(x+eps) [1/(sqrt(x+eps)+sqrt(eps)) + ln(sqrt(1+eps/x)+sqrt(eps/x))/sqrt(eps)], which is < 2.
inline double xepsilon_expression(double x, double eps) {
  const double s = std::sqrt(x + eps);
  const double se = std::sqrt(eps);
  return s * (1.0 / (s + se) + std::asinh(std::sqrt(eps / x)) / se);
}

/// f(xi) = 1/(xi+1+sqrt(xi+1)) + 1/sqrt(xi+1) - ln((sqrt(xi+1)+1)/sqrt(xi)).
inline double xi_function(double xi) {
  const double r = std::sqrt(xi + 1.0);
  return 1.0 / (xi + 1.0 + r) + 1.0 / r - std::log((r + 1.0) / std::sqrt(xi));
}

/// Evaluates the expression at x_count log-spaced points of [eps, 1e8 eps] and checks f(1) > 0.
inline CheckReport check_xepsilon(double eps, std::size_t x_count) {
  if (!(eps > 0.0) || x_count < 2) throw ArgumentError("check_xepsilon: need eps > 0 and x_count >= 2");
  const double span = std::log(1e8);
  double worst = 0.0;
  for (std::size_t i = 0; i < x_count; ++i) {
    const double x = i + 1 == x_count ? 1e8 * eps : eps * std::exp(span * static_cast<double>(i) / static_cast<double>(x_count - 1));
    worst = std::max(worst, xepsilon_expression(x, eps));
  }
  const double f1 = xi_function(1.0);
  CheckReport r{.name = "xepsilon", .margin = 2.0 - worst, .tolerance = 0.0};
  r.passed = worst < 2.0 && f1 > 0.0;
  r.metrics = {{"value_at_eps", xepsilon_expression(eps, eps)}, {"max_value", worst},
               {"value_at_1e8_eps", xepsilon_expression(1e8 * eps, eps)}, {"f1", f1}};
  r.detail = "contraction-constant inequality over [eps, 1e8 eps]";
  return r;
}

// ---------------------------------------------------------------------------
// Suites

struct SuiteOptions {
  /// Run only these checks (empty = all).
  std::set<std::string> only;
  double band_slack = 1e-9;
  double fixed_point_tol = 1e-8;
  double ode_threshold = 1e-3;
  double derivative_rel_tol = 1e-3;
  std::size_t lipschitz_pairs = 100;
  std::uint64_t seed = 0;
  std::size_t xepsilon_points = 10000;
  Rule rule = Rule::end_corrected;

  bool wants(const std::string& name) const { return only.empty() || only.count(name) > 0; }
};

/// All checks that apply to a broken-symmetry fixed point u of A.
inline SuiteReport run_suite_A(const GridFn& u, const ModelParams& p, const SuiteOptions& opt = {}) {
  SuiteReport s;
  if (opt.wants("in_V")) s.checks.push_back(check_in_V(u, p, opt.band_slack));
  if (opt.wants("fixed_point_residual")) s.checks.push_back(check_fixed_point(u, p, opt.fixed_point_tol, opt.rule));
  if (opt.wants("strict_decrease")) s.checks.push_back(check_strict_decrease(u));
  if (opt.wants("Aw_gt_w")) {
    if (p.lambda > 2.0 && check_cutoff(p).satisfied) {
      s.checks.push_back(check_Aw_gt_w(p, u.size(), opt.rule));
    } else {
      s.checks.push_back(CheckReport{.name = "Aw_gt_w", .passed = true, .informational = true,
                                     .detail = "skipped: outside the cutoff regime"});
    }
  }
  if (opt.wants("derivative_formula"))
    s.checks.push_back(check_derivative_formula(u, p, opt.derivative_rel_tol, opt.rule));
  if (opt.wants("ode_residual")) s.checks.push_back(check_ode_residual(u, p, opt.ode_threshold));
  if (opt.wants("uniqueness_condition")) s.checks.push_back(check_uniqueness_condition(u));
  if (opt.wants("lipschitz_A")) {
    LipschitzOptions lo{.grid_n = std::min<std::size_t>(u.size(), 1024), .rule = opt.rule};
    s.checks.push_back(check_lipschitz(OperatorId::A, p, opt.lipschitz_pairs, opt.seed, lo));
  }
  if (opt.wants("xepsilon")) s.checks.push_back(check_xepsilon(p.eps, opt.xepsilon_points));
  return s;
}

/// Checks for a run of B or C driven toward the zero function.
inline SuiteReport run_suite_symmetric(const GridFn& psi, OperatorId op, const ModelParams& p, double tol,
                                       const SuiteOptions& opt = {}) {
  SuiteReport s;
  if (opt.wants("zero_fixed_point")) s.checks.push_back(check_zero_function(psi, tol));
  const std::string lname = std::string("lipschitz_") + to_string(op);
  if (opt.wants(lname)) {
    LipschitzOptions lo{.grid_n = std::min<std::size_t>(psi.size(), 1024), .rule = opt.rule};
    s.checks.push_back(check_lipschitz(op, p, opt.lipschitz_pairs, opt.seed, lo));
  }
  if (opt.wants("xepsilon")) s.checks.push_back(check_xepsilon(p.eps, opt.xepsilon_points));
  return s;
}

}  // namespace mngap
