// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "mngap/mngap.hpp"

using namespace mngap;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      if (!detail.empty()) detail += "; ";
      detail += what;
    }
  }
};

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

const ModelParams kA{3.0, 1.0, 100.0, std::nullopt};

SolveReport criterion1_solve(std::size_t n) {
  SolveConfig cfg;
  cfg.grid_n = n;
  cfg.tol = 1e-10;
  cfg.max_iter = 500;
  return solve_A(kA, cfg);
}

Outcome existence() {
  Outcome o;
  const auto rep = criterion1_solve(2048);
  o.require(rep.converged, "did not converge in 500 iterations");
  const GridFn w = sample_w(rep.final.grid_ptr(), kA);
  double low = kInfinity, high = -kInfinity;
  for (std::size_t i = 0; i < w.size(); ++i) {
    low = std::min(low, rep.final[i] - w[i]);
    high = std::max(high, rep.final[i]);
  }
  o.require(low >= -1e-9, "u - w = " + num(low));
  o.require(high <= 7.5 + 1e-9, "sup u = " + num(high));
  o.require(check_strict_decrease(rep.final).passed, "not strictly decreasing");
  o.detail += (o.detail.empty() ? "" : "; ") + std::to_string(rep.iterations) + " iterations";
  return o;
}

Outcome domination() {
  Outcome o;
  Rng rng(20261014);
  std::uniform_real_distribution<double> lam(0.0, 1.0), lg(-3.0, 0.0);
  double worst = kInfinity;
  for (int k = 0; k < 50; ++k) {
    const double lambda = 10.0 - 8.0 * lam(rng);  // (2, 10]
    const double ratio = cutoff_max_ratio(lambda) * std::pow(10.0, lg(rng));
    const ModelParams p{lambda, 1.0, 1.0 / ratio, std::nullopt};
    const auto r = check_Aw_gt_w(p, 2048);
    worst = std::min(worst, r.margin);
    o.require(r.passed, "lambda=" + num(lambda) + " ratio=" + num(ratio) + " margin=" + num(r.margin));
  }
  o.detail += (o.detail.empty() ? "" : "; ") + std::string("min margin ") + num(worst);
  return o;
}

Outcome ode_consistency() {
  Outcome o;
  std::vector<double> res, gaps;
  for (std::size_t n : {512u, 1024u, 2048u}) {
    const auto rep = criterion1_solve(n);
    o.require(rep.converged, "n=" + std::to_string(n) + " did not converge");
    res.push_back(ode_residual(rep.final, kA).max_relative);
    const auto check = check_derivative_formula(rep.final, kA);
    for (const auto& [k, v] : check.metrics)
      if (k == "max_abs_diff") gaps.push_back(v);
    o.require(derivative_via_formula(rep.final, kA, kA.eps) == 0.0, "derivative at eps is not exactly 0");
  }
  for (std::size_t k = 1; k < res.size(); ++k) {
    const double f = res[k - 1] / res[k];
    o.require(f >= 3.5 && f <= 4.5, "ode residual factor " + num(f));
    const double g = gaps[k - 1] / gaps[k];
    o.require(g >= 3.5 && g <= 4.5, "derivative gap factor " + num(g));
    o.detail += (o.detail.empty() ? "" : ", ") + std::string("factor ") + num(f);
  }
  return o;
}

Outcome contraction_B() {
  Outcome o;
  const ModelParams p{0.5, 1.0, kInfinity, std::nullopt};
  LipschitzOptions lo;
  lo.tol = 1e-8;
  const auto est = estimate_lipschitz(OperatorId::B, p, 100, 7, lo);
  o.require(est.max_ratio <= 0.5 + 1e-6, "Lipschitz ratio " + num(est.max_ratio));
  o.require(est.pairs == 100, "only " + std::to_string(est.pairs) + " pairs");

  SolveConfig cfg;
  cfg.tol = 1e-8;
  cfg.grid_n = 2048;
  const auto grid = make_B_grid(p, 10.0, cfg.tol, cfg.grid_n);
  const auto rep = solve_B_to_zero(p, GridFn::constant(grid, 10.0), cfg);
  o.require(rep.converged && rep.final.sup() <= 1e-8, "sup psi " + num(rep.final.sup()));
  o.require(rep.iterations <= 36, std::to_string(rep.iterations) + " steps");
  o.require(rep.max_norm_ratio <= 0.5 + 1e-6, "norm ratio " + num(rep.max_norm_ratio));
  o.detail += (o.detail.empty() ? "" : "; ") + std::string("ratio ") + num(est.max_ratio) + ", " +
              std::to_string(rep.iterations) + " steps, Y_max " + num(grid->hi());
  return o;
}

Outcome symmetric_C() {
  Outcome o;
  SolveConfig cfg;
  cfg.tol = 1e-8;
  const auto grid = make_grid(1.0, 100.0, cfg.grid_n);
  Rng rng(99);
  for (double lambda : {0.25, 0.5, 0.9}) {
    const ModelParams p{lambda, 1.0, 100.0, std::nullopt};
    for (int k = 0; k < 5; ++k) {
      const auto rep = solve_C_to_zero(p, random_in_W(grid, 10.0, rng), cfg);
      o.require(rep.converged && rep.final.sup() <= 1e-8,
                "lambda=" + num(lambda) + " start " + std::to_string(k) + ": sup " + num(rep.final.sup()));
    }
  }
  return o;
}

Outcome xi_inequality() {
  Outcome o;
  for (double eps : {0.1, 1.0, 10.0}) {
    const auto r = check_xepsilon(eps, 10000);
    o.require(r.passed, "eps=" + num(eps) + " max " + num(2.0 - r.margin));
    for (const auto& [k, v] : r.metrics) {
      if (k == "value_at_eps") o.require(std::abs(v - 1.83224) <= 1e-4, "value at eps " + num(v));
      if (k == "f1") o.require(std::abs(v - 0.11863) <= 1e-4, "f(1) " + num(v));
    }
  }
  return o;
}

Outcome quadrature_oracle() {
  Outcome o;
  const auto grid = make_grid(1.0, 100.0, 4096);
  const GridFn Au = apply_A(GridFn::constant(grid, 1.0), kA);
  double err = 0.0;
  for (std::size_t i = 0; i < grid->size(); ++i) err = std::max(err, std::abs(Au[i] - apply_A_const_oracle(1.0, (*grid)[i], kA)));
  o.require(err <= 1e-8, "oracle error " + num(err));
  const auto est = estimate_lipschitz(OperatorId::A, kA, 100, 3);
  o.require(est.max_ratio <= est.bound + 1e-8, "Lipschitz ratio " + num(est.max_ratio) + " > " + num(est.bound));
  o.detail += (o.detail.empty() ? "" : "; ") + std::string("oracle error ") + num(err) + ", ratio " +
              num(est.max_ratio) + " / " + num(est.bound);
  return o;
}

Outcome uniqueness_gate() {
  Outcome o;
  const auto grid = make_grid(1.0, 100.0, 2048);
  o.require(check_uniqueness_condition(sample_w(grid, kA)).passed, "fails on w");
  o.require(!check_uniqueness_condition(GridFn::constant(grid, 7.5)).passed, "passes on 7.5");
  const auto r = check_uniqueness_condition(criterion1_solve(2048).final);
  const bool text_ok = r.passed ? r.detail.find("unique") != std::string::npos &&
                                      r.detail.find("undetermined") == std::string::npos
                                : r.detail.find("undetermined") != std::string::npos;
  o.require(text_ok, "report text does not match outcome");
  o.require(r.informational, "not informational");
  o.detail += (o.detail.empty() ? "" : "; ") + std::string("fixed point: ") + (r.passed ? "pass" : "fail") +
              " (margin " + num(r.margin) + ")";
  return o;
}

Outcome phase_table() {
  Outcome o;
  std::vector<double> lambdas{0.25, 0.5, 0.75, 0.9};
  for (int k = 0; k <= 10; ++k) lambdas.push_back(2.5 + 0.25 * k);
  const auto rows = sweep(lambdas, 0.01, SolveConfig{});
  for (const auto& r : rows) {
    if (r.lambda < 1.0) o.require(!r.broken, "lambda=" + num(r.lambda) + " broken");
    if (r.regime == Regime::proven_broken) o.require(r.broken, "lambda=" + num(r.lambda) + " not broken");
  }
  for (const auto& c : phase_contradictions(rows)) o.require(false, c);
  return o;
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    std::function<Outcome()> run;
    double budget_s;
  };
  const std::vector<Criterion> criteria{
      {"existence regime", existence, 5.0},
      {"domination lemma", domination, 30.0},
      {"ODE consistency", ode_consistency, 0.0},
      {"contraction of B", contraction_B, 10.0},
      {"finite-cutoff symmetric regime", symmetric_C, 0.0},
      {"xi-inequality", xi_inequality, 0.0},
      {"quadrature oracle", quadrature_oracle, 0.0},
      {"uniqueness gate", uniqueness_gate, 0.0},
      {"phase table", phase_table, 120.0},
  };

  int failures = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    const auto& c = criteria[k];
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.require(false, std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (c.budget_s > 0.0) o.require(secs < c.budget_s, "runtime " + num(secs) + " s over " + num(c.budget_s) + " s");
    if (!o.pass) ++failures;
    std::printf("[%s] %zu. %s (%.2f s)%s%s\n", o.pass ? "PASS" : "FAIL", k + 1, c.name, secs,
                o.detail.empty() ? "" : ": ", o.detail.c_str());
  }
  std::printf("%d of %zu criteria failed\n", failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
