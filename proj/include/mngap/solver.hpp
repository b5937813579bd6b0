#pragma once

// Fixed-point drivers.
//
// solve_A:          damped Picard iteration u <- (1-a) u + a A u started from the floor w.
//                   Convergence is observed, not guaranteed: the available Lipschitz
//                   constant of A exceeds 1 in the broken-symmetry regime.
// solve_B_to_zero,
// solve_C_to_zero:  plain iteration of the contractions B and C; sup norms decay at
//                   rate <= lambda toward the zero fixed point.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mngap/errors.hpp"
#include "mngap/model.hpp"
#include "mngap/operators.hpp"
#include "mngap/quadrature.hpp"

namespace mngap {

enum class Regime { proven_broken, proven_symmetric, unproven };

inline const char* to_string(Regime r) {
  switch (r) {
    case Regime::proven_broken: return "proven-broken";
    case Regime::proven_symmetric: return "proven-symmetric";
    default: return "unproven";
  }
}

enum class OperatorId { A, B, C };

inline const char* to_string(OperatorId op) {
  switch (op) {
    case OperatorId::A: return "A";
    case OperatorId::B: return "B";
    default: return "C";
  }
}

inline OperatorId operator_from_string(const std::string& s) {
  if (s == "A") return OperatorId::A;
  if (s == "B") return OperatorId::B;
  if (s == "C") return OperatorId::C;
  throw ArgumentError("unknown operator '" + s + "'");
}

/// Regime proven for the parameters: broken needs lambda > 2 and the cutoff
/// condition on a finite domain, symmetric needs 0 < lambda < 1.
inline Regime classify_regime(const ModelParams& p) {
  p.validate();
  if (p.lambda < 1.0) return Regime::proven_symmetric;
  if (p.lambda > 2.0 && p.finite_cutoff() && check_cutoff(p).satisfied) return Regime::proven_broken;
  return Regime::unproven;
}

struct SolveConfig {
  double tol = 1e-10;
  std::size_t max_iter = 1000;
  /// Step u <- (1 - damping) u + damping * A u.
  double damping = 1.0;
  std::size_t grid_n = 2048;
  std::uint64_t seed = 0;
  Rule rule = Rule::end_corrected;
  GridKind kind = GridKind::log;

  void validate() const {
    if (!(tol > 0.0)) throw ArgumentError("SolveConfig: tol must be > 0");
    if (max_iter < 1) throw ArgumentError("SolveConfig: max_iter must be >= 1");
    if (!(damping > 0.0 && damping <= 1.0)) throw ArgumentError("SolveConfig: damping must lie in (0, 1]");
    if (grid_n < 3) throw ArgumentError("SolveConfig: grid_n must be >= 3");
  }
};

struct SolveReport {
  OperatorId op = OperatorId::A;
  ModelParams params;
  SolveConfig config;
  bool converged = false;
  std::size_t iterations = 0;
  /// sup |x_{k+1} - x_k| per iteration.
  std::vector<double> residuals;
  /// sup |x_k| for k = 0..iterations (B and C only).
  std::vector<double> norms;
  GridFn final;
  /// Largest ratio of consecutive residuals.
  double empirical_ratio = 0.0;
  /// Largest ratio of consecutive sup norms (B and C only).
  double max_norm_ratio = 0.0;
  Regime regime = Regime::unproven;
  /// Largest distance by which an iterate left the band [w, lambda sqrt(Lambda)/4] (A only).
  double max_band_violation = 0.0;
  std::vector<std::string> anomalies;
  std::vector<std::string> warnings;
  /// Certificate of the first B application, which has the largest sup psi.
  std::optional<TruncationCertificate> certificate;
};

namespace detail {

inline double max_consecutive_ratio(const std::vector<double>& r) {
  double m = 0.0;
  for (std::size_t k = 1; k < r.size(); ++k)
    if (r[k - 1] > 0.0) m = std::max(m, r[k] / r[k - 1]);
  return m;
}

/// Distance outside [w, ceiling], 0 when inside.
inline double band_violation(const GridFn& u, const GridFn& w, double ceiling) {
  double v = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) v = std::max({v, w[i] - u[i], u[i] - ceiling});
  return v;
}

}  // namespace detail

/// Picard iteration on A from an explicit start.
inline SolveReport solve_A(const ModelParams& p, const SolveConfig& cfg, const GridFn& start) {
  p.validate();
  p.require_finite_cutoff();
  cfg.validate();
  SolveReport rep{.op = OperatorId::A, .params = p, .config = cfg, .final = start};
  rep.regime = classify_regime(p) == Regime::proven_broken ? Regime::proven_broken : Regime::unproven;
  if (rep.regime != Regime::proven_broken)
    rep.warnings.push_back("parameters outside the proven broken-symmetry regime");

  const GridFn w = sample_w(start.grid_ptr(), p);
  const double ceiling = upper_bound_V(p);
  const double alpha = cfg.damping;
  bool flagged = false;

  GridFn u = start;
  for (std::size_t k = 0; k < cfg.max_iter; ++k) {
    const GridFn Au = apply_A(u, p, cfg.rule);
    std::vector<double> next(u.size());
    for (std::size_t i = 0; i < next.size(); ++i) next[i] = (1.0 - alpha) * u[i] + alpha * Au[i];
    GridFn un(u.grid_ptr(), std::move(next));
    const double r = sup_distance(un, u);
    rep.residuals.push_back(r);
    u = std::move(un);

    const double viol = detail::band_violation(u, w, ceiling);
    rep.max_band_violation = std::max(rep.max_band_violation, viol);
    if (rep.regime == Regime::proven_broken && viol > 1e-6 && !flagged) {
      rep.anomalies.push_back("iterate " + std::to_string(k + 1) + " left the invariant band");
      flagged = true;
    }
    if (r <= cfg.tol) {
      rep.converged = true;
      break;
    }
  }
  rep.iterations = rep.residuals.size();
  rep.empirical_ratio = detail::max_consecutive_ratio(rep.residuals);
  rep.final = std::move(u);
  return rep;
}

/// Picard iteration on A from w on a cfg.grid_n grid over [eps, Lambda].
inline SolveReport solve_A(const ModelParams& p, const SolveConfig& cfg) {
  p.validate();
  p.require_finite_cutoff();
  cfg.validate();
  return solve_A(p, cfg, sample_w(make_grid(p.eps, p.big_lambda, cfg.grid_n, cfg.kind), p));
}

namespace detail {

template <typename Step>
SolveReport iterate_to_zero(OperatorId op, const ModelParams& p, const GridFn& psi0, const SolveConfig& cfg,
                            Step&& step) {
  SolveReport rep{.op = op, .params = p, .config = cfg, .final = psi0};
  rep.regime = p.lambda < 1.0 ? Regime::proven_symmetric : Regime::unproven;
  if (p.lambda >= 1.0) rep.warnings.push_back("lambda >= 1: contraction not guaranteed, exploratory run");
  detail::require_nonnegative(psi0, "solve_to_zero");

  GridFn psi = psi0;
  rep.norms.push_back(psi.sup());
  if (rep.norms.back() <= cfg.tol) {
    rep.converged = true;
    return rep;
  }
  for (std::size_t k = 0; k < cfg.max_iter; ++k) {
    GridFn next = step(psi);
    rep.residuals.push_back(sup_distance(next, psi));
    psi = std::move(next);
    rep.norms.push_back(psi.sup());
    if (rep.norms.back() <= cfg.tol) {
      rep.converged = true;
      break;
    }
  }
  rep.iterations = rep.residuals.size();
  rep.empirical_ratio = max_consecutive_ratio(rep.residuals);
  rep.max_norm_ratio = max_consecutive_ratio(rep.norms);
  rep.final = std::move(psi);
  return rep;
}

}  // namespace detail

/// Log grid on [eps, R] with R = certified_radius(psi_sup, x_cert, p, tol).
inline GridPtr make_B_grid(const ModelParams& p, double psi_sup, double tol, std::size_t n, double x_cert = 0.0) {
  p.validate();
  if (x_cert == 0.0) x_cert = p.eps;
  return make_grid(p.eps, certified_radius(psi_sup, x_cert, p, tol), n, GridKind::log);
}

/// Iterates psi <- B psi (truncated at psi0's upper node, certified to cfg.tol on
/// [eps, x_cert]) until sup psi <= cfg.tol.
inline SolveReport solve_B_to_zero(const ModelParams& p, const GridFn& psi0, const SolveConfig& cfg,
                                   double x_cert = 0.0) {
  p.validate();
  cfg.validate();
  ModelParams pb = p;
  pb.big_lambda = kInfinity;
  std::optional<TruncationCertificate> first;
  auto rep = detail::iterate_to_zero(OperatorId::B, pb, psi0, cfg, [&](const GridFn& psi) {
    auto res = apply_B(psi, pb, cfg.tol, x_cert, cfg.rule);
    if (!first) first = res.certificate;
    return std::move(res.value);
  });
  rep.certificate = first;
  return rep;
}

/// Iterates psi <- C psi on [eps, Lambda] until sup psi <= cfg.tol.
inline SolveReport solve_C_to_zero(const ModelParams& p, const GridFn& psi0, const SolveConfig& cfg) {
  p.validate();
  p.require_finite_cutoff();
  cfg.validate();
  return detail::iterate_to_zero(OperatorId::C, p, psi0, cfg,
                                 [&](const GridFn& psi) { return apply_C(psi, p, cfg.rule); });
}

}  // namespace mngap
