#pragma once

// The three nonlinear integral operators.
//
//   A u(x)   = (lambda/2) int_eps^Lambda k(x,y) y u / (y + u^2) dy            on [eps, Lambda]
//   B psi(x) = (lambda/2) sqrt(x+eps) int_eps^inf k(x,y) (y/sqrt(y+eps)) psi / (y + psi^2/(y+eps)) dy
//   C psi(x) = same as B with the integral stopped at Lambda
//
// with k(x,y) = 1/(y + x + |y - x|) = 1/(2 max(x,y)). Every operator is evaluated
// in split form
//
//   (lambda/4) [ (1/x) int_lo^x y N(y, t(y)) dy + int_x^hi N(y, t(y)) dy ],   N(y,t) = t/(y + t^2),
//
// so the kink of k at y = x always sits on a node. For B and C the substitution
// t = psi/sqrt(y+eps) turns psi/(y + psi^2/(y+eps)) into sqrt(y+eps) N(y,t), and
// the result is multiplied by sqrt(x+eps).

#include <cmath>
#include <algorithm>
#include <cstddef>
#include <string>
#include <vector>

#include "mngap/errors.hpp"
#include "mngap/model.hpp"
#include "mngap/quadrature.hpp"

namespace mngap {

/// t/(y + t^2): the only nonlinear element, shared by A, B and C.
inline double mass_nonlinearity(double y, double t) { return t / (y + t * t); }

namespace detail {

inline void require_nonnegative(const GridFn& f, const char* who) {
  for (double v : f.values())
    if (v < 0.0) throw DomainError(std::string(who) + ": input must be nonnegative");
}

/// (lambda/4)[(1/x) int y N dy + int N dy] at every node of t's grid.
inline std::vector<double> split_operator(const GridFn& t, double lambda, Rule rule) {
  const Grid& grid = t.grid();
  std::vector<double> g(grid.size());
  for (std::size_t i = 0; i < g.size(); ++i) g[i] = mass_nonlinearity(grid[i], t[i]);
  const auto pre = prefix_integrals(GridFn(t.grid_ptr(), std::move(g)), rule);
  std::vector<double> out(grid.size());
  for (std::size_t i = 0; i < out.size(); ++i)
    out[i] = 0.25 * lambda * (pre.left[i] / grid[i] + pre.right[i]);
  return out;
}

inline GridFn weighted_split(const GridFn& psi, const ModelParams& p, Rule rule) {
  const Grid& grid = psi.grid();
  std::vector<double> t(grid.size());
  for (std::size_t i = 0; i < t.size(); ++i) t[i] = psi[i] / std::sqrt(grid[i] + p.eps);
  auto out = split_operator(GridFn(psi.grid_ptr(), std::move(t)), p.lambda, rule);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] *= std::sqrt(grid[i] + p.eps);
  return GridFn(psi.grid_ptr(), std::move(out));
}

}  // namespace detail

/// A u on u's own grid, which must span exactly [eps, Lambda].
inline GridFn apply_A(const GridFn& u, const ModelParams& p, Rule rule = Rule::end_corrected) {
  p.validate();
  p.require_finite_cutoff();
  if (u.grid().lo() != p.eps || u.grid().hi() != p.big_lambda)
    throw ArgumentError("apply_A: grid must span exactly [eps, big_lambda]");
  detail::require_nonnegative(u, "apply_A");
  return GridFn(u.grid_ptr(), detail::split_operator(u, p.lambda, rule));
}

/// Closed form of A applied to the constant c:
///   (lambda c/4)[(x-eps)/x - (c^2/x) ln((x+c^2)/(eps+c^2)) + ln((Lambda+c^2)/(x+c^2))].
inline double apply_A_const_oracle(double c, double x, const ModelParams& p) {
  p.validate();
  p.require_finite_cutoff();
  if (!(c >= 0.0)) throw ArgumentError("apply_A_const_oracle: c must be >= 0");
  if (!(x >= p.eps && x <= p.big_lambda)) throw ArgumentError("apply_A_const_oracle: x outside [eps, big_lambda]");
  if (c == 0.0) return 0.0;
  const double c2 = c * c;
  return 0.25 * p.lambda * c *
         ((x - p.eps) / x - c2 / x * std::log((x + c2) / (p.eps + c2)) +
          std::log((p.big_lambda + c2) / (x + c2)));
}

/// Bounds the gap between the truncated and the infinite-domain B psi.
struct TruncationCertificate {
  double y_max = 0.0;
  double psi_sup = 0.0;
  /// The certificate covers evaluation points in [eps, x_certified].
  double x_certified = 0.0;
  /// tail_bound_B(psi_sup, x_certified, y_max); bounds the tail on the whole window.
  double bound = 0.0;
  double tol = 0.0;
  /// Largest x at which the tail bound is still <= tol.
  double x_certifiable = 0.0;
};

struct BResult {
  GridFn value;
  TruncationCertificate certificate;
};

/// B psi with the integral truncated at the grid's upper node Y_max. Values are
/// returned at every node (they are exact for the truncated operator); the
/// certificate guarantees |B_trunc psi(x) - B psi(x)| <= tol for eps <= x <= x_certified.
inline BResult apply_B(const GridFn& psi, const ModelParams& p, double tol, double x_certified = 0.0,
                       Rule rule = Rule::end_corrected) {
  p.validate();
  if (!(tol > 0.0)) throw ArgumentError("apply_B: tol must be > 0");
  const Grid& grid = psi.grid();
  if (grid.lo() != p.eps) throw ArgumentError("apply_B: grid must start at eps");
  detail::require_nonnegative(psi, "apply_B");
  const double y_max = grid.hi();
  if (x_certified == 0.0) x_certified = p.eps;
  if (!(x_certified >= p.eps && x_certified <= 0.5 * y_max))
    throw ArgumentError("apply_B: x_certified must lie in [eps, y_max/2]");

  TruncationCertificate cert;
  cert.y_max = y_max;
  cert.psi_sup = psi.sup();
  cert.x_certified = x_certified;
  cert.tol = tol;
  cert.bound = tail_bound_B(cert.psi_sup, x_certified, y_max, p);
  const double lp = p.lambda * cert.psi_sup;
  cert.x_certifiable = lp == 0.0 ? kInfinity : y_max * (tol / lp) * (tol / lp) - p.eps;
  if (cert.bound > tol) {
    const double need = std::max(2.0 * x_certified, (x_certified + p.eps) * (lp / tol) * (lp / tol));
    throw TruncationError("apply_B: y_max too small for the requested tolerance", need);
  }
  return {detail::weighted_split(psi, p, rule), cert};
}

/// C psi on psi's grid, which must span exactly [eps, Lambda].
inline GridFn apply_C(const GridFn& psi, const ModelParams& p, Rule rule = Rule::end_corrected) {
  p.validate();
  p.require_finite_cutoff();
  if (psi.grid().lo() != p.eps || psi.grid().hi() != p.big_lambda)
    throw ArgumentError("apply_C: grid must span exactly [eps, big_lambda]");
  detail::require_nonnegative(psi, "apply_C");
  return detail::weighted_split(psi, p, rule);
}

/// Mass function u = psi / sqrt(x + eps).
inline GridFn mass_from_psi(const GridFn& psi, const ModelParams& p) {
  std::vector<double> u(psi.size());
  for (std::size_t i = 0; i < u.size(); ++i) u[i] = psi[i] / std::sqrt(psi.grid()[i] + p.eps);
  return GridFn(psi.grid_ptr(), std::move(u));
}

}  // namespace mngap
