#pragma once

// Composite quadrature on (possibly nonuniform) grids.
//
// Two rules share one cell decomposition:
//   trapezoid      dx/2 (f_i + f_{i+1})                         exact on linears, O(h^2)
//   end_corrected  trapezoid + dx^2/12 (f'_i - f'_{i+1})        exact on cubics, O(h^4)
// where f' is the second-order three-point derivative on the nonuniform grid.
// The corrected rule is the cellwise Hermite form of the Euler-Maclaurin
// correction; on a uniform grid its interior terms telescope, leaving endpoint
// corrections only.

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "mngap/errors.hpp"
#include "mngap/model.hpp"

namespace mngap {

enum class Rule { trapezoid, end_corrected };

inline const char* to_string(Rule r) { return r == Rule::trapezoid ? "trapezoid" : "end_corrected"; }

inline Rule rule_from_string(const std::string& s) {
  if (s == "trapezoid") return Rule::trapezoid;
  if (s == "end_corrected") return Rule::end_corrected;
  throw ArgumentError("unknown quadrature rule '" + s + "'");
}

/// Second-order three-point derivative estimate at every node; one-sided at the ends.
inline std::vector<double> nodal_derivative(std::span<const double> x, std::span<const double> f) {
  const std::size_t n = x.size();
  if (n < 3 || f.size() != n) throw ArgumentError("nodal_derivative: need >= 3 matching samples");
  std::vector<double> d(n);
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const double h0 = x[i] - x[i - 1];
    const double h1 = x[i + 1] - x[i];
    d[i] = -h1 / (h0 * (h0 + h1)) * f[i - 1] + (h1 - h0) / (h0 * h1) * f[i] +
           h0 / (h1 * (h0 + h1)) * f[i + 1];
  }
  {
    const double a = x[1] - x[0];
    const double b = x[2] - x[1];
    d[0] = -(2 * a + b) / (a * (a + b)) * f[0] + (a + b) / (a * b) * f[1] - a / (b * (a + b)) * f[2];
  }
  {
    const double a = x[n - 1] - x[n - 2];
    const double b = x[n - 2] - x[n - 3];
    d[n - 1] = (2 * a + b) / (a * (a + b)) * f[n - 1] - (a + b) / (a * b) * f[n - 2] +
               a / (b * (a + b)) * f[n - 3];
  }
  return d;
}

/// Integral over each cell [x_i, x_{i+1}]; n - 1 entries.
inline std::vector<double> cell_integrals(const Grid& grid, std::span<const double> f, Rule rule) {
  const auto x = grid.nodes();
  if (f.size() != x.size()) throw ArgumentError("cell_integrals: sample count mismatch");
  std::vector<double> c(x.size() - 1);
  for (std::size_t i = 0; i + 1 < x.size(); ++i) c[i] = 0.5 * (x[i + 1] - x[i]) * (f[i] + f[i + 1]);
  if (rule == Rule::end_corrected) {
    const auto d = nodal_derivative(x, f);
    for (std::size_t i = 0; i + 1 < x.size(); ++i) {
      const double dx = x[i + 1] - x[i];
      c[i] += dx * dx / 12.0 * (d[i] - d[i + 1]);
    }
  }
  return c;
}

/// Composite trapezoid of the sampled integrand over [lo, hi]. Limits that fall
/// inside a cell use the linear interpolant of the integrand on that cell, so the
/// result is exact for integrands that are linear between nodes.
inline double integrate(const GridFn& samples, double lo, double hi) {
  const Grid& g = samples.grid();
  if (!(lo >= g.lo() && hi <= g.hi() && lo <= hi))
    throw DomainError("integrate: limits outside the grid span");
  if (lo == hi) return 0.0;
  auto value_at = [&](double x) {
    const std::size_t i = g.cell_of(x);
    const double t = (x - g[i]) / (g[i + 1] - g[i]);
    return (1.0 - t) * samples[i] + t * samples[i + 1];
  };
  const std::size_t i0 = g.cell_of(lo);
  const std::size_t i1 = g.cell_of(hi);
  if (i0 == i1) return 0.5 * (hi - lo) * (value_at(lo) + value_at(hi));
  double sum = 0.5 * (g[i0 + 1] - lo) * (value_at(lo) + samples[i0 + 1]);
  for (std::size_t i = i0 + 1; i < i1; ++i) sum += 0.5 * (g[i + 1] - g[i]) * (samples[i] + samples[i + 1]);
  sum += 0.5 * (hi - g[i1]) * (samples[i1] + value_at(hi));
  return sum;
}

/// Running integrals for the split form of the operator:
///   left[i]  = int_{x_0}^{x_i}     y g(y) dy
///   right[i] = int_{x_i}^{x_{n-1}}   g(y) dy
struct PrefixIntegrals {
  GridPtr grid;
  std::vector<double> left;
  std::vector<double> right;
};

inline PrefixIntegrals prefix_integrals(const GridFn& g, Rule rule = Rule::trapezoid) {
  const Grid& grid = g.grid();
  const std::size_t n = grid.size();
  std::vector<double> yg(n);
  for (std::size_t i = 0; i < n; ++i) yg[i] = grid[i] * g[i];
  const auto cl = cell_integrals(grid, yg, rule);
  const auto cr = cell_integrals(grid, g.values(), rule);

  PrefixIntegrals out{g.grid_ptr(), std::vector<double>(n, 0.0), std::vector<double>(n, 0.0)};
  for (std::size_t i = 1; i < n; ++i) out.left[i] = out.left[i - 1] + cl[i - 1];
  for (std::size_t i = n - 1; i-- > 0;) out.right[i] = out.right[i + 1] + cr[i];
  return out;
}

// ---------------------------------------------------------------------------
// Tail of the infinite-domain operator
//
// For y >= R >= x the kernel is 1/(2y), and for psi >= 0
//     psi / (y + psi^2/(y+eps)) <= psi / y <= psi_sup / y,      1/sqrt(y+eps) <= y^(-1/2).
// Hence the discarded part of B psi(x) obeys
//     (lambda/2) sqrt(x+eps) int_R^inf (1/(2y)) (y/sqrt(y+eps)) psi/(y + psi^2/(y+eps)) dy
//       <= (lambda/4) psi_sup sqrt(x+eps) int_R^inf y^(-3/2) dy
//        = (lambda/2) psi_sup sqrt((x+eps)/R).
// tail_bound_B returns twice that value, lambda psi_sup sqrt((x+eps)/R).

/// Certified upper bound on the part of B psi(x) coming from y > R.
inline double tail_bound_B(double psi_sup, double x, double R, const ModelParams& p) {
  p.validate();
  if (!(psi_sup >= 0.0)) throw ArgumentError("tail_bound_B: psi_sup must be >= 0");
  if (!(x >= p.eps)) throw ArgumentError("tail_bound_B: x must be >= eps");
  if (!(R >= x)) throw ArgumentError("tail_bound_B: need R >= x");
  return p.lambda * psi_sup * std::sqrt((x + p.eps) / R);
}

/// Smallest R = eps * 2^k with R >= 2 x_cert and tail_bound_B(psi_sup, x_cert, R) < tol / 2.
inline double certified_radius(double psi_sup, double x_cert, const ModelParams& p, double tol) {
  if (!(tol > 0.0)) throw ArgumentError("certified_radius: tol must be > 0");
  if (!(x_cert >= p.eps)) throw ArgumentError("certified_radius: x_cert must be >= eps");
  double R = 2.0 * p.eps;
  while (R < 2.0 * x_cert) R *= 2.0;
  while (tail_bound_B(psi_sup, x_cert, R, p) >= 0.5 * tol) {
    R *= 2.0;
    if (!std::isfinite(R)) throw ArgumentError("certified_radius: no finite radius");
  }
  return R;
}

}  // namespace mngap
