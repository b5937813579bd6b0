#pragma once

// Model parameters, closed-form functions and grids for the
// Maskawa-Nakajima equation in the massless abelian gluon model:
//
//   u(x) = (lambda/2) * int_eps^Lambda  y u(y) / ((y + x + |y - x|)(y + u(y)^2)) dy
//
// All quantities are dimensionless; eps and Lambda are momentum-squared cutoffs
// in arbitrary but common units.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <memory>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "mngap/errors.hpp"

namespace mngap {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// lambda = 3 a^2 / (4 pi^2) for gauge coupling a.
inline double lambda_from_gauge_coupling(double a) {
  return 3.0 * a * a / (4.0 * std::numbers::pi * std::numbers::pi);
}

struct ModelParams {
  double lambda = 0.0;
  double eps = 0.0;
  /// Ultraviolet cutoff; +inf for the infinite-domain operator B.
  double big_lambda = kInfinity;
  /// Metadata only. lambda stays authoritative.
  std::optional<double> gauge_coupling;

  bool finite_cutoff() const { return std::isfinite(big_lambda); }

  /// eps / Lambda (0 for an infinite cutoff).
  double ratio() const { return finite_cutoff() ? eps / big_lambda : 0.0; }

  void validate() const {
    if (!(std::isfinite(lambda) && lambda > 0.0))
      throw ArgumentError("lambda must be finite and > 0");
    if (!(std::isfinite(eps) && eps > 0.0))
      throw ArgumentError("eps must be finite and > 0");
    if (std::isnan(big_lambda) || big_lambda == -kInfinity || !(big_lambda > eps))
      throw ArgumentError("big_lambda must exceed eps (or be +inf)");
    if (gauge_coupling) {
      const double a = *gauge_coupling;
      if (!(std::isfinite(a) && a >= 0.0))
        throw ArgumentError("gauge_coupling must be finite and >= 0");
      const double expected = lambda_from_gauge_coupling(a);
      if (std::abs(expected - lambda) > 1e-12 * lambda)
        throw ArgumentError("gauge_coupling inconsistent with lambda = 3a^2/(4pi^2)");
    }
  }

  void require_finite_cutoff() const {
    if (!finite_cutoff()) throw ArgumentError("operation needs a finite big_lambda");
  }

  static ModelParams from_gauge_coupling(double a, double eps, double big_lambda) {
    ModelParams p{lambda_from_gauge_coupling(a), eps, big_lambda, a};
    p.validate();
    return p;
  }

  bool operator==(const ModelParams&) const = default;
};

// ---------------------------------------------------------------------------
// Closed-form functions

/// Floor of the invariant set: w(x) = (4 eps / lambda) sqrt(eps / (Lambda x)).
inline double eval_w(double x, const ModelParams& p) {
  p.validate();
  p.require_finite_cutoff();
  if (!(x >= p.eps && x <= p.big_lambda))
    throw DomainError("eval_w: x outside [eps, big_lambda]");
  return 4.0 * p.eps / p.lambda * std::sqrt(p.eps / (p.big_lambda * x));
}

/// Ceiling of the invariant set: lambda sqrt(Lambda) / 4.
inline double upper_bound_V(const ModelParams& p) {
  p.validate();
  p.require_finite_cutoff();
  return p.lambda * std::sqrt(p.big_lambda) / 4.0;
}

/// Largest admissible eps/Lambda for the broken-symmetry existence result,
/// min(1/16, ((sqrt(lambda^2 + 128(lambda - 2)) - lambda)/64)^2).
inline double cutoff_max_ratio(double lambda) {
  if (!(lambda > 2.0) || !std::isfinite(lambda))
    throw RegimeError("cutoff condition requires lambda > 2");
  const double branch = (std::sqrt(lambda * lambda + 128.0 * (lambda - 2.0)) - lambda) / 64.0;
  return std::min(1.0 / 16.0, branch * branch);
}

struct CutoffCheck {
  bool satisfied;
  /// cutoff_max_ratio(lambda) - eps/Lambda; >= 0 iff satisfied.
  double margin;
};

/// Non-strict test eps/Lambda <= cutoff_max_ratio(lambda).
inline CutoffCheck check_cutoff(const ModelParams& p) {
  p.validate();
  p.require_finite_cutoff();
  const double margin = cutoff_max_ratio(p.lambda) - p.ratio();
  return {margin >= 0.0, margin};
}

/// 1 / (y + x + |y - x|) evaluated as 1 / (2 max(x, y)).
inline double kernel(double x, double y) {
  if (!(x > 0.0 && y > 0.0)) throw DomainError("kernel: arguments must be positive");
  return 0.5 / std::max(x, y);
}

// ---------------------------------------------------------------------------
// Grids

enum class GridKind { log, linear };

inline const char* to_string(GridKind k) { return k == GridKind::log ? "log" : "linear"; }

/// Strictly increasing abscissae with at least three nodes.
class Grid {
 public:
  Grid(std::vector<double> nodes, GridKind kind) : nodes_(std::move(nodes)), kind_(kind) {
    if (nodes_.size() < 3) throw ArgumentError("grid needs at least 3 nodes");
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
      if (!std::isfinite(nodes_[i])) throw ArgumentError("grid nodes must be finite");
      if (i > 0 && !(nodes_[i] > nodes_[i - 1]))
        throw ArgumentError("grid nodes must be strictly increasing");
    }
  }

  std::span<const double> nodes() const { return nodes_; }
  std::size_t size() const { return nodes_.size(); }
  double operator[](std::size_t i) const { return nodes_[i]; }
  double lo() const { return nodes_.front(); }
  double hi() const { return nodes_.back(); }
  GridKind kind() const { return kind_; }

  /// Index of the cell [x_i, x_{i+1}] containing x (clamped to the last cell).
  std::size_t cell_of(double x) const {
    auto it = std::upper_bound(nodes_.begin(), nodes_.end(), x);
    std::size_t i = it == nodes_.begin() ? 0 : static_cast<std::size_t>(it - nodes_.begin()) - 1;
    return std::min(i, nodes_.size() - 2);
  }

  bool operator==(const Grid&) const = default;

 private:
  std::vector<double> nodes_;
  GridKind kind_;
};

using GridPtr = std::shared_ptr<const Grid>;

/// Geometric or uniform nodes on [lo, hi]; both endpoints are stored exactly.
inline GridPtr make_grid(double lo, double hi, std::size_t n, GridKind kind = GridKind::log) {
  if (!(std::isfinite(lo) && std::isfinite(hi) && lo > 0.0 && hi > lo))
    throw ArgumentError("make_grid: need 0 < lo < hi");
  if (n < 3) throw ArgumentError("make_grid: need n >= 3");
  std::vector<double> x(n);
  const double last = static_cast<double>(n - 1);
  if (kind == GridKind::log) {
    const double span = std::log(hi / lo);
    for (std::size_t i = 0; i < n; ++i) x[i] = lo * std::exp(span * static_cast<double>(i) / last);
  } else {
    for (std::size_t i = 0; i < n; ++i) x[i] = lo + (hi - lo) * static_cast<double>(i) / last;
  }
  x.front() = lo;
  x.back() = hi;
  return std::make_shared<const Grid>(std::move(x), kind);
}

/// A real function sampled at the nodes of a shared grid.
class GridFn {
 public:
  GridFn(GridPtr grid, std::vector<double> values) : grid_(std::move(grid)), values_(std::move(values)) {
    if (!grid_) throw ArgumentError("GridFn: null grid");
    if (values_.size() != grid_->size()) throw ArgumentError("GridFn: value count != node count");
    for (double v : values_)
      if (!std::isfinite(v)) throw ArgumentError("GridFn: values must be finite");
  }

  template <typename F>
  static GridFn sample(GridPtr grid, F&& f) {
    std::vector<double> v(grid->size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = f((*grid)[i]);
    return GridFn(std::move(grid), std::move(v));
  }

  static GridFn constant(GridPtr grid, double c) {
    std::vector<double> v(grid->size(), c);
    return GridFn(std::move(grid), std::move(v));
  }

  const Grid& grid() const { return *grid_; }
  const GridPtr& grid_ptr() const { return grid_; }
  std::span<const double> values() const { return values_; }
  std::size_t size() const { return values_.size(); }
  double operator[](std::size_t i) const { return values_[i]; }

  /// Sup norm over the nodes.
  double sup() const {
    double m = 0.0;
    for (double v : values_) m = std::max(m, std::abs(v));
    return m;
  }

  double min() const { return *std::min_element(values_.begin(), values_.end()); }

  bool same_grid(const GridFn& other) const {
    return grid_ == other.grid_ || *grid_ == *other.grid_;
  }

 private:
  GridPtr grid_;
  std::vector<double> values_;
};

/// sup_i |f_i - g_i| on a common grid.
inline double sup_distance(const GridFn& f, const GridFn& g) {
  if (!f.same_grid(g)) throw ArgumentError("sup_distance: grids differ");
  double m = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) m = std::max(m, std::abs(f[i] - g[i]));
  return m;
}

/// w sampled on a grid spanning [eps, Lambda].
inline GridFn sample_w(const GridPtr& grid, const ModelParams& p) {
  return GridFn::sample(grid, [&](double x) { return eval_w(x, p); });
}

}  // namespace mngap
