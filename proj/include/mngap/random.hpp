#pragma once

// Random members of the invariant sets, for property checks.
//   V: w + (ceiling - w) s(x)
//   W: psi_max s(x)
// with s a random piecewise-linear function with values in [0, 1]. Knots are
// placed uniformly in log x on log grids and in x on linear grids.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <random>
#include <vector>

#include "mngap/model.hpp"

namespace mngap {

using Rng = std::mt19937_64;

/// Random piecewise-linear s on the grid with 0 <= s <= 1 and `knots` interior breakpoints.
inline GridFn random_unit_profile(const GridPtr& grid, Rng& rng, std::size_t knots = 12) {
  const bool logscale = grid->kind() == GridKind::log;
  auto coord = [&](double x) { return logscale ? std::log(x) : x; };
  const double a = coord(grid->lo());
  const double b = coord(grid->hi());

  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<double> kx{a, b};
  for (std::size_t k = 0; k < knots; ++k) kx.push_back(a + (b - a) * unit(rng));
  std::sort(kx.begin(), kx.end());
  std::vector<double> ky(kx.size());
  for (double& v : ky) v = unit(rng);

  return GridFn::sample(grid, [&](double x) {
    const double c = std::clamp(coord(x), a, b);
    auto it = std::upper_bound(kx.begin(), kx.end(), c);
    std::size_t j = it == kx.begin() ? 0 : static_cast<std::size_t>(it - kx.begin()) - 1;
    j = std::min(j, kx.size() - 2);
    const double span = kx[j + 1] - kx[j];
    const double t = span > 0.0 ? (c - kx[j]) / span : 0.0;
    return std::clamp((1.0 - t) * ky[j] + t * ky[j + 1], 0.0, 1.0);
  });
}

/// Random member of V on a grid spanning [eps, Lambda].
inline GridFn random_in_V(const GridPtr& grid, const ModelParams& p, Rng& rng, std::size_t knots = 12) {
  const GridFn s = random_unit_profile(grid, rng, knots);
  const double ceiling = upper_bound_V(p);
  return GridFn::sample(grid, [&, i = std::size_t{0}](double x) mutable {
    const double w = eval_w(x, p);
    return w + (ceiling - w) * s[i++];
  });
}

/// Random nonnegative function with sup <= psi_max.
inline GridFn random_in_W(const GridPtr& grid, double psi_max, Rng& rng, std::size_t knots = 12) {
  const GridFn s = random_unit_profile(grid, rng, knots);
  std::vector<double> v(s.values().begin(), s.values().end());
  for (double& x : v) x *= psi_max;
  return GridFn(grid, std::move(v));
}

}  // namespace mngap
