#pragma once

// Coupling sweeps and mesh-refinement studies.

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mngap/model.hpp"
#include "mngap/operators.hpp"
#include "mngap/random.hpp"
#include "mngap/solver.hpp"

namespace mngap {

struct PhaseRecord {
  double lambda = 0.0;
  double ratio = 0.0;
  Regime regime = Regime::unproven;
  /// Sup of the converged u (A rows) or psi (C rows).
  double fixed_norm = 0.0;
  bool broken = false;
  std::size_t iterations = 0;
  bool converged = false;
  /// Unproven rows: solve_A started from w/2.
  std::optional<double> half_start_norm;
  /// Unproven rows: solve_C started from a random member of W.
  std::optional<double> symmetric_norm;
  std::string note;
};

namespace detail {

inline std::uint64_t row_seed(std::uint64_t seed, double lambda) {
  std::uint64_t h = seed ^ (std::bit_cast<std::uint64_t>(lambda) * 0x9E3779B97F4A7C15ull);
  h ^= h >> 33;
  h *= 0xff51afd7ed558ccdull;
  h ^= h >> 33;
  return h;
}

inline SolveReport symmetric_run(const ModelParams& p, const SolveConfig& cfg) {
  Rng rng(row_seed(cfg.seed, p.lambda));
  const GridPtr grid = make_grid(p.eps, p.big_lambda, cfg.grid_n, cfg.kind);
  return solve_C_to_zero(p, random_in_W(grid, 1.0, rng), cfg);
}

}  // namespace detail

/// Threshold on the sup norm above which a fixed point counts as nonzero.
inline double broken_threshold(const SolveConfig& cfg) { return 10.0 * cfg.tol; }

/// One PhaseRecord per coupling, with eps = `eps` and Lambda = eps / ratio.
inline std::vector<PhaseRecord> sweep(std::span<const double> lambdas, double ratio, const SolveConfig& cfg,
                                      double eps = 1.0) {
  cfg.validate();
  if (!(ratio > 0.0 && ratio < 1.0)) throw ArgumentError("sweep: ratio must lie in (0, 1)");
  std::vector<PhaseRecord> rows;
  rows.reserve(lambdas.size());
  const double threshold = broken_threshold(cfg);
  for (double lambda : lambdas) {
    if (!(lambda > 0.0)) throw ArgumentError("sweep: lambda must be > 0");
    const ModelParams p{lambda, eps, eps / ratio, std::nullopt};
    PhaseRecord row{.lambda = lambda, .ratio = ratio, .regime = classify_regime(p)};
    try {
      if (row.regime == Regime::proven_symmetric) {
        const auto rep = detail::symmetric_run(p, cfg);
        row.fixed_norm = rep.final.sup();
        row.iterations = rep.iterations;
        row.converged = rep.converged;
      } else {
        const auto rep = solve_A(p, cfg);
        row.fixed_norm = rep.final.sup();
        row.iterations = rep.iterations;
        row.converged = rep.converged;
        if (row.regime == Regime::unproven) {
          const GridFn w = sample_w(rep.final.grid_ptr(), p);
          std::vector<double> half(w.values().begin(), w.values().end());
          for (double& v : half) v *= 0.5;
          row.half_start_norm = solve_A(p, cfg, GridFn(w.grid_ptr(), std::move(half))).final.sup();
          row.symmetric_norm = detail::symmetric_run(p, cfg).final.sup();
          row.note = "exploratory";
        }
      }
    } catch (const std::exception& e) {
      row.note = std::string("error: ") + e.what();
    }
    row.broken = row.fixed_norm > threshold;
    if (!row.converged && row.note.empty()) row.note = "not converged";
    rows.push_back(std::move(row));
  }
  return rows;
}

/// Rows that contradict the proven regimes.
inline std::vector<std::string> phase_contradictions(std::span<const PhaseRecord> rows) {
  std::vector<std::string> out;
  for (const auto& r : rows) {
    if (r.regime == Regime::proven_symmetric && r.broken)
      out.push_back("lambda=" + std::to_string(r.lambda) + ": proven-symmetric row is broken");
    if (r.regime == Regime::proven_broken) {
      const ModelParams p{r.lambda, 1.0, 1.0 / r.ratio, std::nullopt};
      if (!r.broken || r.fixed_norm < eval_w(p.big_lambda, p))
        out.push_back("lambda=" + std::to_string(r.lambda) + ": proven-broken row has no nonzero fixed point");
    }
  }
  return out;
}

// ---------------------------------------------------------------------------

struct RefinementRow {
  std::size_t n = 0;
  bool converged = false;
  std::size_t iterations = 0;
  /// Sup difference to the previous resolution, measured on the coarser grid.
  std::optional<double> sup_diff;
  /// ln(d_{k-1}/d_k) / ln(h_{k-2}/h_{k-1}) from successive differences.
  std::optional<double> order;
};

/// Four-point Lagrange interpolation of f at x, in log x on log grids.
inline double interpolate_cubic(const GridFn& f, double x) {
  const Grid& g = f.grid();
  const bool logscale = g.kind() == GridKind::log;
  auto c = [&](double v) { return logscale ? std::log(v) : v; };
  const std::size_t cell = g.cell_of(x);
  std::size_t first = cell == 0 ? 0 : cell - 1;
  first = std::min(first, g.size() - 4);
  const double cx = c(x);
  double sum = 0.0;
  for (std::size_t j = first; j < first + 4; ++j) {
    double wgt = 1.0;
    for (std::size_t k = first; k < first + 4; ++k)
      if (k != j) wgt *= (cx - c(g[k])) / (c(g[j]) - c(g[k]));
    sum += wgt * f[j];
  }
  return sum;
}

/// Solves A at each resolution and measures successive sup differences.
inline std::vector<RefinementRow> refinement_study(const ModelParams& p, std::span<const std::size_t> node_counts,
                                                   const SolveConfig& cfg) {
  if (node_counts.size() < 3) throw ArgumentError("refinement_study: need at least 3 resolutions");
  for (std::size_t k = 1; k < node_counts.size(); ++k)
    if (node_counts[k] < node_counts[k - 1]) throw ArgumentError("refinement_study: node counts must not decrease");

  std::vector<RefinementRow> rows;
  std::optional<GridFn> previous;
  for (std::size_t k = 0; k < node_counts.size(); ++k) {
    SolveConfig c = cfg;
    c.grid_n = node_counts[k];
    const auto rep = solve_A(p, c);
    RefinementRow row{.n = c.grid_n, .converged = rep.converged, .iterations = rep.iterations};
    if (previous) {
      const GridFn& coarse = *previous;
      double d = 0.0;
      if (coarse.same_grid(rep.final)) {
        d = sup_distance(coarse, rep.final);
      } else {
        for (std::size_t i = 0; i < coarse.size(); ++i)
          d = std::max(d, std::abs(interpolate_cubic(rep.final, coarse.grid()[i]) - coarse[i]));
      }
      row.sup_diff = d;
      if (rows.back().sup_diff && *rows.back().sup_diff > 0.0 && d > 0.0) {
        // d_k ~ C h_{k-1}^p, so successive differences scale with the coarse-step ratio.
        const double step = static_cast<double>(node_counts[k - 1] - 1) / static_cast<double>(node_counts[k - 2] - 1);
        if (step > 1.0) row.order = std::log(*rows.back().sup_diff / d) / std::log(step);
      }
    }
    previous = rep.final;
    rows.push_back(row);
  }
  return rows;
}

}  // namespace mngap
