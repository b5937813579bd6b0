#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "mngap/scan.hpp"

using namespace mngap;
using Catch::Approx;

namespace {

SolveConfig small_cfg() {
  SolveConfig cfg;
  cfg.grid_n = 512;
  return cfg;
}

}  // namespace

TEST_CASE("sweep below one finds only the zero solution", "[scan]") {
  const std::vector<double> lambdas{0.25, 0.5, 0.9};
  const auto rows = sweep(lambdas, 0.01, small_cfg());
  REQUIRE(rows.size() == 3);
  for (const auto& r : rows) {
    CHECK(r.regime == Regime::proven_symmetric);
    CHECK_FALSE(r.broken);
    CHECK(r.converged);
    CHECK(r.fixed_norm <= small_cfg().tol);
  }
}

TEST_CASE("sweep in the cutoff regime finds a nonzero solution", "[scan]") {
  const std::vector<double> lambdas{3.0, 4.0, 5.0};
  const auto rows = sweep(lambdas, 0.01, small_cfg());
  for (const auto& r : rows) {
    const ModelParams p{r.lambda, 1.0, 100.0, std::nullopt};
    CHECK(r.regime == Regime::proven_broken);
    CHECK(r.broken);
    CHECK(r.converged);
    CHECK(r.fixed_norm >= eval_w(p.big_lambda, p));
  }
  CHECK(phase_contradictions(rows).empty());
}

TEST_CASE("sweep records exploratory data between the proven regimes", "[scan]") {
  const std::vector<double> lambdas{1.5, 2.5};
  const auto rows = sweep(lambdas, 0.01, small_cfg());
  for (const auto& r : rows) {
    CHECK(r.regime == Regime::unproven);
    CHECK(r.half_start_norm.has_value());
    CHECK(r.symmetric_norm.has_value());
    CHECK(r.note == "exploratory");
  }
  CHECK(rows[1].broken);
}

TEST_CASE("sweep rows do not depend on the order of couplings", "[scan][property]") {
  const std::vector<double> a{0.5, 1.5, 3.0};
  const std::vector<double> b{3.0, 0.5, 1.5};
  const auto ra = sweep(a, 0.01, small_cfg());
  const auto rb = sweep(b, 0.01, small_cfg());
  auto find = [](const std::vector<PhaseRecord>& rows, double lambda) {
    for (const auto& r : rows)
      if (r.lambda == lambda) return r;
    FAIL("missing row");
    return PhaseRecord{};
  };
  for (double lambda : a) {
    const auto x = find(ra, lambda), y = find(rb, lambda);
    CHECK(x.fixed_norm == y.fixed_norm);
    CHECK(x.iterations == y.iterations);
    CHECK(x.symmetric_norm == y.symmetric_norm);
    CHECK(x.half_start_norm == y.half_start_norm);
  }
}

TEST_CASE("sweep validates its arguments", "[scan]") {
  const std::vector<double> bad{-1.0};
  const std::vector<double> ok{3.0};
  CHECK_THROWS_AS(sweep(bad, 0.01, small_cfg()), ArgumentError);
  CHECK_THROWS_AS(sweep(ok, 1.5, small_cfg()), ArgumentError);
  CHECK(sweep(std::vector<double>{}, 0.01, small_cfg()).empty());
}

TEST_CASE("phase_contradictions flags inconsistent rows", "[scan]") {
  std::vector<PhaseRecord> rows(2);
  rows[0] = PhaseRecord{.lambda = 0.5, .ratio = 0.01, .regime = Regime::proven_symmetric, .fixed_norm = 1.0,
                        .broken = true};
  rows[1] = PhaseRecord{.lambda = 3.0, .ratio = 0.01, .regime = Regime::proven_broken, .fixed_norm = 0.0,
                        .broken = false};
  CHECK(phase_contradictions(rows).size() == 2);
}

TEST_CASE("interpolate_cubic reproduces cubics in the grid coordinate", "[scan]") {
  const auto g = make_grid(1.0, 100.0, 40);
  auto f = [](double x) {
    const double s = std::log(x);
    return 1.0 - 2.0 * s + 0.3 * s * s - 0.05 * s * s * s;
  };
  const GridFn s = GridFn::sample(g, f);
  for (double x : {1.0, 1.01, 3.3, 50.0, 99.9, 100.0}) CHECK(interpolate_cubic(s, x) == Approx(f(x)).margin(1e-12));
}

TEST_CASE("refinement_study", "[scan]") {
  const ModelParams p{3.0, 1.0, 100.0, std::nullopt};
  SolveConfig cfg;
  cfg.rule = Rule::trapezoid;
  cfg.tol = 1e-12;
  const std::vector<std::size_t> ns{257, 513, 1025, 2049};
  const auto rows = refinement_study(p, ns, cfg);
  REQUIRE(rows.size() == 4);
  CHECK_FALSE(rows[0].sup_diff.has_value());
  for (std::size_t k = 2; k < rows.size(); ++k) {
    REQUIRE(rows[k].order.has_value());
    CHECK(*rows[k].order >= 1.7);
    CHECK(*rows[k].order <= 2.3);
    CHECK(*rows[k].sup_diff < *rows[k - 1].sup_diff);
  }

  cfg.rule = Rule::end_corrected;
  const auto hi = refinement_study(p, ns, cfg);
  for (std::size_t k = 2; k < hi.size(); ++k) {
    REQUIRE(hi[k].order.has_value());
    CHECK(*hi[k].order >= 3.5);
  }

  const std::vector<std::size_t> same{512, 512, 512};
  for (const auto& r : refinement_study(p, same, SolveConfig{})) {
    if (r.sup_diff) CHECK(*r.sup_diff == 0.0);
  }
  const std::vector<std::size_t> two{256, 512};
  CHECK_THROWS_AS(refinement_study(p, two, cfg), ArgumentError);
  const std::vector<std::size_t> down{512, 256, 1024};
  CHECK_THROWS_AS(refinement_study(p, down, cfg), ArgumentError);
}
