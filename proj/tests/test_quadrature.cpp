#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>
#include <vector>

#include "mngap/quadrature.hpp"

using namespace mngap;
using Catch::Approx;

namespace {

GridPtr random_grid(std::mt19937_64& rng, double lo, double hi, std::size_t n) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<double> x(n);
  x[0] = lo;
  x[n - 1] = hi;
  std::vector<double> cuts(n - 2);
  for (double& c : cuts) c = lo + (hi - lo) * (0.001 + 0.998 * unit(rng));
  std::sort(cuts.begin(), cuts.end());
  std::copy(cuts.begin(), cuts.end(), x.begin() + 1);
  return std::make_shared<const Grid>(std::move(x), GridKind::linear);
}

GridPtr linear_from_zero(std::size_t n) {
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = static_cast<double>(i) / static_cast<double>(n - 1);
  return std::make_shared<const Grid>(std::move(x), GridKind::linear);
}

double total(const GridFn& f, Rule rule) {
  const auto pre = prefix_integrals(f, rule);
  return pre.right.front();
}

const ModelParams kB{0.5, 1.0, kInfinity, std::nullopt};

}  // namespace

TEST_CASE("integrate reproduces simple integrals", "[quadrature]") {
  std::mt19937_64 rng(1);
  const auto g = make_grid(1.0, 100.0, 301);
  CHECK(integrate(GridFn::constant(g, 1.0), 1.0, 100.0) == Approx(99.0).epsilon(1e-13));

  const auto lin = make_grid(1.0, 3.0, 17, GridKind::linear);
  CHECK(integrate(GridFn::sample(lin, [](double y) { return y; }), 1.0, 3.0) == Approx(4.0).epsilon(1e-14));

  const auto unit = linear_from_zero(1025);
  const double sq = integrate(GridFn::sample(unit, [](double y) { return y * y; }), 0.0, 1.0);
  CHECK(std::abs(sq - 1.0 / 3.0) < 1e-6);

  CHECK_THROWS_AS(integrate(GridFn::constant(g, 1.0), 0.5, 2.0), DomainError);
  CHECK_THROWS_AS(integrate(GridFn::constant(g, 1.0), 2.0, 101.0), DomainError);
}

TEST_CASE("integrate is exact for the piecewise-linear interpolant at off-node limits", "[quadrature][property]") {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    const auto g = random_grid(rng, 1.0, 10.0, 12);
    std::vector<double> v(g->size());
    for (double& s : v) s = 4.0 * unit(rng) - 1.0;
    const GridFn f(g, v);
    double a = 1.0 + 9.0 * unit(rng), b = 1.0 + 9.0 * unit(rng);
    if (a > b) std::swap(a, b);

    // Oracle: the interpolant is linear between breakpoints {a, b, nodes in (a,b)}.
    auto interp = [&](double x) {
      const std::size_t i = g->cell_of(x);
      const double t = (x - (*g)[i]) / ((*g)[i + 1] - (*g)[i]);
      return (1.0 - t) * v[i] + t * v[i + 1];
    };
    std::vector<double> pts{a};
    for (double x : g->nodes())
      if (x > a && x < b) pts.push_back(x);
    pts.push_back(b);
    double exact = 0.0;
    for (std::size_t k = 0; k + 1 < pts.size(); ++k)
      exact += 0.5 * (pts[k + 1] - pts[k]) * (interp(pts[k]) + interp(pts[k + 1]));
    REQUIRE(integrate(f, a, b) == Approx(exact).margin(1e-13));
  }
}

TEST_CASE("trapezoid refinement factor is about four", "[quadrature]") {
  auto err = [](std::size_t n) {
    const auto g = make_grid(1.0, 50.0, n);
    const double approx = integrate(GridFn::sample(g, [](double y) { return std::sin(y / 7.0); }), 1.0, 50.0);
    const double exact = 7.0 * (std::cos(1.0 / 7.0) - std::cos(50.0 / 7.0));
    return std::abs(approx - exact);
  };
  for (std::size_t n : {65u, 129u, 257u, 513u}) {
    const double factor = err(n) / err(2 * n - 1);
    CHECK(factor >= 3.5);
    CHECK(factor <= 4.5);
  }
}

TEST_CASE("end-corrected rule", "[quadrature]") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    const auto g = random_grid(rng, 0.5, 4.0, 40);
    const GridFn q = GridFn::sample(g, [](double y) { return 2.0 - 3.0 * y + 0.7 * y * y; });
    const double exact = [](double a, double b) {
      auto F = [](double y) { return 2.0 * y - 1.5 * y * y + 0.7 / 3.0 * y * y * y; };
      return F(b) - F(a);
    }(0.5, 4.0);
    REQUIRE(total(q, Rule::end_corrected) == Approx(exact).margin(1e-12));
  }

  auto err = [](std::size_t n, Rule rule) {
    const auto g = make_grid(1.0, 50.0, n);
    const double exact = 7.0 * (std::cos(1.0 / 7.0) - std::cos(50.0 / 7.0));
    return std::abs(total(GridFn::sample(g, [](double y) { return std::sin(y / 7.0); }), rule) - exact);
  };
  for (std::size_t n : {65u, 129u, 257u}) {
    CHECK(err(n, Rule::end_corrected) / err(2 * n - 1, Rule::end_corrected) > 12.0);
    CHECK(err(n, Rule::end_corrected) < err(n, Rule::trapezoid));
  }
  CHECK(rule_from_string("trapezoid") == Rule::trapezoid);
  CHECK(rule_from_string("end_corrected") == Rule::end_corrected);
  CHECK_THROWS_AS(rule_from_string("simpson"), ArgumentError);
}

TEST_CASE("prefix_integrals", "[quadrature]") {
  const auto g = make_grid(1.0, 3.0, 3, GridKind::linear);
  auto pre = prefix_integrals(GridFn::constant(g, 0.0));
  CHECK(pre.left == std::vector<double>{0.0, 0.0, 0.0});
  CHECK(pre.right == std::vector<double>{0.0, 0.0, 0.0});

  pre = prefix_integrals(GridFn::constant(g, 1.0));
  CHECK(pre.left == std::vector<double>{0.0, 1.5, 4.0});
  CHECK(pre.right == std::vector<double>{2.0, 1.0, 0.0});
}

TEST_CASE("prefix_integrals agree with integrate and are monotone", "[quadrature][property]") {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    const auto g = random_grid(rng, 0.3, 30.0, 64);
    std::vector<double> v(g->size()), yv(g->size());
    for (std::size_t i = 0; i < v.size(); ++i) {
      v[i] = 3.0 * unit(rng);
      yv[i] = (*g)[i] * v[i];
    }
    const GridFn f(g, v);
    const GridFn yf(g, yv);
    const auto pre = prefix_integrals(f);
    for (std::size_t i = 0; i < g->size(); ++i) {
      const double xi = (*g)[i];
      REQUIRE(pre.left[i] == Approx(integrate(yf, g->lo(), xi)).epsilon(1e-13).margin(1e-13));
      REQUIRE(pre.right[i] == Approx(integrate(f, xi, g->hi())).epsilon(1e-13).margin(1e-13));
      if (i > 0) {
        REQUIRE(pre.left[i] >= pre.left[i - 1]);
        REQUIRE(pre.right[i] <= pre.right[i - 1]);
      }
    }
  }
}

TEST_CASE("tail_bound_B", "[quadrature]") {
  CHECK(tail_bound_B(0.0, 1.0, 1e6, kB) == 0.0);
  CHECK(tail_bound_B(1.0, 1.0, 1e6, kB) == Approx(7.0710678e-4).epsilon(1e-7));
  CHECK_THROWS_AS(tail_bound_B(1.0, 10.0, 5.0, kB), ArgumentError);

  double prev = kInfinity;
  for (double R = 2.0; R < 1e12; R *= 3.0) {
    const double b = tail_bound_B(2.0, 1.0, R, kB);
    REQUIRE(b < prev);
    prev = b;
  }
}

TEST_CASE("tail_bound_B dominates the discarded tail", "[quadrature][property]") {
  // Brute force: with y = R/t^2 the tail becomes a smooth integral over t in (0, 1].
  auto tail = [](const ModelParams& p, double psi, double x, double R) {
    const std::size_t m = 200000;
    double s = 0.0;
    for (std::size_t k = 0; k < m; ++k) {
      const double t = (static_cast<double>(k) + 0.5) / static_cast<double>(m);
      const double y = R / (t * t);
      const double f = kernel(x, y) * (y / std::sqrt(y + p.eps)) * psi / (y + psi * psi / (y + p.eps));
      s += f * 2.0 * R / (t * t * t);
    }
    return 0.5 * p.lambda * std::sqrt(x + p.eps) * s / static_cast<double>(m);
  };
  for (double lambda : {0.25, 0.9})
    for (double psi : {0.1, 1.0, 10.0})
      for (double R : {1e3, 1e4, 1e5}) {
        const ModelParams p{lambda, 1.0, kInfinity, std::nullopt};
        const double t = tail(p, psi, 1.0, R);
        REQUIRE(t > 0.0);
        REQUIRE(t <= tail_bound_B(psi, 1.0, R, p));
      }
}

TEST_CASE("certified_radius", "[quadrature]") {
  for (double psi : {0.5, 1.0, 10.0})
    for (double x : {1.0, 3.0, 40.0})
      for (double tol : {1e-3, 1e-6}) {
        const double R = certified_radius(psi, x, kB, tol);
        const double k = std::log2(R / kB.eps);
        REQUIRE(k == std::round(k));
        REQUIRE(R >= 2.0 * x);
        REQUIRE(tail_bound_B(psi, x, R, kB) < 0.5 * tol);
        const double half = 0.5 * R;
        if (half >= 2.0 * x) REQUIRE(tail_bound_B(psi, x, half, kB) >= 0.5 * tol);
      }
  CHECK(certified_radius(0.0, 1.0, kB, 1e-8) == 2.0);
}
