#include <catch_amalgamated.hpp>

#include <cmath>
#include <memory>
#include <numbers>
#include <random>

#include "pide/grid_function.hpp"
#include "support/energy_identities.hpp"
#include "support/oracles.hpp"

using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;
using pide::GridFunction;

namespace {

std::shared_ptr<const pide::SpatialGrid> grid(int J, double L = 1.0) {
  return std::make_shared<const pide::SpatialGrid>(L, J);
}

GridFunction from(const std::shared_ptr<const pide::SpatialGrid>& g, std::vector<double> v) {
  return GridFunction(g, std::move(v));
}

constexpr double pi = std::numbers::pi;

}  // namespace

TEST_CASE("inner product and norms", "[gridops]") {
  const auto g = grid(4);
  const GridFunction zero(g);
  const GridFunction ones = from(g, {0, 1, 1, 1, 0});
  CHECK(pide::inner(zero, ones) == 0.0);
  CHECK_THAT(pide::inner(ones, ones), WithinRel(0.75, 1e-15));
  CHECK_THAT(pide::norm_l2(ones), WithinRel(0.8660254037844386, 1e-14));
  CHECK(pide::norm_l2(zero) == 0.0);
  CHECK(pide::norm_inf(zero) == 0.0);
  CHECK(pide::norm_inf(from(g, {0, -2, 1, 0, 0})) == 2.0);

  std::mt19937_64 rng(3);
  const auto w = oracle::random_grid_function(g, rng);
  const auto v = oracle::random_grid_function(g, rng);
  CHECK(pide::inner(w, v) == pide::inner(v, w));
}

TEST_CASE("mismatched grids are rejected", "[gridops]") {
  const GridFunction a(grid(4)), b(grid(8));
  CHECK_THROWS_AS(pide::inner(a, b), pide::PreconditionError);
  CHECK_NOTHROW(pide::inner(a, GridFunction(grid(4))));
}

TEST_CASE("second difference stencil", "[gridops]") {
  const auto g = grid(4);
  CHECK(pide::norm_inf(pide::second_difference(GridFunction(g))) == 0.0);
  const GridFunction d = pide::second_difference(from(g, {0, 1, 2, 1, 0}));
  const double expected[] = {0, 0, -32, 0, 0};
  for (int j = 0; j <= 4; ++j) CHECK_THAT(d[j], WithinAbs(expected[j], 1e-12));
}

TEST_CASE("second difference is second order on sin(pi x)", "[gridops]") {
  auto max_error = [](int J) {
    const auto g = grid(J);
    const GridFunction w = GridFunction::sample(g, [](double x) { return std::sin(pi * x); });
    const GridFunction d = pide::second_difference(w);
    double err = 0.0;
    for (int j = 1; j < J; ++j) {
      err = std::max(err, std::abs(d[j] + pi * pi * std::sin(pi * g->node(j))));
    }
    return err;
  };
  const double e128 = max_error(128);
  const double e256 = max_error(256);
  const double h = 1.0 / 128;
  CHECK(e128 <= std::pow(pi, 4) / 12 * h * h * 1.01);
  CHECK_THAT(std::log2(e128 / e256), WithinAbs(2.0, 0.01));
}

TEST_CASE("Galerkin convection stencil", "[gridops]") {
  const auto g = grid(4);
  CHECK(pide::norm_inf(pide::nonlinear_convection(GridFunction(g))) == 0.0);
  const GridFunction w = from(g, {0, 1, 2, 1, 0});
  const GridFunction n = pide::nonlinear_convection(w);
  const double expected[] = {0, 4, 0, -4, 0};
  for (int j = 0; j <= 4; ++j) CHECK_THAT(n[j], WithinAbs(expected[j], 1e-12));

  // Same values from the expanded form (1/6h)[w Delta w + Delta(w^2)].
  for (int j = 1; j < 4; ++j) {
    const double expanded =
        (w[j] * (w[j + 1] - w[j - 1]) + (w[j + 1] * w[j + 1] - w[j - 1] * w[j - 1])) / (6 * 0.25);
    CHECK_THAT(n[j], WithinAbs(expanded, 1e-12));
  }
}

TEST_CASE("convection is second order on sin(pi x)", "[gridops]") {
  auto max_error = [](int J) {
    const auto g = grid(J);
    const GridFunction w = GridFunction::sample(g, [](double x) { return std::sin(pi * x); });
    const GridFunction n = pide::nonlinear_convection(w);
    double err = 0.0;
    for (int j = 1; j < J; ++j) {
      const double x = g->node(j);
      err = std::max(err, std::abs(n[j] - std::sin(pi * x) * pi * std::cos(pi * x)));
    }
    return err;
  };
  const double e256 = max_error(256);
  CHECK(e256 < 1e-3);
  CHECK_THAT(std::log2(e256 / max_error(512)), WithinAbs(2.0, 0.02));
}

TEST_CASE("operators stay in W_h", "[gridops]") {
  std::mt19937_64 rng(17);
  const auto g = grid(9);
  const auto w = oracle::random_grid_function(g, rng);
  CHECK(pide::second_difference(w).in_solution_space());
  CHECK(pide::nonlinear_convection(w).in_solution_space());
}

TEST_CASE("discrete energy identities on random grid functions", "[gridops][property]") {
  std::mt19937_64 rng(1234);
  std::uniform_int_distribution<int> sizes(4, 64);
  std::uniform_real_distribution<double> lengths(0.5, 3.0);
  for (int trial = 0; trial < 500; ++trial) {
    const auto g = grid(sizes(rng), lengths(rng));
    const auto w = oracle::random_grid_function(g, rng);
    const auto v = oracle::random_grid_function(g, rng);
    INFO("trial " << trial << " J=" << g->intervals());
    REQUIRE(identities::agree(identities::summation_by_parts(w, v)));
    REQUIRE(identities::agree(identities::product_difference(w, v)));
    REQUIRE(identities::agree(identities::skew_i(w, v)));
    REQUIRE(identities::agree(identities::skew_ii(w, v)));
    REQUIRE(identities::agree(identities::skew_iii(w, v)));
    REQUIRE(identities::agree(identities::convection_difference(w, v)));
    const auto energy = identities::convection_energy(w);
    REQUIRE(std::abs(energy.first) <= 1e-14 * (1.0 + identities::convection_energy_scale(w)));
  }
}
