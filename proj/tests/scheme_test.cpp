#include <catch_amalgamated.hpp>

#include <Eigen/Dense>

#include <cmath>
#include <memory>
#include <random>
#include <vector>

#include "pide/harness.hpp"
#include "pide/scheme.hpp"
#include "support/oracles.hpp"

using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

std::shared_ptr<const pide::SpatialGrid> grid(int J, double L = 1.0) {
  return std::make_shared<const pide::SpatialGrid>(L, J);
}

std::vector<double> interior(const pide::GridFunction& u) {
  return {u.values().begin() + 1, u.values().end() - 1};
}

// Dense oracle fed with the same weights and forcing the solver sees. The
// oracle writes its own difference operators and nonlinear solve.
oracle::CoupledSchemeOracle oracle_for(const pide::Solver& solver) {
  oracle::CoupledSchemeOracle o;
  o.J = solver.grid().intervals();
  o.h = solver.grid().width();
  o.t = solver.mesh().times();
  o.weight = [&solver](int n, int s) { return solver.weights()(n, s); };
  o.forcing = [&solver](int n) { return interior(solver.forcing(n)); };
  o.u0 = interior(solver.initial_state().U);
  o.convection = solver.config().include_convection;
  return o;
}

double max_diff(const std::vector<double>& a, const std::vector<double>& b) {
  REQUIRE(a.size() == b.size());
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

pide::SchemeConfig tight(pide::ForcingMode mode = pide::ForcingMode::endpoint_average) {
  pide::SchemeConfig c;
  c.eps = 1e-13;
  c.f_mode = mode;
  return c;
}

}  // namespace

TEST_CASE("tridiagonal solve", "[scheme][tridiagonal]") {
  SECTION("identity") {
    const std::vector<double> off(3, 0.0), d(4, 1.0), b{1, 2, 3, 4};
    CHECK(pide::tridiagonal_solve(off, d, off, b) == b);
  }
  SECTION("3x3 example against a dense solve") {
    const std::vector<double> off(2, -1.0), d(3, 2.0), b{1, 0, 1};
    const auto x = pide::tridiagonal_solve(off, d, off, b);
    Eigen::Matrix3d A;
    A << 2, -1, 0, -1, 2, -1, 0, -1, 2;
    const Eigen::Vector3d ref = A.lu().solve(Eigen::Vector3d(1, 0, 1));
    for (int i = 0; i < 3; ++i) {
      CHECK_THAT(x[i], WithinAbs(1.0, 1e-14));
      CHECK_THAT(x[i], WithinAbs(ref[i], 1e-14));
    }
  }
  SECTION("random diagonally dominant systems") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int trial = 0; trial < 20; ++trial) {
      const int m = 50;
      std::vector<double> off(m - 1), d(m), b(m);
      for (auto& v : off) v = u(rng);
      for (int i = 0; i < m; ++i) d[i] = 2.5 + std::abs(u(rng));
      for (auto& v : b) v = u(rng);
      const auto x = pide::tridiagonal_solve(off, d, off, b);
      double res = 0.0, bmax = 0.0;
      for (int i = 0; i < m; ++i) {
        double r = d[i] * x[i] - b[i];
        if (i > 0) r += off[i - 1] * x[i - 1];
        if (i + 1 < m) r += off[i] * x[i + 1];
        res = std::max(res, std::abs(r));
        bmax = std::max(bmax, std::abs(b[i]));
      }
      CHECK(res <= 1e-12 * bmax);
    }
  }
  SECTION("zero pivot and bad sizes") {
    const std::vector<double> off{1.0}, d{0.0, 1.0}, b{1.0, 1.0};
    CHECK_THROWS_AS(pide::tridiagonal_solve(off, d, off, b), pide::NumericalError);
    const std::vector<double> d3(3, 1.0);
    CHECK_THROWS_AS(pide::tridiagonal_solve(off, d3, off, b), pide::PreconditionError);
  }
}

TEST_CASE("zero data stays zero", "[scheme]") {
  const auto result = pide::solve(pide::zero_problem(0.4), pide::build_graded_mesh(1.0, 6, 1.5),
                                  grid(10), 0.4, {.keep_trajectory = true});
  REQUIRE(result.trajectory.size() == 7);
  for (const auto& U : result.trajectory) CHECK(pide::norm_inf(U) == 0.0);
  for (const auto& r : result.reports) CHECK(r.iterations == 1);
}

TEST_CASE("first and second steps match the dense oracle", "[scheme][oracle]") {
  const double alpha = 0.5;
  const pide::Solver solver(pide::example1(alpha), pide::build_graded_mesh(1.0, 8, 1.0), grid(16),
                            alpha, tight());
  auto o = oracle_for(solver);
  o.t.resize(3);  // levels 0..2 suffice
  const auto levels = o.solve();

  auto state = solver.initial_state();
  solver.first_step(state);
  CHECK(max_diff(interior(state.U), levels[1]) <= 1e-8);
  const auto U1 = interior(state.U);
  solver.general_step(state);
  std::vector<double> V(U1.size()), V_oracle(U1.size());
  const auto U2 = interior(state.U);
  for (std::size_t i = 0; i < V.size(); ++i) {
    V[i] = 0.5 * (U2[i] + U1[i]);
    V_oracle[i] = 0.5 * (levels[2][i] + levels[1][i]);
  }
  CHECK(max_diff(V, V_oracle) <= 1e-8);
}

TEST_CASE("linear part reduces to a single direct solve", "[scheme]") {
  const double alpha = 0.3;
  auto config = tight();
  config.include_convection = false;
  const auto g = grid(12);
  const pide::Solver solver(pide::example1(alpha), pide::build_graded_mesh(1.0, 4, 1.2), g, alpha,
                            config);
  auto state = solver.initial_state();
  const auto report = solver.first_step(state);
  // The second pass only confirms the first.
  CHECK(report.iterations == 2);

  const int m = 11;
  const double k = solver.mesh().step(1), h = g->width();
  const double mu = std::pow(k, alpha) / oracle::tgamma(alpha + 2);  // w_11 k_1
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(m, m);
  Eigen::VectorXd b(m);
  const auto u0 = solver.initial_state().U;
  const auto f = solver.forcing(1);
  for (int i = 0; i < m; ++i) {
    A(i, i) = 1.0 / k + 2 * mu / (h * h);
    if (i > 0) A(i, i - 1) = -mu / (h * h);
    if (i + 1 < m) A(i, i + 1) = -mu / (h * h);
    b[i] = u0[i + 1] / k + f[i + 1];
  }
  const Eigen::VectorXd x = A.partialPivLu().solve(b);
  for (int i = 0; i < m; ++i) CHECK_THAT(state.U[i + 1], WithinAbs(x[i], 1e-12));
}

TEST_CASE("a step replayed from the same state is bit-identical", "[scheme]") {
  const double alpha = 0.6;
  const pide::Solver solver(pide::example1(alpha), pide::build_graded_mesh(1.0, 5, 1.4), grid(32),
                            alpha);
  auto state = solver.initial_state();
  solver.first_step(state);
  solver.general_step(state);
  auto copy = state;
  solver.general_step(state);
  solver.general_step(copy);
  CHECK(interior(state.U) == interior(copy.U));
  CHECK(state.reports.back().iterations == copy.reports.back().iterations);
}

TEST_CASE("full trajectories match the dense oracle", "[scheme][oracle]") {
  for (int example : {1, 2}) {
    for (double alpha : {0.25, 0.75}) {
      for (auto [N, J] : {std::pair{4, 8}, std::pair{3, 6}, std::pair{4, 5}}) {
        const auto mode = example == 1 ? pide::ForcingMode::endpoint_average
                                       : pide::ForcingMode::interval_average;
        auto config = tight(mode);
        config.keep_trajectory = true;
        const double gamma = 2.0 / (alpha + 1.0);
        const pide::Solver solver(example == 1 ? pide::example1(alpha) : pide::example2(alpha),
                                  pide::build_graded_mesh(1.0, N, gamma), grid(J), alpha, config);
        const auto result = pide::run(solver);
        const auto levels = oracle_for(solver).solve();
        INFO("example " << example << " alpha " << alpha << " N " << N << " J " << J);
        for (int n = 0; n <= N; ++n) {
          CHECK(max_diff(interior(result.trajectory[n]), levels[n]) <= 1e-7);
        }
      }
    }
  }
}

TEST_CASE("boundary values and stability reports", "[scheme]") {
  const double alpha = 0.25;
  auto mesh = pide::build_graded_mesh(1.0, 16, 1.6);
  pide::SchemeConfig config;
  config.keep_trajectory = true;
  const auto problem = pide::example1(alpha);
  const auto g = grid(64);
  const auto result = pide::solve(problem, mesh, g, alpha, config);
  for (const auto& U : result.trajectory) {
    CHECK(U[0] == 0.0);
    CHECK(U[64] == 0.0);
  }
  REQUIRE(result.reports.size() == 16);
  CHECK(result.all_stable());

  // Bound rebuilt from scratch.
  double budget = 0.0;
  for (int n = 1; n <= 16; ++n) {
    const auto f = pide::f_half(problem.forcing, mesh, n, config.f_mode, g);
    budget += mesh.step(n) * pide::norm_l2(f);
    const auto& r = result.reports[n - 1];
    CHECK(r.step == n);
    CHECK_THAT(r.stability_bound,
               WithinRel(pide::norm_l2(result.trajectory[0]) + 2 * budget, 1e-12));
    CHECK_THAT(r.norm, WithinRel(pide::norm_l2(result.trajectory[n]), 1e-15));
    CHECK(r.iterations < 300);
  }
}

TEST_CASE("iteration cap surfaces as nonconvergence", "[scheme]") {
  pide::SchemeConfig config;
  config.eps = 1e-15;
  config.max_steps = 1;
  try {
    pide::solve(pide::example1(0.5), pide::build_graded_mesh(1.0, 4, 1.0), grid(16), 0.5, config);
    FAIL("expected NonconvergenceError");
  } catch (const pide::NonconvergenceError& e) {
    CHECK(e.step() == 1);
    CHECK(e.iterations() == 1);
    CHECK(e.last_increment() > 0.0);
  }
}

TEST_CASE("bad configurations and call order", "[scheme]") {
  CHECK_THROWS_AS(pide::Solver(pide::example1(0.5), pide::build_graded_mesh(1.0, 4, 1.0),
                               grid(8), 0.5, {.eps = 0.0}),
                  pide::DomainError);
  const pide::Solver solver(pide::example1(0.5), pide::build_graded_mesh(1.0, 2, 1.0), grid(8),
                            0.5);
  auto state = solver.initial_state();
  CHECK_THROWS_AS(solver.general_step(state), pide::PreconditionError);
  solver.first_step(state);
  CHECK_THROWS_AS(solver.first_step(state), pide::PreconditionError);
  solver.general_step(state);
  CHECK_THROWS_AS(solver.general_step(state), pide::PreconditionError);
}

TEST_CASE("published single-row errors", "[scheme][reference]") {
  const auto g = grid(1024);
  {
    const auto problem = pide::example1(0.25);
    const auto r = pide::solve(problem, pide::build_graded_mesh(1.0, 8, 1.0), g, 0.25);
    CHECK_THAT(pide::error_at_final_time(r.final_solution, problem, 1.0), WithinRel(5.2489e-3, 0.05));
  }
  {
    const auto problem = pide::example1(0.25);
    const auto r = pide::solve(problem, pide::build_graded_mesh(1.0, 64, 1.6), g, 0.25);
    CHECK_THAT(pide::error_at_final_time(r.final_solution, problem, 1.0), WithinRel(3.3192e-5, 0.05));
  }
}
