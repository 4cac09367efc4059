#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <memory>
#include <span>
#include <utility>
#include <vector>

#include "pide/errors.hpp"
#include "pide/grid_function.hpp"
#include "pide/mesh.hpp"
#include "pide/problems.hpp"
#include "pide/quadrature.hpp"

namespace pide {

struct SchemeConfig {
  /// Picard iteration stops once the discrete L2 increment drops below eps.
  double eps = 1e-6;
  int max_steps = 300;
  ForcingMode f_mode = ForcingMode::endpoint_average;
  /// Throw StabilityViolation when a level exceeds the energy bound.
  bool enforce_stability = true;
  /// Keep every level U^0..U^N in the result.
  bool keep_trajectory = false;
  /// Drop u u_x from the scheme; only used to test the linear part in isolation.
  bool include_convection = true;

  void validate() const {
    if (!(eps > 0.0)) throw DomainError("eps must be positive");
    if (max_steps < 1) throw DomainError("max_steps must be at least 1");
  }
};

struct StepReport {
  int step = 0;
  int iterations = 0;
  double final_increment = 0.0;
  /// ||U^n|| and the right-hand side of ||U^n|| <= ||U^0|| + 2 sum k_l ||f^{l-1/2}||.
  double norm = 0.0;
  double stability_bound = 0.0;

  bool stable(double slack = 1e-9) const { return norm <= stability_bound + slack; }
};

/// Everything step n needs from steps 1..n-1.
struct SolverState {
  int n = 0;  // steps completed
  GridFunction U;  // U^n after step n (U^0 before the first step)
  GridFunction D_first;  // second difference of U^1
  std::vector<GridFunction> D_half;  // second differences of U^{s-1/2}, s = 2..n
  double initial_norm = 0.0;
  double forcing_budget = 0.0;  // sum_{l<=n} k_l ||f^{l-1/2}||
  std::vector<StepReport> reports;
};

/// Solves A x = rhs for tridiagonal A by Thomas elimination.
/// `lower` and `upper` hold the m-1 off-diagonal entries.
inline std::vector<double> tridiagonal_solve(std::span<const double> lower,
                                             std::span<const double> diag,
                                             std::span<const double> upper,
                                             std::span<const double> rhs) {
  const std::size_t m = diag.size();
  if (rhs.size() != m || (m > 0 && (lower.size() != m - 1 || upper.size() != m - 1))) {
    throw PreconditionError("tridiagonal_solve: inconsistent sizes");
  }
  if (m == 0) return {};
  std::vector<double> c(m), x(m);
  double pivot = diag[0];
  if (pivot == 0.0) throw NumericalError("tridiagonal_solve: zero pivot at row 0");
  c[0] = m > 1 ? upper[0] / pivot : 0.0;
  x[0] = rhs[0] / pivot;
  for (std::size_t i = 1; i < m; ++i) {
    pivot = diag[i] - lower[i - 1] * c[i - 1];
    if (pivot == 0.0) {
      throw NumericalError("tridiagonal_solve: zero pivot at row " + std::to_string(i));
    }
    c[i] = i + 1 < m ? upper[i] / pivot : 0.0;
    x[i] = (rhs[i] - lower[i - 1] * x[i - 1]) / pivot;
  }
  for (std::size_t i = m - 1; i-- > 0;) x[i] -= c[i] * x[i + 1];
  return x;
}

/// Fully discrete implicit scheme on a fixed (mesh, grid, alpha).
///
/// Step 1 solves for U^1 directly:
///   (U^1 - U^0)/k_1 + N(U^1) = w_11 k_1 D2 U^1 + f^{1/2}.
/// Step n >= 2 solves for V = U^{n-1/2}:
///   (2/k_n)(V - U^{n-1}) + N(V) = w_nn k_n D2 V + H_n + f^{n-1/2},
/// where H_n collects the memory of steps 1..n-1. In both cases N is lagged
/// one Picard iterate behind so every pass is one tridiagonal solve.
class Solver {
 public:
  Solver(ManufacturedProblem problem, TemporalMesh mesh,
         std::shared_ptr<const SpatialGrid> grid, double alpha, SchemeConfig config = {})
      : problem_(std::move(problem)),
        grid_(std::move(grid)),
        weights_(mesh, alpha),
        config_(config) {
    config_.validate();
  }

  const PIWeights& weights() const noexcept { return weights_; }
  const TemporalMesh& mesh() const noexcept { return weights_.mesh(); }
  const SpatialGrid& grid() const noexcept { return *grid_; }
  const std::shared_ptr<const SpatialGrid>& grid_ptr() const noexcept { return grid_; }
  const SchemeConfig& config() const noexcept { return config_; }
  const ManufacturedProblem& problem() const noexcept { return problem_; }

  SolverState initial_state() const {
    SolverState state;
    state.U = problem_.initial(grid_);
    state.initial_norm = norm_l2(state.U);
    state.D_first = GridFunction(grid_);
    return state;
  }

  GridFunction forcing(int n) const {
    return f_half(problem_.forcing, mesh(), n, config_.f_mode, grid_);
  }

  StepReport first_step(SolverState& state) const {
    if (state.n != 0) throw PreconditionError("first_step needs a fresh state");
    const double k = mesh().step(1);
    const double mu = weights_(1, 1) * k;
    const GridFunction f = forcing(1);

    GridFunction rhs = (1.0 / k) * state.U;
    rhs += f;
    auto [U1, iters, inc] = picard(1, 1.0 / k, mu, rhs, state.U);

    state.D_first = second_difference(U1);
    state.U = std::move(U1);
    return finish_step(state, 1, iters, inc, norm_l2(f), k);
  }

  StepReport general_step(SolverState& state) const {
    const int n = state.n + 1;
    if (state.n < 1) throw PreconditionError("general_step needs step 1 completed");
    if (n > mesh().steps()) throw PreconditionError("general_step past the final level");
    if (state.D_half.size() != static_cast<std::size_t>(n - 2)) {
      throw PreconditionError("general_step: history has the wrong length");
    }
    const double k = mesh().step(n);
    const double mu = weights_(n, n) * k;
    const GridFunction f = forcing(n);

    GridFunction rhs = partial_history_sum(weights_, n, state.D_first, state.D_half);
    rhs += f;
    rhs.add_scaled(2.0 / k, state.U);
    auto [V, iters, inc] = picard(n, 2.0 / k, mu, rhs, state.U);

    state.D_half.push_back(second_difference(V));
    GridFunction Un = 2.0 * V;
    Un -= state.U;
    Un[0] = 0.0;
    Un[Un.size() - 1] = 0.0;
    state.U = std::move(Un);
    return finish_step(state, n, iters, inc, norm_l2(f), k);
  }

 private:
  struct PicardResult {
    GridFunction value;
    int iterations;
    double increment;
  };

  /// Iterates  a X - mu D2 X = rhs - N(X_prev)  from X_0 = start.
  PicardResult picard(int step, double a, double mu, const GridFunction& rhs,
                      const GridFunction& start) const {
    const int J = grid_->intervals();
    const std::size_t m = static_cast<std::size_t>(J - 1);
    const double h2 = grid_->width() * grid_->width();
    const double off = -mu / h2;
    const double d = a + 2.0 * mu / h2;
    if (!(d > 2.0 * std::abs(off))) {
      throw NumericalError("implicit matrix is not strictly diagonally dominant at step " +
                           std::to_string(step));
    }
    const std::vector<double> lower(m - 1, off), upper(m - 1, off), diag(m, d);
    std::vector<double> b(m);

    GridFunction X = start;
    double increment = INFINITY;
    for (int it = 1; it <= config_.max_steps; ++it) {
      if (config_.include_convection) {
        const GridFunction conv = nonlinear_convection(X);
        for (std::size_t i = 0; i < m; ++i) b[i] = rhs[i + 1] - conv[i + 1];
      } else {
        for (std::size_t i = 0; i < m; ++i) b[i] = rhs[i + 1];
      }
      const std::vector<double> x = tridiagonal_solve(lower, diag, upper, b);
      GridFunction next(grid_);
      for (std::size_t i = 0; i < m; ++i) next[i + 1] = x[i];
      increment = norm_l2(next - X);
      X = std::move(next);
      if (increment < config_.eps) return {std::move(X), it, increment};
    }
    throw NonconvergenceError(step, config_.max_steps, increment);
  }

  StepReport finish_step(SolverState& state, int n, int iters, double inc,
                         double f_norm, double k) const {
    state.n = n;
    state.forcing_budget += k * f_norm;
    StepReport r;
    r.step = n;
    r.iterations = iters;
    r.final_increment = inc;
    r.norm = norm_l2(state.U);
    r.stability_bound = state.initial_norm + 2.0 * state.forcing_budget;
    state.reports.push_back(r);
    if (config_.enforce_stability && !r.stable()) {
      throw StabilityViolation(n, r.norm, r.stability_bound);
    }
    return r;
  }

  ManufacturedProblem problem_;
  std::shared_ptr<const SpatialGrid> grid_;
  PIWeights weights_;
  SchemeConfig config_;
};

struct SolveResult {
  GridFunction final_solution;
  std::vector<GridFunction> trajectory;  // U^0..U^N when requested
  std::vector<StepReport> reports;

  int max_iterations() const {
    int m = 0;
    for (const auto& r : reports) m = std::max(m, r.iterations);
    return m;
  }
  bool all_stable() const {
    for (const auto& r : reports) {
      if (!r.stable()) return false;
    }
    return true;
  }
};

inline SolveResult run(const Solver& solver) {
  SolverState state = solver.initial_state();
  SolveResult out;
  if (solver.config().keep_trajectory) out.trajectory.push_back(state.U);
  const int N = solver.mesh().steps();
  for (int n = 1; n <= N; ++n) {
    if (n == 1) {
      solver.first_step(state);
    } else {
      solver.general_step(state);
    }
    if (solver.config().keep_trajectory) out.trajectory.push_back(state.U);
  }
  out.final_solution = state.U;
  out.reports = std::move(state.reports);
  return out;
}

inline SolveResult solve(const ManufacturedProblem& problem, const TemporalMesh& mesh,
                         std::shared_ptr<const SpatialGrid> grid, double alpha,
                         const SchemeConfig& config = {}) {
  return run(Solver(problem, mesh, std::move(grid), alpha, config));
}

}  // namespace pide
