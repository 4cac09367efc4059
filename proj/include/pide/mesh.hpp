#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "pide/errors.hpp"

namespace pide {

/// Time levels 0 = t_0 < t_1 < ... < t_N = T and the steps k_n = t_n - t_{n-1}.
///
/// Steps are indexed from 1 to match the levels: `step(n)` is k_n for
/// 1 <= n <= N. Immutable once built.
class TemporalMesh {
 public:
  /// Graded levels t_n = (n k)^gamma with k = T^{1/gamma} / N.
  static TemporalMesh graded(double final_time, int steps, double grading) {
    if (!(final_time > 0.0)) {
      throw DomainError("graded mesh: T must be positive");
    }
    if (steps < 1) {
      throw DomainError("graded mesh: N must be at least 1");
    }
    if (!(grading >= 1.0)) {
      throw DomainError("graded mesh: grading exponent must be >= 1, got " +
                        std::to_string(grading));
    }
    const double k_base = std::pow(final_time, 1.0 / grading) / steps;
    std::vector<double> t(static_cast<std::size_t>(steps) + 1);
    t.front() = 0.0;
    for (int n = 1; n < steps; ++n) {
      t[n] = std::pow(n * k_base, grading);
    }
    t.back() = final_time;
    return TemporalMesh(std::move(t), grading, k_base);
  }

  /// Mesh from explicit levels. `grading` and `k_base` are only used by the
  /// hypothesis checker; `k_base` defaults to T^{1/gamma} / N.
  static TemporalMesh from_levels(std::vector<double> levels,
                                  double grading = 1.0,
                                  double k_base = 0.0) {
    if (levels.size() < 2) {
      throw DomainError("mesh needs at least two time levels");
    }
    if (levels.front() != 0.0) {
      throw DomainError("mesh must start at t_0 = 0");
    }
    for (std::size_t n = 1; n < levels.size(); ++n) {
      if (!(levels[n] > levels[n - 1])) {
        throw DomainError("mesh levels must be strictly increasing");
      }
    }
    if (!(grading >= 1.0)) {
      throw DomainError("grading exponent must be >= 1");
    }
    if (k_base <= 0.0) {
      k_base = std::pow(levels.back(), 1.0 / grading) /
               static_cast<double>(levels.size() - 1);
    }
    return TemporalMesh(std::move(levels), grading, k_base);
  }

  int steps() const noexcept { return static_cast<int>(t_.size()) - 1; }
  double final_time() const noexcept { return t_.back(); }
  double grading() const noexcept { return grading_; }
  double k_base() const noexcept { return k_base_; }

  double time(int n) const { return t_.at(static_cast<std::size_t>(n)); }
  double step(int n) const { return k_.at(static_cast<std::size_t>(n - 1)); }
  double midpoint(int n) const { return 0.5 * (time(n - 1) + time(n)); }

  const std::vector<double>& times() const noexcept { return t_; }
  const std::vector<double>& steps_sizes() const noexcept { return k_; }

 private:
  TemporalMesh(std::vector<double> t, double grading, double k_base)
      : t_(std::move(t)), grading_(grading), k_base_(k_base) {
    k_.resize(t_.size() - 1);
    for (std::size_t n = 1; n < t_.size(); ++n) {
      k_[n - 1] = t_[n] - t_[n - 1];
    }
  }

  std::vector<double> t_;
  std::vector<double> k_;
  double grading_;
  double k_base_;
};

inline TemporalMesh build_graded_mesh(double final_time, int steps,
                                      double grading) {
  return TemporalMesh::graded(final_time, steps, grading);
}

/// Uniform nodes x_j = j h on [0, L], h = L / J.
class SpatialGrid {
 public:
  SpatialGrid(double length, int intervals) : length_(length), J_(intervals) {
    if (!(length > 0.0)) {
      throw DomainError("spatial grid: L must be positive");
    }
    if (intervals < 2) {
      throw DomainError("spatial grid: J must be at least 2, got " +
                        std::to_string(intervals));
    }
    h_ = length / intervals;
    x_.resize(static_cast<std::size_t>(intervals) + 1);
    for (int j = 0; j < intervals; ++j) {
      x_[j] = j * h_;
    }
    x_.back() = length;
  }

  double length() const noexcept { return length_; }
  int intervals() const noexcept { return J_; }
  double width() const noexcept { return h_; }
  double node(int j) const { return x_.at(static_cast<std::size_t>(j)); }
  const std::vector<double>& nodes() const noexcept { return x_; }

  friend bool operator==(const SpatialGrid& a, const SpatialGrid& b) {
    return a.J_ == b.J_ && a.length_ == b.length_;
  }

 private:
  double length_;
  int J_;
  double h_ = 0.0;
  std::vector<double> x_;
};

inline SpatialGrid build_spatial_grid(double length, int intervals) {
  return SpatialGrid(length, intervals);
}

/// Outcome of checking the three structural mesh hypotheses.
///
/// Each `*_constant` is the smallest constant for which the corresponding
/// inequality holds on this mesh. The boolean is true when the sign and
/// ordering conditions hold and the constant does not exceed the limit
/// passed to `check_mesh_hypotheses` (unbounded by default).
struct MeshHypotheses {
  // k_n <= C k min{1, t_n^{1-1/gamma}}
  bool step_bound = false;
  double step_bound_constant = 0.0;

  // t_1 >= c k^gamma and t_n <= C t_{n-1}
  bool start_and_ratio = false;
  double start_constant = 0.0;
  double ratio_constant = 0.0;

  // 0 <= k_{n+1} - k_n <= C k^2 min{1, t_n^{1-2/gamma}}
  bool step_increment = false;
  double increment_constant = 0.0;

  bool all() const noexcept {
    return step_bound && start_and_ratio && step_increment;
  }
};

inline MeshHypotheses check_mesh_hypotheses(
    const TemporalMesh& mesh,
    double constant_limit = std::numeric_limits<double>::infinity()) {
  MeshHypotheses out;
  const double g = mesh.grading();
  const double k = mesh.k_base();
  const int N = mesh.steps();

  double c9 = 0.0;
  for (int n = 1; n <= N; ++n) {
    const double scale =
        k * std::min(1.0, std::pow(mesh.time(n), 1.0 - 1.0 / g));
    c9 = std::max(c9, mesh.step(n) / scale);
  }
  out.step_bound_constant = c9;
  out.step_bound = std::isfinite(c9) && c9 <= constant_limit;

  out.start_constant = mesh.time(1) / std::pow(k, g);
  double ratio = 1.0;
  for (int n = 2; n <= N; ++n) {
    ratio = std::max(ratio, mesh.time(n) / mesh.time(n - 1));
  }
  out.ratio_constant = ratio;
  out.start_and_ratio = out.start_constant > 0.0 &&
                        std::isfinite(ratio) && ratio <= constant_limit &&
                        1.0 / out.start_constant <= constant_limit;

  // Monotonicity is checked from the first step on; roundoff in the level
  // construction can leave uniform steps differing in the last bits.
  bool monotone = true;
  double c11 = 0.0;
  for (int n = 1; n < N; ++n) {
    const double diff = mesh.step(n + 1) - mesh.step(n);
    const double tol = 1e-10 * mesh.step(n + 1);
    if (diff < -tol) {
      monotone = false;
    }
    const double scale =
        k * k * std::min(1.0, std::pow(mesh.time(n), 1.0 - 2.0 / g));
    c11 = std::max(c11, std::max(diff, 0.0) / scale);
  }
  out.increment_constant = c11;
  out.step_increment = monotone && std::isfinite(c11) && c11 <= constant_limit;
  return out;
}

}  // namespace pide
