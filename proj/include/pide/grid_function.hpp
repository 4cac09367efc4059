#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <utility>
#include <vector>

#include "pide/errors.hpp"
#include "pide/mesh.hpp"

namespace pide {

/// Nodal values v_0..v_J on a SpatialGrid.
///
/// The solution space W_h is the subspace with v_0 = v_J = 0; every operator
/// in this header returns a function in W_h. The grid is shared, so copies
/// are cheap apart from the value vector.
class GridFunction {
 public:
  GridFunction() = default;

  explicit GridFunction(std::shared_ptr<const SpatialGrid> grid)
      : grid_(std::move(grid)),
        v_(static_cast<std::size_t>(grid_->intervals()) + 1, 0.0) {}

  GridFunction(std::shared_ptr<const SpatialGrid> grid, std::vector<double> v)
      : grid_(std::move(grid)), v_(std::move(v)) {
    if (v_.size() != static_cast<std::size_t>(grid_->intervals()) + 1) {
      throw PreconditionError("grid function size does not match grid");
    }
  }

  /// Samples `g` at the interior nodes; boundary values are set to zero.
  static GridFunction sample(std::shared_ptr<const SpatialGrid> grid,
                             const std::function<double(double)>& g) {
    GridFunction out(std::move(grid));
    const int J = out.intervals();
    for (int j = 1; j < J; ++j) {
      out.v_[j] = g(out.grid_->node(j));
    }
    return out;
  }

  const SpatialGrid& grid() const { return *grid_; }
  const std::shared_ptr<const SpatialGrid>& grid_ptr() const { return grid_; }
  int intervals() const { return grid_->intervals(); }
  double width() const { return grid_->width(); }

  double& operator[](std::size_t j) { return v_[j]; }
  double operator[](std::size_t j) const { return v_[j]; }
  std::span<double> values() { return v_; }
  std::span<const double> values() const { return v_; }
  std::size_t size() const noexcept { return v_.size(); }

  bool in_solution_space() const {
    return v_.front() == 0.0 && v_.back() == 0.0;
  }

  GridFunction& operator+=(const GridFunction& o) {
    require_same_grid(o);
    for (std::size_t j = 0; j < v_.size(); ++j) v_[j] += o.v_[j];
    return *this;
  }
  GridFunction& operator-=(const GridFunction& o) {
    require_same_grid(o);
    for (std::size_t j = 0; j < v_.size(); ++j) v_[j] -= o.v_[j];
    return *this;
  }
  GridFunction& operator*=(double c) {
    for (double& x : v_) x *= c;
    return *this;
  }
  /// this += c * o
  GridFunction& add_scaled(double c, const GridFunction& o) {
    require_same_grid(o);
    for (std::size_t j = 0; j < v_.size(); ++j) v_[j] += c * o.v_[j];
    return *this;
  }

  friend GridFunction operator+(GridFunction a, const GridFunction& b) {
    return a += b;
  }
  friend GridFunction operator-(GridFunction a, const GridFunction& b) {
    return a -= b;
  }
  friend GridFunction operator*(double c, GridFunction a) { return a *= c; }

  void require_same_grid(const GridFunction& o) const {
    if (!grid_ || !o.grid_ ||
        (grid_ != o.grid_ && !(*grid_ == *o.grid_))) {
      throw PreconditionError("grid functions live on different grids");
    }
  }

 private:
  std::shared_ptr<const SpatialGrid> grid_;
  std::vector<double> v_;
};

/// Discrete inner product h * sum_{s=1}^{J-1} w_s v_s.
inline double inner(const GridFunction& w, const GridFunction& v) {
  w.require_same_grid(v);
  const int J = w.intervals();
  double sum = 0.0;
  for (int s = 1; s < J; ++s) sum += w[s] * v[s];
  return w.width() * sum;
}

inline double norm_l2(const GridFunction& w) { return std::sqrt(inner(w, w)); }

inline double norm_inf(const GridFunction& w) {
  double m = 0.0;
  for (double x : w.values()) m = std::max(m, std::abs(x));
  return m;
}

/// (w_{j+1} - 2 w_j + w_{j-1}) / h^2 at interior nodes.
inline GridFunction second_difference(const GridFunction& w) {
  GridFunction out(w.grid_ptr());
  const int J = w.intervals();
  const double inv_h2 = 1.0 / (w.width() * w.width());
  for (int j = 1; j < J; ++j) {
    out[j] = (w[j + 1] - 2.0 * w[j] + w[j - 1]) * inv_h2;
  }
  return out;
}

/// Galerkin-form convection: grad-average times centred difference,
/// (1/6h) [w_j (w_{j+1} - w_{j-1}) + (w_{j+1}^2 - w_{j-1}^2)].
///
/// Satisfies <N(w), w> = 0 for w in W_h.
inline GridFunction nonlinear_convection(const GridFunction& w) {
  GridFunction out(w.grid_ptr());
  const int J = w.intervals();
  const double c = 1.0 / (6.0 * w.width());
  for (int j = 1; j < J; ++j) {
    out[j] = c * (w[j - 1] + w[j] + w[j + 1]) * (w[j + 1] - w[j - 1]);
  }
  return out;
}

/// Elementary stencils used by the energy identities. Each acts on interior
/// nodes only and leaves the boundary of the result at zero.
namespace stencil {

/// Delta w_j = w_{j+1} - w_{j-1}
inline GridFunction centered(const GridFunction& w) {
  GridFunction out(w.grid_ptr());
  for (int j = 1; j < w.intervals(); ++j) out[j] = w[j + 1] - w[j - 1];
  return out;
}

/// Delta_+ w_j = w_{j+1} - w_j
inline GridFunction forward(const GridFunction& w) {
  GridFunction out(w.grid_ptr());
  for (int j = 1; j < w.intervals(); ++j) out[j] = w[j + 1] - w[j];
  return out;
}

/// Delta_- w_j = w_j - w_{j-1}
inline GridFunction backward(const GridFunction& w) {
  GridFunction out(w.grid_ptr());
  for (int j = 1; j < w.intervals(); ++j) out[j] = w[j] - w[j - 1];
  return out;
}

/// T_+ w_j = w_{j+1}
inline GridFunction shift_plus(const GridFunction& w) {
  GridFunction out(w.grid_ptr());
  for (int j = 1; j < w.intervals(); ++j) out[j] = w[j + 1];
  return out;
}

/// T_- w_j = w_{j-1}
inline GridFunction shift_minus(const GridFunction& w) {
  GridFunction out(w.grid_ptr());
  for (int j = 1; j < w.intervals(); ++j) out[j] = w[j - 1];
  return out;
}

/// Pointwise product over all nodes.
inline GridFunction product(const GridFunction& w, const GridFunction& v) {
  w.require_same_grid(v);
  GridFunction out(w.grid_ptr());
  for (std::size_t j = 0; j < w.size(); ++j) out[j] = w[j] * v[j];
  return out;
}

/// Staggered difference (w_s - w_{s-1}) / h for s = 1..J.
inline std::vector<double> staggered(const GridFunction& w) {
  std::vector<double> d(static_cast<std::size_t>(w.intervals()));
  const double inv_h = 1.0 / w.width();
  for (int s = 1; s <= w.intervals(); ++s) d[s - 1] = (w[s] - w[s - 1]) * inv_h;
  return d;
}

}  // namespace stencil
}  // namespace pide
