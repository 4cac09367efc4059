#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "pide/errors.hpp"
#include "pide/grid_function.hpp"
#include "pide/mesh.hpp"
#include "pide/special_functions.hpp"

namespace pide {

/// Product-integration weights for the Abel kernel t^{alpha-1} / Gamma(alpha).
///
/// w(n, s) is the kernel integrated over [t_{n-1}, t_n] x [t_{s-1}, min(t, t_s)]
/// and divided by k_n k_s, for 1 <= s <= n <= N. Stored packed, row by row.
class PIWeights {
 public:
  PIWeights(const TemporalMesh& mesh, double alpha)
      : mesh_(mesh), alpha_(alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) {
      throw DomainError("PI weights: alpha must lie in (0, 1), got " +
                        std::to_string(alpha));
    }
    const int N = mesh_.steps();
    w_.resize(static_cast<std::size_t>(N) * (N + 1) / 2);
    const double g2 = gamma(alpha + 2.0);
    const double p = alpha + 1.0;
    const auto& t = mesh_.times();
    for (int n = 1; n <= N; ++n) {
      const double kn = mesh_.step(n);
      for (int s = 1; s < n; ++s) {
        const double ks = mesh_.step(s);
        const double upper = std::pow(t[n] - t[s - 1], p) - std::pow(t[n] - t[s], p);
        const double lower =
            std::pow(t[n - 1] - t[s - 1], p) - std::pow(t[n - 1] - t[s], p);
        w_[index(n, s)] = (upper - lower) / (kn * ks * g2);
      }
      w_[index(n, n)] = std::pow(kn, alpha - 1.0) / g2;
    }
  }

  double alpha() const noexcept { return alpha_; }
  int steps() const noexcept { return mesh_.steps(); }
  const TemporalMesh& mesh() const noexcept { return mesh_; }

  double operator()(int n, int s) const {
    if (s < 1 || s > n || n > steps()) {
      throw PreconditionError("PI weight index out of range");
    }
    return w_[index(n, s)];
  }

 private:
  static std::size_t index(int n, int s) {
    return static_cast<std::size_t>(n) * (n - 1) / 2 + (s - 1);
  }

  TemporalMesh mesh_;
  double alpha_;
  std::vector<double> w_;
};

inline PIWeights compute_weights(const TemporalMesh& mesh, double alpha) {
  return PIWeights(mesh, alpha);
}

/// Memory sum without its diagonal term:
///   w(n,1) k_1 first + sum_{s=2}^{1+|halves|} w(n,s) k_s halves[s-2].
///
/// `halves` may hold at most n-1 entries; the scheme passes n-2 of them and
/// treats the s = n contribution implicitly.
inline GridFunction partial_history_sum(const PIWeights& weights, int n,
                                        const GridFunction& first_value,
                                        std::span<const GridFunction> halves) {
  if (n < 1 || n > weights.steps()) {
    throw PreconditionError("history sum: step index out of range");
  }
  if (halves.size() > static_cast<std::size_t>(n - 1)) {
    throw PreconditionError("history sum: too many history entries");
  }
  const TemporalMesh& mesh = weights.mesh();
  GridFunction out = weights(n, 1) * mesh.step(1) * first_value;
  for (std::size_t i = 0; i < halves.size(); ++i) {
    const int s = static_cast<int>(i) + 2;
    out.add_scaled(weights(n, s) * mesh.step(s), halves[i]);
  }
  return out;
}

/// Discrete fractional integral at step n of a piecewise-constant history:
/// `first_value` on (t_0, t_1) and `half_values[s-2]` on (t_{s-1}, t_s) for
/// s = 2..n.
inline GridFunction history_sum(const PIWeights& weights, int n,
                                const GridFunction& first_value,
                                std::span<const GridFunction> half_values) {
  if (half_values.size() != static_cast<std::size_t>(n - 1)) {
    throw PreconditionError("history sum at step " + std::to_string(n) +
                            " needs " + std::to_string(n - 1) +
                            " half-level values, got " +
                            std::to_string(half_values.size()));
  }
  return partial_history_sum(weights, n, first_value, half_values);
}

}  // namespace pide
