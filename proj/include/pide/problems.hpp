#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <memory>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include "pide/errors.hpp"
#include "pide/grid_function.hpp"
#include "pide/mesh.hpp"
#include "pide/special_functions.hpp"

namespace pide {

enum class ProfileKind {
  sin_pi,           // sin(pi x)
  sin_2pi,          // sin(2 pi x)
  cos_pi_sin_pi,    // cos(pi x) sin(pi x)
  sin_pi_cos_2pi,   // sin(pi x) cos(2 pi x)
  cos_pi_sin_2pi,   // cos(pi x) sin(2 pi x)
  sin_2pi_cos_2pi,  // sin(2 pi x) cos(2 pi x)
  custom,
};

/// A spatial factor g(x) of a separable field.
class SpatialProfile {
 public:
  explicit SpatialProfile(ProfileKind kind) : kind_(kind) {
    if (kind == ProfileKind::custom) {
      throw PreconditionError("custom profiles need a callable");
    }
  }

  /// User-supplied profile, sampled at grid nodes.
  static SpatialProfile custom(std::string name, std::function<double(double)> g) {
    SpatialProfile p;
    p.kind_ = ProfileKind::custom;
    p.name_ = std::move(name);
    p.fn_ = std::move(g);
    return p;
  }

  ProfileKind kind() const noexcept { return kind_; }

  double operator()(double x) const {
    constexpr double pi = std::numbers::pi;
    switch (kind_) {
      case ProfileKind::sin_pi: return std::sin(pi * x);
      case ProfileKind::sin_2pi: return std::sin(2 * pi * x);
      case ProfileKind::cos_pi_sin_pi: return std::cos(pi * x) * std::sin(pi * x);
      case ProfileKind::sin_pi_cos_2pi: return std::sin(pi * x) * std::cos(2 * pi * x);
      case ProfileKind::cos_pi_sin_2pi: return std::cos(pi * x) * std::sin(2 * pi * x);
      case ProfileKind::sin_2pi_cos_2pi: return std::sin(2 * pi * x) * std::cos(2 * pi * x);
      case ProfileKind::custom: return fn_(x);
    }
    return 0.0;
  }

  std::string name() const {
    switch (kind_) {
      case ProfileKind::sin_pi: return "sin(pi x)";
      case ProfileKind::sin_2pi: return "sin(2 pi x)";
      case ProfileKind::cos_pi_sin_pi: return "cos(pi x) sin(pi x)";
      case ProfileKind::sin_pi_cos_2pi: return "sin(pi x) cos(2 pi x)";
      case ProfileKind::cos_pi_sin_2pi: return "cos(pi x) sin(2 pi x)";
      case ProfileKind::sin_2pi_cos_2pi: return "sin(2 pi x) cos(2 pi x)";
      case ProfileKind::custom: return name_;
    }
    return {};
  }

 private:
  SpatialProfile() = default;

  ProfileKind kind_ = ProfileKind::custom;
  std::string name_;
  std::function<double(double)> fn_;
};

struct SeparableTerm {
  SpatialProfile profile;
  double exponent;
  double coefficient;
};

/// f(x, t) = sum_i c_i g_i(x) t^{p_i}, every p_i > -1.
///
/// The same representation carries the exact solutions. Keeping the time
/// dependence symbolic makes interval averages exact even for t^{p}, p < 0.
class SeparableField {
 public:
  SeparableField() = default;
  explicit SeparableField(std::vector<SeparableTerm> terms) : terms_(std::move(terms)) {
    for (const auto& term : terms_) {
      if (!(term.exponent > -1.0)) {
        throw DomainError("separable term exponent must exceed -1");
      }
    }
  }

  const std::vector<SeparableTerm>& terms() const noexcept { return terms_; }

  double min_exponent() const {
    double m = INFINITY;
    for (const auto& term : terms_) m = std::min(m, term.exponent);
    return m;
  }

  double operator()(double x, double t) const {
    double sum = 0.0;
    for (const auto& term : terms_) {
      sum += term.coefficient * term.profile(x) * std::pow(t, term.exponent);
    }
    return sum;
  }

  /// Point values at interior nodes for time t.
  GridFunction sample(const std::shared_ptr<const SpatialGrid>& grid, double t) const {
    return accumulate(grid, [&](const SeparableTerm& term) {
      return std::pow(t, term.exponent);
    });
  }

  /// Exact mean over [a, b]: sum_i c_i g_i(x) (b^{p+1} - a^{p+1}) / ((p+1)(b-a)).
  GridFunction interval_average(const std::shared_ptr<const SpatialGrid>& grid,
                                double a, double b) const {
    if (!(b > a) || a < 0.0) {
      throw DomainError("interval average needs 0 <= a < b");
    }
    return accumulate(grid, [&](const SeparableTerm& term) {
      const double q = term.exponent + 1.0;
      return (std::pow(b, q) - std::pow(a, q)) / (q * (b - a));
    });
  }

 private:
  template <class TimeFactor>
  GridFunction accumulate(const std::shared_ptr<const SpatialGrid>& grid,
                          TimeFactor&& time_factor) const {
    GridFunction out(grid);
    const int J = grid->intervals();
    for (const auto& term : terms_) {
      const double c = term.coefficient * time_factor(term);
      if (c == 0.0) continue;
      for (int j = 1; j < J; ++j) out[j] += c * term.profile(grid->node(j));
    }
    return out;
  }

  std::vector<SeparableTerm> terms_;
};

/// How f^{n-1/2} is formed from f on [t_{n-1}, t_n].
enum class ForcingMode {
  midpoint,          // f(., t_{n-1/2})
  endpoint_average,  // (f(., t_{n-1}) + f(., t_n)) / 2
  interval_average,  // exact mean over the interval
};

inline std::string to_string(ForcingMode mode) {
  switch (mode) {
    case ForcingMode::midpoint: return "midpoint";
    case ForcingMode::endpoint_average: return "endpoint-average";
    case ForcingMode::interval_average: return "interval-average";
  }
  return {};
}

inline ForcingMode parse_forcing_mode(const std::string& s) {
  if (s == "midpoint") return ForcingMode::midpoint;
  if (s == "endpoint-average" || s == "endpoint_average") {
    return ForcingMode::endpoint_average;
  }
  if (s == "interval-average" || s == "interval_average") {
    return ForcingMode::interval_average;
  }
  throw DomainError("unknown forcing mode '" + s + "'");
}

inline GridFunction f_half(const SeparableField& forcing, const TemporalMesh& mesh,
                           int n, ForcingMode mode,
                           const std::shared_ptr<const SpatialGrid>& grid) {
  if (n < 1 || n > mesh.steps()) {
    throw PreconditionError("f_half: step index out of range");
  }
  const double a = mesh.time(n - 1);
  const double b = mesh.time(n);
  switch (mode) {
    case ForcingMode::midpoint:
      return forcing.sample(grid, mesh.midpoint(n));
    case ForcingMode::endpoint_average: {
      if (a == 0.0 && forcing.min_exponent() < 0.0) {
        throw DomainError(
            "endpoint-average forcing is undefined at t = 0 for terms t^p with p < 0; "
            "use interval-average");
      }
      GridFunction out = forcing.sample(grid, a);
      out += forcing.sample(grid, b);
      return out *= 0.5;
    }
    case ForcingMode::interval_average:
      return forcing.interval_average(grid, a, b);
  }
  return GridFunction(grid);
}

/// Exact solution, initial data and forcing of a manufactured test case.
struct ManufacturedProblem {
  std::string name;
  double alpha = 0.5;
  SeparableField exact;
  SeparableField forcing;
  /// Regularity index when f^{n-1/2} is a point rule (midpoint or endpoint average).
  double sigma_pointwise = 1.0;
  /// Regularity index when f^{n-1/2} is the exact interval average.
  double sigma_interval = 1.0;

  double sigma(ForcingMode mode) const {
    return mode == ForcingMode::interval_average ? sigma_interval : sigma_pointwise;
  }

  GridFunction initial(const std::shared_ptr<const SpatialGrid>& grid) const {
    return exact.sample(grid, 0.0);
  }

  GridFunction exact_at(const std::shared_ptr<const SpatialGrid>& grid, double t) const {
    return exact.sample(grid, t);
  }
};

namespace detail {
inline void require_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw DomainError("alpha must lie in (0, 1), got " + std::to_string(alpha));
  }
}
}  // namespace detail

/// u = sin(pi x) - t^{alpha+1} / Gamma(alpha+2) sin(2 pi x).
inline ManufacturedProblem example1(double alpha) {
  detail::require_alpha(alpha);
  constexpr double pi = std::numbers::pi;
  const double a = 1.0 / gamma(alpha + 2.0);
  const double g1 = gamma(alpha + 1.0);
  const double g22 = gamma(2.0 * alpha + 2.0);
  using K = ProfileKind;

  ManufacturedProblem p;
  p.name = "example1";
  p.alpha = alpha;
  p.exact = SeparableField({
      {SpatialProfile(K::sin_pi), 0.0, 1.0},
      {SpatialProfile(K::sin_2pi), alpha + 1.0, -a},
  });
  // u_t - I^alpha u_xx, then u u_x expanded term by term.
  p.forcing = SeparableField({
      {SpatialProfile(K::sin_pi), alpha, pi * pi / g1},
      {SpatialProfile(K::sin_2pi), 2.0 * alpha + 1.0, -4.0 * pi * pi / g22},
      {SpatialProfile(K::sin_2pi), alpha, -1.0 / g1},
      {SpatialProfile(K::cos_pi_sin_pi), 0.0, pi},
      {SpatialProfile(K::sin_pi_cos_2pi), alpha + 1.0, -2.0 * pi * a},
      {SpatialProfile(K::cos_pi_sin_2pi), alpha + 1.0, -pi * a},
      {SpatialProfile(K::sin_2pi_cos_2pi), 2.0 * alpha + 2.0, 2.0 * pi * a * a},
  });
  p.sigma_pointwise = alpha + 1.0;
  p.sigma_interval = alpha + 2.0;
  return p;
}

/// u = t^alpha / Gamma(alpha+1) sin(pi x); u_0 = 0 and f ~ t^{alpha-1} near 0.
inline ManufacturedProblem example2(double alpha) {
  detail::require_alpha(alpha);
  constexpr double pi = std::numbers::pi;
  const double g1 = gamma(alpha + 1.0);
  using K = ProfileKind;

  ManufacturedProblem p;
  p.name = "example2";
  p.alpha = alpha;
  p.exact = SeparableField({{SpatialProfile(K::sin_pi), alpha, 1.0 / g1}});
  p.forcing = SeparableField({
      {SpatialProfile(K::sin_pi), 2.0 * alpha, pi * pi / gamma(2.0 * alpha + 1.0)},
      {SpatialProfile(K::sin_pi), alpha - 1.0, 1.0 / gamma(alpha)},
      {SpatialProfile(K::sin_2pi), 2.0 * alpha, pi / (2.0 * g1 * g1)},
  });
  // A point rule sees t f' ~ t^{alpha-1}; only the interval average lifts this.
  p.sigma_pointwise = alpha;
  p.sigma_interval = alpha + 1.0;
  return p;
}

/// u = 0 with f = 0.
inline ManufacturedProblem zero_problem(double alpha) {
  detail::require_alpha(alpha);
  ManufacturedProblem p;
  p.name = "zero";
  p.alpha = alpha;
  p.sigma_pointwise = p.sigma_interval = 2.0;
  return p;
}

inline ManufacturedProblem make_problem(const std::string& name, double alpha) {
  if (name == "zero") return zero_problem(alpha);
  if (name == "example1" || name == "1") return example1(alpha);
  if (name == "example2" || name == "2") return example2(alpha);
  throw DomainError("unknown problem '" + name + "'");
}

}  // namespace pide
