#pragma once

#include <cmath>
#include <string>

#include "pide/errors.hpp"

namespace pide {

/// Euler's Gamma function for positive real arguments.
///
/// Backed by the C library's `tgamma`, which is accurate to a few ulps on the
/// range used here (the Abel kernel and manufactured solutions only need
/// arguments in (0, 4)).
inline double gamma(double q) {
  if (!(q > 0.0) || !std::isfinite(q)) {
    throw DomainError("gamma: argument must be positive and finite, got " +
                      std::to_string(q));
  }
  return std::tgamma(q);
}

}  // namespace pide
