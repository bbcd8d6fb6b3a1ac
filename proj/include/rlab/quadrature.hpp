#pragma once

#include <utility>

#include "rlab/types.hpp"

namespace rlab {

/// Gauss-Legendre nodes and weights on [-1, 1], by Newton iteration on the
/// three-term recurrence.
inline std::pair<Values, Values> gauss_legendre(int count) {
  Values x(count), w(count);
  for (int i = 0; i < count; ++i) {
    double z = std::cos(kPi * (i + 0.75) / (count + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = 0.0;
      for (int j = 1; j <= count; ++j) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j - 1.0) * z * p1 - (j - 1.0) * p2) / j;
      }
      dp = count * (z * p0 - p1) / (z * z - 1.0);
      const double step = p0 / dp;
      z -= step;
      if (std::abs(step) < 1e-16) break;
    }
    x[i] = -z;
    w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
  }
  return {x, w};
}

/// Gauss-Legendre rule mapped to [a, b].
inline std::pair<Values, Values> gauss_legendre(int count, double a, double b) {
  auto [x, w] = gauss_legendre(count);
  return {0.5 * (b - a) * x + 0.5 * (b + a), 0.5 * (b - a) * w};
}

}  // namespace rlab
