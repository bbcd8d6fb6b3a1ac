#pragma once

#include <cmath>
#include <numbers>
#include <stdexcept>

#include <Eigen/Core>

namespace rlab {

using Point = Eigen::VectorXd;
using Values = Eigen::ArrayXd;

inline constexpr double kPi = std::numbers::pi;

/// Volume of the unit ball in R^n.
inline double unit_ball_volume(int n) {
  return std::pow(kPi, 0.5 * n) / std::tgamma(0.5 * n + 1.0);
}

/// Surface measure of S^{n-1}; equals n times the unit ball volume.
inline double sphere_area(int n) { return n * unit_ball_volume(n); }

inline void require_dimension(int n) {
  if (n != 2 && n != 3)
    throw std::invalid_argument("dimension must be 2 or 3");
}

inline bool is_power_of_two(long v) { return v > 0 && (v & (v - 1)) == 0; }

/// Hoelder conjugate exponent; p = 1 maps to infinity.
inline double conjugate(double p) {
  return p == 1.0 ? INFINITY : (std::isinf(p) ? 1.0 : p / (p - 1.0));
}

}  // namespace rlab
