#pragma once

#include "rlab/dyadic.hpp"
#include "rlab/grid.hpp"

namespace rlab {

/// Normalisation making the Riesz kernel's Fourier multiplier |xi|^{-alpha}:
/// Gamma((n - alpha)/2) / (2^alpha pi^{n/2} Gamma(alpha/2)).
double riesz_constant(int n, double alpha);

/// Integral of |y|^{alpha-n} over the cube [lower, lower + side)^n, by the
/// divergence theorem applied to y |y|^{alpha-n}, which turns the singular
/// volume integral into smooth face integrals.
double kernel_cube_integral(int n, double alpha, const Point& lower, double side);

enum class ConvolutionPath { fft, direct };

/// I_alpha f at every cell centre. The kernel is integrated exactly over
/// cells within three cells of the target (including the singular one) and
/// by the midpoint rule beyond. Both paths apply the same discrete kernel.
GridFunction riesz_potential(const GridFunction& f, double alpha,
                             ConvolutionPath path = ConvolutionPath::fft);

/// I_alpha f at an arbitrary point, with every cell's kernel integral near x
/// taken exactly.
double riesz_potential_at(const GridFunction& f, double alpha, const Point& x);

/// Sum over levels in `levels` of 2^{k alpha} (mean over Q of |f|^s)^{1/s}
/// on the cubes of grid t.
GridFunction dyadic_fractional(const GridFunction& f, double alpha, const Shift& t,
                               double s = 1.0);
GridFunction dyadic_fractional(const GridFunction& f, double alpha, const Shift& t, double s,
                               const LevelRange& levels);

/// sup over every shifted dyadic cube Q containing x (levels clamped to the
/// box range) of l(Q)^alpha (mean over Q of |f|^s)^{1/s}. Requires s < n/alpha
/// unless alpha = 0.
GridFunction fractional_maximal(const GridFunction& f, double alpha, double s = 1.0);

/// Factor relating the shifted-dyadic sup to the sup over all cubes
/// containing x: 6^{n/s}.
double dyadic_proxy_factor(int n, double alpha, double s);

/// sup over shifted dyadic cubes Q containing x of the normalised Lorentz
/// average of f on Q.
GridFunction lorentz_maximal(const GridFunction& f, double p, double q);

}  // namespace rlab
