#pragma once

#include <map>
#include <vector>

#include "rlab/grid.hpp"
#include "rlab/sphere.hpp"

namespace rlab {

/// Values of an operator at a set of cells (their centres), with the
/// radius that attained each sup and an a priori quadrature error bound.
struct PointValues {
  std::vector<Eigen::Index> cells;
  Values values;
  Values argmax_radius;
  double error_bound = 0.0;
};

/// Every cell, or every stride-th cell along each axis (offset stride/2).
std::vector<Eigen::Index> all_cells(const GridFunction& f);
std::vector<Eigen::Index> cell_lattice(const GridFunction& f, int stride);

/// Sphere directions merged into bins for a given radius. signed_w sums
/// w_j Omega_j, abs_w sums w_j |Omega_j|, plain_w sums w_j over each bin;
/// half_width bounds the angle between a bin's direction and its members.
struct AngularRule {
  Eigen::MatrixXd dirs;
  Values signed_w;
  Values abs_w;
  Values plain_w;
  double half_width = 0.0;
};

/// Polar quadrature around a point. Shell 0 is the ball of radius h and
/// shell j >= 1 the annulus (2^{j-1} h, 2^j h]; each carries Gauss-Legendre
/// radial nodes. Directions are binned so that neighbouring samples on a
/// circle of radius r sit about h/2 apart, never finer than the symbol mesh.
class PolarSampler {
 public:
  /// max_bins caps the directions per radius (0: 256 on S^1, 2048 on S^2);
  /// the symbol mesh is the hard limit.
  PolarSampler(const SphereSymbol& omega, double h, int radial_nodes = 4, int max_bins = 0);

  double h() const { return h_; }
  int dim() const { return omega_.dim; }
  const SphereSymbol& symbol() const { return omega_; }
  /// Radial nodes and weights on shell j.
  const std::pair<Values, Values>& shell(int j) const { return shells_.at(j); }
  double shell_outer(int j) const { return j == 0 ? h_ : std::ldexp(h_, j); }
  /// Angular rule for samples at radius r.
  const AngularRule& rule(double r) const;
  /// Shells needed so that the last one reaches past every point of the box
  /// seen from x.
  int shells_for(const GridFunction& f, const Point& x) const;

 private:
  SphereSymbol omega_;
  double h_;
  std::vector<std::pair<Values, Values>> shells_;
  mutable std::map<int, AngularRule> rules_;
};

enum class Cancellation { ball_average, center_value };

/// T_{Omega,alpha} f by the annular rewriting: on each annulus the ball
/// average over B(x, 2^j h) (or f(x)) is subtracted before integrating
/// against Omega(y') |y|^{alpha-1-n}. The ball |y| < h enters through the
/// linear Taylor term; its remainder ||Omega||_1 |D^2 f| h^{alpha+1} / (2(alpha+1))
/// goes into error_bound together with the angular binning bound.
PointValues rough_singular(const GridFunction& f, const SphereSymbol& omega, double alpha,
                           const std::vector<Eigen::Index>& cells,
                           Cancellation mode = Cancellation::ball_average);

/// D^{1-alpha} f(x) = integral of |f(y) - f(x)| / |x - y|^{n+1-alpha}, 0 < alpha < 1,
/// with the tail beyond the box added in closed form.
PointValues nonlinear_frac_derivative(const GridFunction& f, double alpha,
                                      const std::vector<Eigen::Index>& cells);

/// Radii used by the ball maximal operators: 2^j h for j = 0 .. J.
struct MaximalSample {
  double radius;
  double rough;     // t^{alpha-1} mean over B_t of |Omega(y')| |f(x - y)|
  double natural;   // t^{alpha-1} |mean over B_t of Omega(y') f(x - y)|
  double sharp;     // t^{alpha-1} mean over B_t of |Omega(y')| |f(x - y) - f_B|
  double plain;     // t^{alpha-1} mean over B_t of |f(x - y)|
};

/// All ball quantities at one point, for each dyadic radius.
std::vector<MaximalSample> ball_maximal_profile(const PolarSampler& sampler, const GridFunction& f,
                                                const Point& x, double alpha);

/// Error band of the ball quantities of ball_maximal_profile from merging
/// directions into bins, uniform over points and radii.
double binning_bound(const PolarSampler& sampler, const GridFunction& f, double alpha);

/// M_{Omega,alpha}, alpha >= 1: sup over dyadic radii.
PointValues rough_maximal(const GridFunction& f, const SphereSymbol& omega, double alpha,
                          const std::vector<Eigen::Index>& cells);
/// Natural maximal operator; Omega must have mean zero.
PointValues natural_rough_maximal(const GridFunction& f, const SphereSymbol& omega, double alpha,
                                  const std::vector<Eigen::Index>& cells);
/// Sharp maximal operator with the ball average subtracted.
PointValues sharp_rough_maximal(const GridFunction& f, const SphereSymbol& omega, double alpha,
                                const std::vector<Eigen::Index>& cells);
/// Ball fractional maximal operator M_beta f = sup_t t^beta mean over B(x,t) of |f|.
PointValues ball_fractional_maximal(const GridFunction& f, double beta,
                                    const std::vector<Eigen::Index>& cells);

/// sup_r r^beta (mean of |f| over the sphere of radius r about x), radii
/// 2^{i/8} h, 0 <= beta < n - 1.
PointValues spherical_maximal(const GridFunction& f, double beta,
                              const std::vector<Eigen::Index>& cells);

/// sup of |grad f| over the grid.
double lipschitz_bound(const GridFunction& f);
/// Bound on the operator norm of the Hessian from differences of the
/// gradient components.
double hessian_bound(const GridFunction& f);

}  // namespace rlab
