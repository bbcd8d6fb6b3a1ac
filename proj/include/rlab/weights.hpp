#pragma once

#include <iosfwd>
#include <memory>
#include <vector>

#include "rlab/grid.hpp"

namespace rlab {

/// A weight on R^n: the power |x|^lambda, or positive samples on a grid.
struct Weight {
  enum class Kind { power, sampled };

  Kind kind = Kind::power;
  int dim = 2;
  double lambda = 0.0;
  std::shared_ptr<const GridFunction> samples;

  static Weight power(int dim, double lambda);
  static Weight sampled(GridFunction values);

  /// w^e as a weight of the same kind.
  Weight pow(double e) const;
  double operator()(const Point& x) const;
};

/// Integrals of w^mu over each cell of a grid. Power weights are integrated
/// exactly on cells touching the origin (divergence theorem), by an 8-point
/// Gauss-Legendre product within three cells of it and a 2-point product
/// elsewhere; a cell touching the origin with mu <= -n gets +inf. Sampled
/// weights must live on the same grid.
Values weight_cell_integrals(const Weight& w, double mu, const Box& box, int resolution);

/// Test cubes for the weight constants. The weight lives on [-1, 1)^n with
/// `resolution` cells per axis. Octave j uses cubes of side
/// first_cells * 2^j * h: the cube centred at the origin and, if `dyadic`
/// is set, every shifted dyadic cube of that side lying inside the box.
struct CubeSweep {
  int resolution = 512;
  int octaves = 6;
  int first_cells = 4;
  bool dyadic = true;
};

/// Per-octave record of a weight constant.
struct SweepResult {
  double constant = 0.0;             // sup over all test cubes
  std::vector<double> origin;        // value on the origin-centred cube
  std::vector<double> dyadic;        // sup over the dyadic cubes of the octave
  // Averages of each power of w on the origin cubes, divided by
  // (side/2)^{lambda mu} for power weights.
  std::vector<std::vector<double>> factors;
  // Growth-trend verdict: the constant is finite and the origin sequence,
  // raised to the largest of the exponents' reciprocals, does not grow.
  bool finite = true;
};

/// Divergence detector for a per-octave sequence: true if some entry is
/// infinite or the last increments are positive and decay slower than
/// kGrowthRatio per octave.
inline constexpr double kGrowthRatio = 0.96;
bool grows(const std::vector<double>& seq);

/// sup over the sweep of (mean_Q w^q)^{1/q} (mean_Q w^{-p'})^{1/p'}, p > 1.
SweepResult apq_constant(const Weight& w, double p, double q, const CubeSweep& sweep = {});

/// Muckenhoupt constant sup (mean_Q v)(mean_Q v^{-1/(r-1)})^{r-1}, r > 1.
SweepResult ap_constant(const Weight& v, double r, const CubeSweep& sweep = {});

/// Endpoint condition sup (mean_Q w^q) / inf_Q w^q over the sweep.
SweepResult a1_constant(const Weight& w, double q, const CubeSweep& sweep = {});

/// The rescaled endpoint (w^s in A_{1,q/s}): a1_constant of w with exponent q.
SweepResult a1_s_constant(const Weight& w, double s, double q, const CubeSweep& sweep = {});

/// (integral of |f|^p w)^{1/p}, or with `weak` the quasi-norm
/// sup_t t w({|f| > t})^{1/p}, exact for the cell-constant model. The
/// weight's cell masses come from weight_cell_integrals on f's grid.
double weighted_norm(const GridFunction& f, const Weight& w, double p, bool weak = false);

/// Both sides of w in A_{p,q} <=> w^q in A_{1+q/p'} over one sweep.
struct RescalingCheck {
  SweepResult apq;
  SweepResult ap;
  double relative_gap = 0.0;  // | [w^q]_{A_r} - [w]_{A_{p,q}}^q | / [w^q]_{A_r}
  bool finiteness_agrees = true;
  bool pass = true;
};
RescalingCheck rescaling_check(const Weight& w, double p, double q, const CubeSweep& sweep = {});

/// Classification of power weights over a lambda grid against the window
/// -n/q < lambda < n/s - n/p (s = 1 gives A_{p,q}), testing w^s in
/// A_{p/s, q/s}.
struct WindowEntry {
  double lambda = 0.0;
  bool expected = false;
  bool classified = false;
  SweepResult sweep;
};

struct WindowSweep {
  int dim = 2;
  double p = 2.0;
  double q = 2.0;
  double s = 1.0;
  double lower = 0.0;  // analytic window
  double upper = 0.0;
  std::vector<WindowEntry> entries;

  long misclassified() const;
};

/// Lambda from lower - margin to upper + margin in steps of `step`, aligned
/// to multiples of the step.
WindowSweep sweep_window(int dim, double p, double q, double s, double step = 0.125,
                         double margin = 0.5, const CubeSweep& sweep = {});

/// Columns lambda, p, q, s, expected, classified, then the origin-cube value
/// for every octave.
void write_window_csv(std::ostream& out, const std::vector<WindowSweep>& sweeps);

}  // namespace rlab
