#pragma once

#include <array>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "rlab/types.hpp"

namespace rlab {

class Expression;

/// Axis-aligned computational cube [lower, lower + side)^n.
struct Box {
  Point lower;
  double side = 1.0;

  Box() = default;
  Box(Point lower_corner, double side_length);

  int dim() const { return static_cast<int>(lower.size()); }
  double volume() const { return std::pow(side, dim()); }
};

/// Coordinates of a cube in the shifted dyadic system: shift numerators
/// t_i in {0, 1} stand for t_i / 3, level k gives sidelength 2^k, and m is
/// the integer translate.
struct DyadicTag {
  std::array<int, 3> shift{0, 0, 0};
  int level = 0;
  std::array<long long, 3> index{0, 0, 0};

  bool operator==(const DyadicTag&) const = default;
};

/// Half-open cube [lower, lower + side)^n.
struct Cube {
  Point lower;
  double side = 1.0;
  std::optional<DyadicTag> tag;

  int dim() const { return static_cast<int>(lower.size()); }
  double volume() const { return std::pow(side, dim()); }
  bool contains(const Point& x) const;
  Point center() const { return lower.array() + 0.5 * side; }
};

/// A real function sampled at the cell centres of a uniform grid over a Box.
/// Cell i covers [lower + i h, lower + (i+1) h) per axis; the function is
/// taken to be zero outside the box. Flat storage has axis 0 fastest.
class GridFunction {
 public:
  GridFunction() = default;
  GridFunction(Box box, int resolution, Values values, std::string corpus_id = {},
               std::shared_ptr<const Expression> source = nullptr,
               bool enforce_margin = false);

  static GridFunction zeros_like(const GridFunction& f);

  const Box& box() const { return box_; }
  int dim() const { return box_.dim(); }
  int resolution() const { return resolution_; }
  double spacing() const { return box_.side / resolution_; }
  double cell_volume() const { return std::pow(spacing(), dim()); }
  Eigen::Index size() const { return values_.size(); }
  const Values& values() const { return values_; }
  double operator[](Eigen::Index i) const { return values_[i]; }
  const std::string& corpus_id() const { return corpus_id_; }
  const std::shared_ptr<const Expression>& source() const { return source_; }
  bool has_analytic_gradient() const;

  Eigen::Index flat_index(int i0, int i1, int i2 = 0) const {
    return i0 + static_cast<Eigen::Index>(resolution_) *
                    (i1 + static_cast<Eigen::Index>(resolution_) * i2);
  }
  std::array<int, 3> multi_index(Eigen::Index flat) const;
  Point center(Eigen::Index flat) const;
  std::vector<Point> centers() const;

  /// Multilinear interpolation between cell centres; zero beyond the box.
  double interpolate(const Point& x) const;
  /// Fast 2-d path of interpolate() used inside quadrature loops.
  double interpolate2(double x0, double x1) const;
  double interpolate3(double x0, double x1, double x2) const;

  /// The cell containing x, or -1 outside the box.
  Eigen::Index cell_of(const Point& x) const;

  GridFunction with_values(Values v) const;

 private:
  Box box_;
  int resolution_ = 0;
  Values values_;
  std::string corpus_id_;
  std::shared_ptr<const Expression> source_;
};

/// Gradient components and their Euclidean magnitude.
struct VectorField {
  std::vector<GridFunction> components;
  GridFunction magnitude() const;
};

/// Second-order central differences (one-sided on the boundary layer). When
/// the grid function came from a corpus expression with a closed-form
/// gradient and prefer_analytic is set, that gradient is sampled instead.
VectorField gradient(const GridFunction& f, bool prefer_analytic = true);

/// Values with the measure they occupy inside some region; measures sum to
/// the region's volume (a zero-valued entry accounts for the part of the
/// region outside the box).
struct MeasuredSamples {
  std::vector<double> values;
  std::vector<double> measures;

  double total_measure() const;
  void add(double value, double measure) {
    values.push_back(value);
    measures.push_back(measure);
  }
};

/// Lengths of overlap between [a, b) and the cells of one axis.
struct AxisOverlap {
  int first = 0;
  std::vector<double> lengths;
};
AxisOverlap axis_overlap(const Box& box, int resolution, int axis, double a, double b);

/// f restricted to Q as a piecewise-constant function on cells.
MeasuredSamples cube_samples(const GridFunction& f, const Cube& q);

/// (mean over Q of |f|^s)^{1/s} with f piecewise constant on cells and zero
/// outside the box. A cube inside a single cell returns that cell's |value|.
double cell_average(const GridFunction& f, const Cube& q, double s = 1.0);

/// Mean of |f|^s over the lattice points in B(x, t), counting lattice points
/// outside the box as zeros; raised to 1/s. Balls too small to hold a lattice
/// point resolve to the containing cell.
double ball_average(const GridFunction& f, const Point& x, double t, double s = 1.0);

/// Signed mean of f over the lattice points in B(x, t).
double ball_mean(const GridFunction& f, const Point& x, double t);

/// Lattice samples in B(x, t), each with measure h^n; total measure is the
/// lattice count times h^n.
MeasuredSamples ball_samples(const GridFunction& f, const Point& x, double t);

/// Binary form: 8-byte little-endian header length, a JSON header
/// {box, resolution, n, corpus_id}, then resolution^n little-endian doubles.
void write_grid_function(std::ostream& out, const GridFunction& f);
GridFunction read_grid_function(std::istream& in);

}  // namespace rlab
