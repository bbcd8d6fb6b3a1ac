#pragma once

#include <array>
#include <vector>

#include "rlab/grid.hpp"

namespace rlab {

/// Shift numerators: component i stands for t_i = shift[i] / 3 with
/// shift[i] in {0, 1}. Unused trailing components are zero.
using Shift = std::array<int, 3>;
using Index3 = std::array<long long, 3>;

/// All 2^n shifts in lexicographic order.
std::vector<Shift> all_shifts(int dim);

/// The cube 2^k([0,1)^n + m + (-1)^k t). The corner is formed exactly and
/// rounded once to double.
Cube dyadic_cube(const Shift& t, int level, const Index3& m, int dim);
Cube dyadic_cube(const DyadicTag& tag, int dim);

/// Index m along one axis of the level-k cube of grid t containing x.
/// Exact, including points that sit on a face.
long long locate_axis(double x, int level, int t);

/// The unique cube of level k in grid t containing x.
Cube locate(const Point& x, int level, const Shift& t);

/// Q contained in the dyadic cube `outer`, decided in rational arithmetic
/// from outer's tag and the exact binary values of Q's corner and side.
bool contains_exact(const DyadicTag& outer, const Cube& q);
/// Containment between two tagged cubes, both taken exactly.
bool contains_exact(const DyadicTag& outer, const DyadicTag& inner, int dim);

struct ShiftedCube {
  Shift shift{};
  Cube cube;
};

/// Smallest dyadic cube from the 2^n shifted grids containing Q with
/// sidelength in (l(Q), 6 l(Q)]; ties broken by shift, then index.
/// Throws std::logic_error if none exists.
ShiftedCube third_trick(const Cube& q);

/// For Q with sidelength exactly 2^k: a cube of level k + 3 from one of the
/// shifted grids containing Q. Throws std::invalid_argument if the side is
/// not a power of two.
ShiftedCube third_trick_level(const Cube& q);

/// Levels visited by multi-scale sums over a grid function's box: from the
/// cell size up to four times the box side.
struct LevelRange {
  int k_min = 0;
  int k_max = 0;
};
LevelRange level_range(const Box& box, int resolution);

/// Integrals of |f|^s over the level-k cubes of grid t meeting the box, with
/// f piecewise constant on cells and zero outside the box. Cube overlaps
/// with cells are resolved per axis, so one table costs O(N 2^n).
class LevelTable {
 public:
  LevelTable(const GridFunction& f, int level, const Shift& t, double s = 1.0);
  /// The table one level up, summing the children's integrals.
  LevelTable parent_level() const;

  int dim() const { return dim_; }
  int level() const { return level_; }
  const Shift& shift() const { return shift_; }
  double side() const { return side_; }
  double cube_volume() const { return std::pow(side_, dim_); }
  double power() const { return s_; }

  Eigen::Index cube_count() const { return integrals_.size(); }
  const std::array<long long, 3>& count() const { return count_; }
  const Index3& first() const { return first_; }
  const Values& integrals() const { return integrals_; }

  /// (mean of |f|^s over the cube)^{1/s}
  double average(Eigen::Index cube) const;
  Values averages() const;

  Index3 index(Eigen::Index cube) const;
  /// Local cube number for integer index m, or -1 if m is not in the table.
  Eigen::Index local(const Index3& m) const;
  DyadicTag tag(Eigen::Index cube) const;
  Cube cube(Eigen::Index cube) const;

  /// Local number of the cube containing the centre of each cell.
  Eigen::Index cube_of_cell(Eigen::Index cell) const;
  /// Per-cube values pulled back to cells through their centres.
  Values gather(const Values& per_cube) const;

 private:
  int dim_;
  int level_;
  Shift shift_;
  double side_;
  double s_;
  int resolution_;
  Index3 first_{0, 0, 0};
  std::array<long long, 3> count_{1, 1, 1};
  std::array<std::vector<int>, 3> center_cube_;
  Box box_;
  Values integrals_;

  struct Coarsen {};
  LevelTable(const LevelTable& child, Coarsen);
  void index_axes();
};

}  // namespace rlab
