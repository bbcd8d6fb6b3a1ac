#pragma once

#include <string>
#include <vector>

#include "json.hpp"

#include "rlab/dyadic.hpp"
#include "rlab/grid.hpp"

namespace rlab {

/// A stopping cube. It belongs to every generation k in [gen_lo, gen_hi],
/// i.e. it is maximal among cubes with (mean |f|^s)^{1/s} > a^k. Its
/// majorising set is the cube minus its children (stopping cubes of
/// generation gen_hi + 1 inside it).
struct SparseCube {
  DyadicTag tag;
  int gen_lo = 0;
  int gen_hi = 0;
  double average = 0.0;
  std::vector<std::size_t> children;
};

struct SparseFamily {
  int dim = 2;
  Shift shift{0, 0, 0};
  double alpha = 1.0;
  double s = 1.0;
  double a = 8.0;
  int k_lo = 0;  // generations covered
  int k_hi = -1;
  int level_min = 0;  // tree levels traversed
  int level_top = 0;
  std::vector<SparseCube> cubes;

  /// Generation threshold a^k.
  double threshold(int k) const { return std::exp2(k * (dim + 1) / s); }
};

/// Stopping-time construction with a = 2^{(n+1)/s} on grid t. The tree
/// starts at the cell level and is extended above the box until every cube
/// on the top level falls below the lowest generation threshold, so each
/// stopping cube has a parent and the upper maximality bound applies.
SparseFamily build_sparse_family(const GridFunction& f, double alpha, double s, const Shift& t);

struct Certificate {
  bool pass = true;
  bool disjoint = true;
  bool measure = true;
  bool nesting = true;
  bool window = true;
  double worst_ratio = 1.0;  // min over Q of |E_Q| / |Q|
  long violations = 0;
  std::string detail;
};

/// Checks |Q| <= 2 |E_Q|, disjointness of the E_Q by counting cell-centre
/// memberships, generation nesting, and a^k < average <= 2^{n/s} a^k with
/// averages recomputed from f.
Certificate certify_sparseness(const SparseFamily& family, const GridFunction& f);

/// Sum over the family's cubes of l(Q)^alpha (mean over Q of |f|^s)^{1/s} 1_Q.
GridFunction sparse_fractional(const GridFunction& f, double alpha, double s,
                               const std::vector<DyadicTag>& cubes);
GridFunction sparse_fractional(const GridFunction& f, const SparseFamily& family);

struct Domination {
  double constant = 0.0;  // a / (1 - 2^{-alpha})
  double sup_ratio = 0.0;
  long violations = 0;
  Eigen::Index argmax = -1;
  GridFunction dyadic;
  GridFunction sparse;
};

/// Pointwise comparison of the full dyadic operator on grid t with the
/// sparse operator of the stopping family.
Domination domination_check(const GridFunction& f, double alpha, double s, const Shift& t);
/// The same comparison against an existing family built from f.
Domination domination_check(const GridFunction& f, const SparseFamily& family);

nlohmann::json to_json(const SparseFamily& family);
SparseFamily sparse_family_from_json(const nlohmann::json& j);

}  // namespace rlab
