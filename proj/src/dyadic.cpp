#include "rlab/dyadic.hpp"

#include <boost/multiprecision/cpp_int.hpp>

#include <cmath>
#include <limits>
#include <stdexcept>

namespace rlab {

namespace {

using Rational = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

int sign_of_level(int level) { return (level % 2 == 0) ? 1 : -1; }

Rational pow2(int k) {
  const BigInt p = BigInt(1) << std::abs(k);
  return k >= 0 ? Rational(p) : Rational(BigInt(1), p);
}

// Exact corner of a dyadic cube along one axis: 2^k (3m + (-1)^k t) / 3.
Rational exact_corner(int level, long long m, int t) {
  return pow2(level) * Rational(BigInt(3) * m + sign_of_level(level) * t, BigInt(3));
}

long long floor_div(const Rational& q) {
  const BigInt num = boost::multiprecision::numerator(q);
  const BigInt den = boost::multiprecision::denominator(q);
  BigInt d = num / den;
  if (num < 0 && d * den != num) d -= 1;
  return static_cast<long long>(d);
}

}  // namespace

std::vector<Shift> all_shifts(int dim) {
  require_dimension(dim);
  std::vector<Shift> out;
  for (int bits = 0; bits < (1 << dim); ++bits) {
    Shift t{0, 0, 0};
    // Most significant bit on axis 0 gives lexicographic order.
    for (int a = 0; a < dim; ++a) t[a] = (bits >> (dim - 1 - a)) & 1;
    out.push_back(t);
  }
  return out;
}

Cube dyadic_cube(const Shift& t, int level, const Index3& m, int dim) {
  Cube q;
  q.lower.resize(dim);
  const int sg = sign_of_level(level);
  for (int a = 0; a < dim; ++a)
    q.lower[a] = std::ldexp((3.0 * static_cast<double>(m[a]) + sg * t[a]) / 3.0, level);
  q.side = std::ldexp(1.0, level);
  q.tag = DyadicTag{t, level, m};
  return q;
}

Cube dyadic_cube(const DyadicTag& tag, int dim) {
  return dyadic_cube(tag.shift, tag.level, tag.index, dim);
}

long long locate_axis(double x, int level, int t) {
  const double y = std::ldexp(x, -level);
  const int sg = sign_of_level(level);
  const double shifted = y - sg * t / 3.0;
  const double m0 = std::floor(shifted);
  const double frac = shifted - m0;
  if (frac > 1e-9 && frac < 1.0 - 1e-9) return static_cast<long long>(m0);
  // Unshifted: y is x scaled by a power of two, exact unless it underflowed.
  if (t == 0 && (std::isnormal(y) || x == 0.0)) return static_cast<long long>(m0);
  const Rational q = Rational(x) / pow2(level) * 3 - sg * t;
  return floor_div(q / 3);
}

Cube locate(const Point& x, int level, const Shift& t) {
  Index3 m{0, 0, 0};
  for (int a = 0; a < x.size(); ++a) m[a] = locate_axis(x[a], level, t[a]);
  return dyadic_cube(t, level, m, static_cast<int>(x.size()));
}

bool contains_exact(const DyadicTag& outer, const Cube& q) {
  const Rational side = pow2(outer.level);
  for (int a = 0; a < q.dim(); ++a) {
    const Rational c = exact_corner(outer.level, outer.index[a], outer.shift[a]);
    const Rational lo(q.lower[a]);
    const Rational hi = lo + Rational(q.side);
    if (lo < c || hi > c + side) return false;
  }
  return true;
}

bool contains_exact(const DyadicTag& outer, const DyadicTag& inner, int dim) {
  const Rational side = pow2(outer.level);
  const Rational inner_side = pow2(inner.level);
  for (int a = 0; a < dim; ++a) {
    const Rational c = exact_corner(outer.level, outer.index[a], outer.shift[a]);
    const Rational lo = exact_corner(inner.level, inner.index[a], inner.shift[a]);
    if (lo < c || lo + inner_side > c + side) return false;
  }
  return true;
}

ShiftedCube third_trick(const Cube& q) {
  if (!(q.side > 0.0)) throw std::invalid_argument("cube side must be positive");
  const int n = q.dim();
  // Levels with l(Q) < 2^k <= 6 l(Q).
  int k = static_cast<int>(std::floor(std::log2(q.side))) - 1;
  while (std::ldexp(1.0, k) <= q.side) ++k;
  for (; std::ldexp(1.0, k) <= 6.0 * q.side; ++k) {
    for (const Shift& t : all_shifts(n)) {
      Cube candidate = locate(q.lower, k, t);
      if (contains_exact(*candidate.tag, q)) return {t, std::move(candidate)};
    }
  }
  throw std::logic_error("no shifted dyadic cube of comparable size contains the cube");
}

ShiftedCube third_trick_level(const Cube& q) {
  int e = 0;
  const double mant = std::frexp(q.side, &e);
  if (mant != 0.5) throw std::invalid_argument("cube side must be a power of two");
  const int k = e - 1;
  for (const Shift& t : all_shifts(q.dim())) {
    Cube candidate = locate(q.lower, k + 3, t);
    if (contains_exact(*candidate.tag, q)) return {t, std::move(candidate)};
  }
  throw std::logic_error("no level k+3 shifted dyadic cube contains the cube");
}

LevelRange level_range(const Box& box, int resolution) {
  const double h = box.side / resolution;
  LevelRange r;
  r.k_min = static_cast<int>(std::ceil(std::log2(h) - 1e-12));
  r.k_max = static_cast<int>(std::ceil(std::log2(4.0 * box.side) - 1e-12));
  return r;
}

void LevelTable::index_axes() {
  const double h = box_.side / resolution_;
  for (int a = 0; a < dim_; ++a) {
    const double lo = box_.lower[a];
    const double hi = std::nextafter(lo + box_.side, -std::numeric_limits<double>::infinity());
    first_[a] = locate_axis(lo, level_, shift_[a]);
    count_[a] = locate_axis(hi, level_, shift_[a]) - first_[a] + 1;
    center_cube_[a].resize(resolution_);
    for (int i = 0; i < resolution_; ++i)
      center_cube_[a][i] =
          static_cast<int>(locate_axis(lo + (i + 0.5) * h, level_, shift_[a]) - first_[a]);
  }
}

LevelTable::LevelTable(const GridFunction& f, int level, const Shift& t, double s)
    : dim_(f.dim()),
      level_(level),
      shift_(t),
      side_(std::ldexp(1.0, level)),
      s_(s),
      resolution_(f.resolution()),
      box_(f.box()) {
  if (s < 1.0) throw std::invalid_argument("average power must be >= 1");
  const Box& box = f.box();
  const int R = f.resolution();
  index_axes();

  struct Entry {
    int cell;
    int cube;
    double length;
  };
  std::array<std::vector<Entry>, 3> entries;
  for (int a = 0; a < dim_; ++a) {
    for (long long j = 0; j < count_[a]; ++j) {
      const Cube q = dyadic_cube(Shift{t[a], 0, 0}, level, Index3{first_[a] + j, 0, 0}, 1);
      const AxisOverlap ov = axis_overlap(box, R, a, q.lower[0], q.lower[0] + q.side);
      for (std::size_t i = 0; i < ov.lengths.size(); ++i)
        if (ov.lengths[i] > 0.0)
          entries[a].push_back({ov.first + static_cast<int>(i), static_cast<int>(j), ov.lengths[i]});
    }
  }

  // Contract |f|^s against the per-axis overlap matrices one axis at a time.
  std::array<long long, 3> dims{R, dim_ >= 2 ? R : 1, dim_ == 3 ? R : 1};
  std::vector<double> cur(f.size());
  for (Eigen::Index i = 0; i < f.size(); ++i)
    cur[i] = s == 1.0 ? std::abs(f[i]) : std::pow(std::abs(f[i]), s);
  for (int a = 0; a < dim_; ++a) {
    std::array<long long, 3> nd = dims;
    nd[a] = count_[a];
    std::vector<double> next(static_cast<std::size_t>(nd[0] * nd[1] * nd[2]), 0.0);
    const long long stride_in = a == 0 ? 1 : (a == 1 ? dims[0] : dims[0] * dims[1]);
    const long long stride_out = a == 0 ? 1 : (a == 1 ? nd[0] : nd[0] * nd[1]);
    const long long outer = a == 2 ? 1 : (a == 1 ? dims[2] : dims[1] * dims[2]);
    const long long inner = a == 0 ? 1 : (a == 1 ? dims[0] : dims[0] * dims[1]);
    const long long block_in = stride_in * dims[a];
    const long long block_out = stride_out * nd[a];
    for (long long o = 0; o < outer; ++o) {
      for (const Entry& e : entries[a]) {
        const double* src = cur.data() + o * block_in + e.cell * stride_in;
        double* dst = next.data() + o * block_out + e.cube * stride_out;
        for (long long i = 0; i < inner; ++i) dst[i] += e.length * src[i];
      }
    }
    cur.swap(next);
    dims = nd;
  }
  integrals_ = Eigen::Map<Values>(cur.data(), static_cast<Eigen::Index>(cur.size()));
}

LevelTable LevelTable::parent_level() const { return LevelTable(*this, Coarsen{}); }

LevelTable::LevelTable(const LevelTable& child, Coarsen)
    : dim_(child.dim_),
      level_(child.level_ + 1),
      shift_(child.shift_),
      side_(2.0 * child.side_),
      s_(child.s_),
      resolution_(child.resolution_),
      box_(child.box_) {
  index_axes();
  // Each child lies in exactly one parent of the same grid.
  std::array<std::vector<long long>, 3> parent;
  for (int a = 0; a < dim_; ++a) {
    parent[a].resize(child.count_[a]);
    for (long long j = 0; j < child.count_[a]; ++j) {
      const Cube q = dyadic_cube(Shift{shift_[a], 0, 0}, child.level_, Index3{child.first_[a] + j, 0, 0}, 1);
      parent[a][j] = locate_axis(q.lower[0] + 0.5 * q.side, level_, shift_[a]) - first_[a];
    }
  }
  Eigen::Index total = 1;
  for (int a = 0; a < dim_; ++a) total *= count_[a];
  integrals_ = Values::Zero(total);
  for (Eigen::Index c = 0; c < child.cube_count(); ++c) {
    Eigen::Index out = 0, stride = 1, rest = c;
    for (int a = 0; a < dim_; ++a) {
      out += parent[a][rest % child.count_[a]] * stride;
      rest /= child.count_[a];
      stride *= count_[a];
    }
    integrals_[out] += child.integrals_[c];
  }
}

double LevelTable::average(Eigen::Index cube) const {
  const double mean = integrals_[cube] / cube_volume();
  return s_ == 1.0 ? mean : std::pow(mean, 1.0 / s_);
}

Values LevelTable::averages() const {
  Values out(integrals_.size());
  for (Eigen::Index i = 0; i < out.size(); ++i) out[i] = average(i);
  return out;
}

Index3 LevelTable::index(Eigen::Index cube) const {
  Index3 m{0, 0, 0};
  long long rest = cube;
  for (int a = 0; a < dim_; ++a) {
    m[a] = first_[a] + rest % count_[a];
    rest /= count_[a];
  }
  return m;
}

Eigen::Index LevelTable::local(const Index3& m) const {
  Eigen::Index out = 0, stride = 1;
  for (int a = 0; a < dim_; ++a) {
    const long long j = m[a] - first_[a];
    if (j < 0 || j >= count_[a]) return -1;
    out += j * stride;
    stride *= count_[a];
  }
  return out;
}

DyadicTag LevelTable::tag(Eigen::Index cube) const { return DyadicTag{shift_, level_, index(cube)}; }

Cube LevelTable::cube(Eigen::Index cube) const { return dyadic_cube(tag(cube), dim_); }

Eigen::Index LevelTable::cube_of_cell(Eigen::Index cell) const {
  Eigen::Index out = 0, stride = 1;
  Eigen::Index rest = cell;
  for (int a = 0; a < dim_; ++a) {
    out += center_cube_[a][rest % resolution_] * stride;
    rest /= resolution_;
    stride *= count_[a];
  }
  return out;
}

Values LevelTable::gather(const Values& per_cube) const {
  Eigen::Index cells = 1;
  for (int a = 0; a < dim_; ++a) cells *= resolution_;
  Values out(cells);
  for (Eigen::Index i = 0; i < cells; ++i) out[i] = per_cube[cube_of_cell(i)];
  return out;
}

}  // namespace rlab
