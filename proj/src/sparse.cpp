#include "rlab/sparse.hpp"

#include <map>
#include <stdexcept>

#include "rlab/potentials.hpp"

namespace rlab {

namespace {

constexpr int kMaxExtraLevels = 2000;

// Largest k with a^k < v.
int generation_below(const SparseFamily& fam, double v) {
  int k = static_cast<int>(std::floor(std::log2(v) * fam.s / (fam.dim + 1)));
  while (fam.threshold(k) >= v) --k;
  while (fam.threshold(k + 1) < v) ++k;
  return k;
}

// Smallest k with a^k >= v (v > 0).
int generation_at_least(const SparseFamily& fam, double v) {
  int k = generation_below(fam, v);
  while (fam.threshold(k) < v) ++k;
  return k;
}

// Cells whose centres lie in q, as an index range per axis.
struct CellRange {
  std::array<int, 3> lo{0, 0, 0};
  std::array<int, 3> hi{0, 0, 0};  // exclusive
  bool empty = true;
};

CellRange centres_in(const GridFunction& f, const Cube& q) {
  CellRange r;
  const double h = f.spacing();
  r.empty = false;
  for (int a = 0; a < f.dim(); ++a) {
    const double lo = (q.lower[a] - f.box().lower[a]) / h - 0.5;
    const double hi = (q.lower[a] + q.side - f.box().lower[a]) / h - 0.5;
    const double R = f.resolution();
    r.lo[a] = static_cast<int>(std::clamp(std::ceil(lo), 0.0, R));
    r.hi[a] = static_cast<int>(std::clamp(std::ceil(hi), 0.0, R));
    if (r.lo[a] >= r.hi[a]) r.empty = true;
  }
  if (f.dim() == 2) {
    r.lo[2] = 0;
    r.hi[2] = 1;
  }
  return r;
}

template <typename Fn>
void for_cells(const GridFunction& f, const CellRange& r, Fn&& fn) {
  if (r.empty) return;
  for (int k = r.lo[2]; k < r.hi[2]; ++k)
    for (int j = r.lo[1]; j < r.hi[1]; ++j)
      for (int i = r.lo[0]; i < r.hi[0]; ++i) fn(f.flat_index(i, j, k));
}

// (mean over Q of |f|^s)^{1/s} from the cells Q overlaps. Integrals are
// memoised by the overlap pattern: the long chain of generations above the box
// clips to a handful of distinct regions.
class CubeMeans {
 public:
  CubeMeans(const GridFunction& f, double s) : f_(f), s_(s) {}

  double operator()(const Cube& q) {
    const int n = f_.dim();
    std::array<AxisOverlap, 3> ov;
    std::vector<double> key;
    for (int a = 0; a < n; ++a) {
      ov[a] = axis_overlap(f_.box(), f_.resolution(), a, q.lower[a], q.lower[a] + q.side);
      key.push_back(ov[a].first);
      key.push_back(static_cast<double>(ov[a].lengths.size()));
      key.insert(key.end(), ov[a].lengths.begin(), ov[a].lengths.end());
    }
    auto it = memo_.find(key);
    if (it == memo_.end()) {
      double acc = 0.0;
      const std::size_t c2 = n == 3 ? ov[2].lengths.size() : 1;
      for (std::size_t k = 0; k < c2; ++k)
        for (std::size_t j = 0; j < ov[1].lengths.size(); ++j)
          for (std::size_t i = 0; i < ov[0].lengths.size(); ++i) {
            const double m = ov[0].lengths[i] * ov[1].lengths[j] * (n == 3 ? ov[2].lengths[k] : 1.0);
            if (m <= 0.0) continue;
            const double v = std::abs(f_[f_.flat_index(ov[0].first + static_cast<int>(i),
                                                        ov[1].first + static_cast<int>(j),
                                                        n == 3 ? ov[2].first + static_cast<int>(k) : 0)]);
            acc += (s_ == 1.0 ? v : std::pow(v, s_)) * m;
          }
      it = memo_.emplace(std::move(key), acc).first;
    }
    return std::pow(it->second / q.volume(), 1.0 / s_);
  }

 private:
  const GridFunction& f_;
  double s_;
  std::map<std::vector<double>, double> memo_;
};

}  // namespace

SparseFamily build_sparse_family(const GridFunction& f, double alpha, double s, const Shift& t) {
  const int n = f.dim();
  if (!(alpha > 0.0) || !(s >= 1.0) || !(s < n / alpha))
    throw std::invalid_argument("need alpha > 0 and 1 <= s < n / alpha");
  SparseFamily fam;
  fam.dim = n;
  fam.shift = t;
  fam.alpha = alpha;
  fam.s = s;
  fam.a = std::exp2((n + 1) / s);
  const LevelRange range = level_range(f.box(), f.resolution());
  fam.level_min = range.k_min;

  std::vector<LevelTable> tables;
  std::vector<Values> avgs;
  double lowest = INFINITY, highest = 0.0;
  for (int k = range.k_min; k <= range.k_max; ++k) {
    if (tables.empty()) tables.emplace_back(f, k, t, s);
    else tables.push_back(tables.back().parent_level());
    avgs.push_back(tables.back().averages());
    for (double v : avgs.back())
      if (v > 0.0) {
        lowest = std::min(lowest, v);
        highest = std::max(highest, v);
      }
  }
  if (highest == 0.0) {
    fam.level_top = range.k_max;
    return fam;
  }
  fam.k_lo = generation_below(fam, lowest);
  fam.k_hi = generation_below(fam, highest);
  const double floor_level = fam.threshold(fam.k_lo);
  // Extend upward until no top-level cube can stop.
  int top = range.k_max;
  while (avgs.back().maxCoeff() > floor_level) {
    if (top - range.k_max > kMaxExtraLevels) throw std::logic_error("dyadic tree failed to close");
    ++top;
    tables.push_back(tables.back().parent_level());
    avgs.push_back(tables.back().averages());
  }
  fam.level_top = top;

  // Top-down: largest ancestor average and nearest stopping ancestor.
  const auto levels = tables.size();
  std::vector<Values> anc(levels);
  std::vector<std::vector<long>> stop_anc(levels);
  std::vector<std::vector<long>> family_id(levels);
  for (std::size_t li = levels; li-- > 0;) {
    const LevelTable& tab = tables[li];
    const Eigen::Index count = tab.cube_count();
    anc[li] = Values::Zero(count);
    stop_anc[li].assign(count, -1);
    family_id[li].assign(count, -1);
    for (Eigen::Index c = 0; c < count; ++c) {
      if (li + 1 < levels) {
        const LevelTable& up = tables[li + 1];
        const Cube q = tab.cube(c);
        Index3 pm{0, 0, 0};
        for (int ax = 0; ax < n; ++ax)
          pm[ax] = locate_axis(q.lower[ax] + 0.5 * q.side, up.level(), t[ax]);
        const Eigen::Index p = up.local(pm);
        if (p < 0) throw std::logic_error("parent cube outside the level table");
        anc[li][c] = std::max(anc[li + 1][p], avgs[li + 1][p]);
        stop_anc[li][c] =
            family_id[li + 1][p] >= 0 ? family_id[li + 1][p] : stop_anc[li + 1][p];
      }
      const double v = avgs[li][c];
      if (v <= floor_level) continue;
      const int lo = std::max(fam.k_lo, anc[li][c] > 0.0 ? generation_at_least(fam, anc[li][c])
                                                          : fam.k_lo);
      const int hi = generation_below(fam, v);
      if (lo > hi) continue;
      SparseCube sc;
      sc.tag = tab.tag(c);
      sc.gen_lo = lo;
      sc.gen_hi = hi;
      sc.average = v;
      family_id[li][c] = static_cast<long>(fam.cubes.size());
      if (stop_anc[li][c] >= 0) fam.cubes[static_cast<std::size_t>(stop_anc[li][c])].children.push_back(fam.cubes.size());
      fam.cubes.push_back(std::move(sc));
    }
  }
  return fam;
}

Certificate certify_sparseness(const SparseFamily& fam, const GridFunction& f) {
  Certificate cert;
  const int n = fam.dim;
  auto fail = [&](bool& flag, const std::string& why) {
    flag = false;
    cert.pass = false;
    ++cert.violations;
    if (cert.detail.empty()) cert.detail = why;
  };

  // Measure bound from exact cube volumes.
  for (const SparseCube& q : fam.cubes) {
    const double vol = std::ldexp(1.0, q.tag.level * n);
    double covered = 0.0;
    for (std::size_t c : q.children) covered += std::ldexp(1.0, fam.cubes[c].tag.level * n);
    const double e = vol - covered;
    cert.worst_ratio = std::min(cert.worst_ratio, e / vol);
    if (vol > 2.0 * e) fail(cert.measure, "|Q| > 2|E_Q|");
  }

  // Disjointness of the E_Q on cell centres.
  std::vector<int> hits(static_cast<std::size_t>(f.size()), 0);
  for (const SparseCube& q : fam.cubes) {
    for_cells(f, centres_in(f, dyadic_cube(q.tag, n)), [&](Eigen::Index i) { ++hits[i]; });
    for (std::size_t c : q.children)
      for_cells(f, centres_in(f, dyadic_cube(fam.cubes[c].tag, n)), [&](Eigen::Index i) { --hits[i]; });
  }
  for (int h : hits)
    if (h > 1 || h < 0) {
      fail(cert.disjoint, "majorising sets overlap");
      break;
    }

  // Children lie in their cube; each generation-(k+1) cube lies in a generation-k cube.
  for (const SparseCube& q : fam.cubes)
    for (std::size_t c : q.children)
      if (!contains_exact(q.tag, fam.cubes[c].tag, n)) fail(cert.nesting, "child outside cube");
  for (const SparseCube& p : fam.cubes) {
    if (p.gen_lo <= fam.k_lo) continue;
    const Cube pc = dyadic_cube(p.tag, n);
    bool found = false;
    for (const SparseCube& q : fam.cubes) {
      if (q.gen_lo > p.gen_lo - 1 || q.gen_hi < p.gen_lo - 1 || q.tag.level <= p.tag.level) continue;
      const Cube qc = dyadic_cube(q.tag, n);
      bool maybe = true;
      for (int a = 0; a < n; ++a)
        if (pc.lower[a] < qc.lower[a] - 1e-9 * qc.side || pc.lower[a] + pc.side > qc.lower[a] + qc.side * (1 + 1e-9))
          maybe = false;
      if (maybe && contains_exact(q.tag, p.tag, n)) {
        found = true;
        break;
      }
    }
    if (!found) fail(cert.nesting, "generation not nested");
  }

  // Maximality window with independently recomputed averages.
  const double upper = std::exp2(n / fam.s);
  CubeMeans mean(f, fam.s);
  for (const SparseCube& q : fam.cubes) {
    const double v = mean(dyadic_cube(q.tag, n));
    for (int k = q.gen_lo; k <= q.gen_hi; ++k) {
      const double ak = fam.threshold(k);
      if (!(ak < v * (1 + 1e-12)) || v > upper * ak * (1 + 1e-12)) {
        fail(cert.window, "average outside the maximality window at level " +
                              std::to_string(q.tag.level));
        break;
      }
    }
  }
  return cert;
}

GridFunction sparse_fractional(const GridFunction& f, double alpha, double s,
                               const std::vector<DyadicTag>& cubes) {
  const int n = f.dim();
  if (alpha > 0.0 && !(s < n / alpha))
    throw std::invalid_argument("sparse operator needs s < n / alpha");
  Values out = Values::Zero(f.size());
  CubeMeans mean(f, s);
  for (const DyadicTag& tag : cubes) {
    const Cube q = dyadic_cube(tag, n);
    const double v = std::pow(q.side, alpha) * mean(q);
    if (v == 0.0) continue;
    for_cells(f, centres_in(f, q), [&](Eigen::Index i) { out[i] += v; });
  }
  return f.with_values(std::move(out));
}

GridFunction sparse_fractional(const GridFunction& f, const SparseFamily& family) {
  std::vector<DyadicTag> tags;
  tags.reserve(family.cubes.size());
  for (const SparseCube& q : family.cubes) tags.push_back(q.tag);
  return sparse_fractional(f, family.alpha, family.s, tags);
}

Domination domination_check(const GridFunction& f, double alpha, double s, const Shift& t) {
  return domination_check(f, build_sparse_family(f, alpha, s, t));
}

Domination domination_check(const GridFunction& f, const SparseFamily& fam) {
  Domination d;
  d.constant = fam.a / (1.0 - std::exp2(-fam.alpha));
  d.dyadic = dyadic_fractional(f, fam.alpha, fam.shift, fam.s);
  d.sparse = sparse_fractional(f, fam);
  for (Eigen::Index i = 0; i < f.size(); ++i) {
    const double lhs = d.dyadic[i], rhs = d.sparse[i];
    if (lhs <= 0.0) continue;
    const double ratio = rhs > 0.0 ? lhs / rhs : INFINITY;
    if (ratio > d.sup_ratio) {
      d.sup_ratio = ratio;
      d.argmax = i;
    }
    if (lhs > d.constant * rhs * (1.0 + 1e-12)) ++d.violations;
  }
  return d;
}

nlohmann::json to_json(const SparseFamily& fam) {
  nlohmann::json j;
  j["n"] = fam.dim;
  j["shift"] = std::vector<int>(fam.shift.begin(), fam.shift.begin() + fam.dim);
  j["alpha"] = fam.alpha;
  j["s"] = fam.s;
  j["a"] = fam.a;
  j["generations"] = {fam.k_lo, fam.k_hi};
  j["levels"] = {fam.level_min, fam.level_top};
  nlohmann::json cubes = nlohmann::json::array();
  for (const SparseCube& q : fam.cubes) {
    cubes.push_back({{"t", std::vector<int>(q.tag.shift.begin(), q.tag.shift.begin() + fam.dim)},
                     {"k", q.tag.level},
                     {"m", std::vector<long long>(q.tag.index.begin(), q.tag.index.begin() + fam.dim)},
                     {"gen", {q.gen_lo, q.gen_hi}},
                     {"average", q.average},
                     {"children", q.children}});
  }
  j["cubes"] = std::move(cubes);
  return j;
}

SparseFamily sparse_family_from_json(const nlohmann::json& j) {
  SparseFamily fam;
  fam.dim = j.at("n").get<int>();
  require_dimension(fam.dim);
  const auto shift = j.at("shift").get<std::vector<int>>();
  for (int a = 0; a < fam.dim; ++a) fam.shift[a] = shift.at(a);
  fam.alpha = j.at("alpha").get<double>();
  fam.s = j.at("s").get<double>();
  fam.a = j.at("a").get<double>();
  fam.k_lo = j.at("generations").at(0).get<int>();
  fam.k_hi = j.at("generations").at(1).get<int>();
  fam.level_min = j.at("levels").at(0).get<int>();
  fam.level_top = j.at("levels").at(1).get<int>();
  for (const auto& c : j.at("cubes")) {
    SparseCube q;
    const auto t = c.at("t").get<std::vector<int>>();
    const auto m = c.at("m").get<std::vector<long long>>();
    for (int a = 0; a < fam.dim; ++a) {
      q.tag.shift[a] = t.at(a);
      q.tag.index[a] = m.at(a);
    }
    q.tag.level = c.at("k").get<int>();
    q.gen_lo = c.at("gen").at(0).get<int>();
    q.gen_hi = c.at("gen").at(1).get<int>();
    q.average = c.at("average").get<double>();
    q.children = c.at("children").get<std::vector<std::size_t>>();
    fam.cubes.push_back(std::move(q));
  }
  return fam;
}

}  // namespace rlab
