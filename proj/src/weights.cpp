#include "rlab/weights.hpp"

#include <algorithm>
#include <functional>
#include <limits>
#include <numeric>
#include <ostream>
#include <stdexcept>

#include "rlab/dyadic.hpp"
#include "rlab/potentials.hpp"
#include "rlab/quadrature.hpp"

namespace rlab {

namespace {

constexpr int kNearCells = 3;
constexpr double kInf = std::numeric_limits<double>::infinity();

Box sweep_box(int n) { return Box(Point::Constant(n, -1.0), 2.0); }

// Integral of |x|^mu over a cell away from the origin, by a Gauss-Legendre
// product rule with `order` points per axis.
double gauss_cell_integral(int n, double mu, const Point& lower, double h, int order) {
  const auto [x, w] = gauss_legendre(order, 0.0, h);
  double acc = 0.0;
  if (n == 2) {
    for (int i = 0; i < order; ++i)
      for (int j = 0; j < order; ++j) {
        const double u = lower[0] + x[i], v = lower[1] + x[j];
        acc += w[i] * w[j] * std::pow(u * u + v * v, 0.5 * mu);
      }
    return acc;
  }
  for (int i = 0; i < order; ++i)
    for (int j = 0; j < order; ++j)
      for (int k = 0; k < order; ++k) {
        const double u = lower[0] + x[i], v = lower[1] + x[j], z = lower[2] + x[k];
        acc += w[i] * w[j] * w[k] * std::pow(u * u + v * v + z * z, 0.5 * mu);
      }
  return acc;
}

// Distance from the origin to the nearest and farthest points of a cube.
std::pair<double, double> radial_extent(const Cube& q) {
  double near2 = 0.0, far2 = 0.0;
  for (int a = 0; a < q.dim(); ++a) {
    const double lo = q.lower[a], hi = lo + q.side;
    const double d = lo > 0.0 ? lo : (hi < 0.0 ? -hi : 0.0);
    near2 += d * d;
    far2 += std::max(lo * lo, hi * hi);
  }
  return {std::sqrt(near2), std::sqrt(far2)};
}

bool overlaps(const Cube& a, const Cube& b) {
  for (int i = 0; i < a.dim(); ++i)
    if (a.lower[i] + a.side <= b.lower[i] || b.lower[i] + b.side <= a.lower[i]) return false;
  return true;
}

bool inside(const Cube& q, const Box& box) {
  for (int a = 0; a < q.dim(); ++a)
    if (q.lower[a] < box.lower[a] || q.lower[a] + q.side > box.lower[a] + box.side) return false;
  return true;
}

// Cell averages of w^mu on the sweep grid, with the cells where the
// integral diverges listed separately (their averages are stored as 0).
struct CellField {
  GridFunction averages;
  std::vector<Cube> infinite;
  double mu = 0.0;
};

CellField cell_field(const Weight& w, double mu, const Box& box, int resolution) {
  const Values integrals = weight_cell_integrals(w, mu, box, resolution);
  const double h = box.side / resolution;
  const double vol = std::pow(h, box.dim());
  Values avg(integrals.size());
  std::vector<Cube> infinite;
  GridFunction shape(box, resolution, Values::Zero(integrals.size()));
  for (Eigen::Index i = 0; i < integrals.size(); ++i) {
    if (std::isfinite(integrals[i])) {
      avg[i] = integrals[i] / vol;
    } else {
      avg[i] = 0.0;
      infinite.push_back(Cube{shape.center(i).array() - 0.5 * h, h, std::nullopt});
    }
  }
  return {shape.with_values(std::move(avg)), std::move(infinite), mu};
}

// Sums of a cell field over the rings max_a |i_a - R/2 + 1/2| = r + 1/2.
std::vector<double> ring_sums(const GridFunction& f) {
  const int R = f.resolution();
  const int n = f.dim();
  std::vector<double> rings(R / 2, 0.0);
  for (Eigen::Index i = 0; i < f.size(); ++i) {
    const auto m = f.multi_index(i);
    int r = 0;
    for (int a = 0; a < n; ++a) {
      const int off = m[a] >= R / 2 ? m[a] - R / 2 : R / 2 - 1 - m[a];
      r = std::max(r, off);
    }
    rings[r] += f[i];
  }
  return rings;
}

// Averages of the fields over one cube given cube integrals; +inf if the
// cube meets a divergent cell.
using Combine = std::function<double(const Cube&, const std::vector<double>&)>;

// kappa raises the origin sequence before the trend test so that a factor
// diverging logarithmically shows non-decaying increments.
SweepResult run_sweep(const Weight& w, const std::vector<double>& exponents, const Combine& combine,
                      double kappa, const CubeSweep& sweep) {
  const int n = w.dim;
  require_dimension(n);
  const Box box = w.kind == Weight::Kind::sampled ? w.samples->box() : sweep_box(n);
  const int R = w.kind == Weight::Kind::sampled ? w.samples->resolution() : sweep.resolution;
  const double h = box.side / R;
  if (sweep.first_cells < 2 || sweep.first_cells % 2 != 0)
    throw std::invalid_argument("first_cells must be even");
  if (static_cast<long>(sweep.first_cells) << sweep.octaves > R)
    throw std::invalid_argument("sweep octaves exceed the grid");
  bool origin_vertex = true;
  for (int a = 0; a < n; ++a) {
    const double c = -box.lower[a] / h;
    origin_vertex = origin_vertex && c == std::round(c) && std::round(c) == R / 2;
  }

  std::vector<CellField> fields;
  for (double mu : exponents) fields.push_back(cell_field(w, mu, box, R));
  std::vector<std::vector<double>> rings;
  for (const CellField& f : fields) {
    auto r = ring_sums(f.averages);
    std::partial_sum(r.begin(), r.end(), r.begin());
    rings.push_back(std::move(r));
  }

  auto evaluate = [&](const Cube& q, const std::vector<double>& integrals) {
    std::vector<double> avg(integrals.size());
    for (std::size_t i = 0; i < integrals.size(); ++i) {
      avg[i] = integrals[i] / q.volume();
      for (const Cube& c : fields[i].infinite)
        if (overlaps(q, c)) avg[i] = kInf;
    }
    return std::pair{combine(q, avg), avg};
  };

  SweepResult out;
  out.factors.assign(exponents.size(), {});
  const double cell_vol = std::pow(h, n);
  for (int j = 0; j <= sweep.octaves; ++j) {
    const long cells = static_cast<long>(sweep.first_cells) << j;
    const double side = cells * h;
    double dyadic_sup = 0.0;
    if (origin_vertex) {
      Cube q{Point::Constant(n, -0.5 * side), side, std::nullopt};
      std::vector<double> integrals;
      for (const auto& r : rings) integrals.push_back(r[cells / 2 - 1] * cell_vol);
      const auto [value, avg] = evaluate(q, integrals);
      out.origin.push_back(value);
      for (std::size_t i = 0; i < avg.size(); ++i) {
        const double scale =
            w.kind == Weight::Kind::power ? std::pow(0.5 * side, w.lambda * exponents[i]) : 1.0;
        out.factors[i].push_back(avg[i] / scale);
      }
      out.constant = std::max(out.constant, value);
    }
    if (sweep.dyadic) {
      const int level = static_cast<int>(std::lround(std::log2(side)));
      for (const Shift& t : all_shifts(n)) {
        std::vector<LevelTable> tables;
        for (const CellField& f : fields) tables.emplace_back(f.averages, level, t, 1.0);
        for (Eigen::Index c = 0; c < tables[0].cube_count(); ++c) {
          const Cube q = tables[0].cube(c);
          if (!inside(q, box)) continue;
          std::vector<double> integrals;
          for (const LevelTable& tab : tables) integrals.push_back(tab.integrals()[c]);
          dyadic_sup = std::max(dyadic_sup, evaluate(q, integrals).first);
        }
      }
      out.dyadic.push_back(dyadic_sup);
      out.constant = std::max(out.constant, dyadic_sup);
    }
  }

  std::vector<double> raised;
  for (double v : out.origin) raised.push_back(std::pow(v, kappa));
  out.finite = std::isfinite(out.constant) && !grows(raised);
  return out;
}

double checked_conjugate(double p) {
  if (!(p > 1.0) || std::isinf(p)) throw std::invalid_argument("exponent must lie in (1, inf)");
  return conjugate(p);
}

}  // namespace

Weight Weight::power(int dim, double lambda) {
  require_dimension(dim);
  Weight w;
  w.kind = Kind::power;
  w.dim = dim;
  w.lambda = lambda;
  return w;
}

Weight Weight::sampled(GridFunction values) {
  if ((values.values() < 0.0).any()) throw std::invalid_argument("weight samples must be >= 0");
  Weight w;
  w.kind = Kind::sampled;
  w.dim = values.dim();
  w.samples = std::make_shared<const GridFunction>(std::move(values));
  return w;
}

Weight Weight::pow(double e) const {
  if (kind == Kind::power) return power(dim, lambda * e);
  Values v = samples->values();
  for (Eigen::Index i = 0; i < v.size(); ++i)
    v[i] = v[i] == 0.0 ? (e > 0.0 ? 0.0 : (e == 0.0 ? 1.0 : kInf)) : std::pow(v[i], e);
  if (!v.allFinite()) throw std::domain_error("negative power of a vanishing sampled weight");
  return sampled(samples->with_values(std::move(v)));
}

double Weight::operator()(const Point& x) const {
  if (kind == Kind::power) return std::pow(x.norm(), lambda);
  const Eigen::Index c = samples->cell_of(x);
  return c < 0 ? 0.0 : (*samples)[c];
}

Values weight_cell_integrals(const Weight& w, double mu, const Box& box, int resolution) {
  const int n = box.dim();
  if (n != w.dim) throw std::invalid_argument("weight and grid dimensions differ");
  const double h = box.side / resolution;
  const double vol = std::pow(h, n);
  const GridFunction shape(box, resolution, Values::Zero(std::lround(std::pow(resolution, n))));
  Values out(shape.size());
  if (w.kind == Weight::Kind::sampled) {
    if (w.samples->resolution() != resolution || (w.samples->box().lower - box.lower).norm() != 0.0 ||
        w.samples->box().side != box.side)
      throw std::invalid_argument("sampled weight lives on a different grid");
    for (Eigen::Index i = 0; i < out.size(); ++i) {
      const double v = (*w.samples)[i];
      out[i] = (v == 0.0 ? (mu > 0.0 ? 0.0 : (mu == 0.0 ? 1.0 : kInf)) : std::pow(v, mu)) * vol;
    }
    return out;
  }
  const double e = w.lambda * mu;
  for (Eigen::Index i = 0; i < out.size(); ++i) {
    const Point c = shape.center(i);
    const Point lower = c.array() - 0.5 * h;
    // Gap between the cell and the origin, in cells, along the worst axis.
    double gap = 0.0;
    bool touches = true;
    for (int a = 0; a < n; ++a) {
      const double lo = lower[a], hi = lower[a] + h;
      const double d = lo > 0.0 ? lo : (hi < 0.0 ? -hi : 0.0);
      gap = std::max(gap, d / h);
      touches = touches && d == 0.0;
    }
    if (e == 0.0) {
      out[i] = vol;
    } else if (touches) {
      out[i] = e > -n ? kernel_cube_integral(n, e + n, lower, h) : kInf;
    } else if (gap < kNearCells) {
      out[i] = gauss_cell_integral(n, e, lower, h, 8);
    } else {
      out[i] = gauss_cell_integral(n, e, lower, h, 2);
    }
  }
  return out;
}

bool grows(const std::vector<double>& seq) {
  for (double v : seq)
    if (!std::isfinite(v)) return true;
  const std::size_t m = seq.size();
  if (m < 4) return false;
  // The last three increments must be positive and the final one must not
  // have shrunk by more than kGrowthRatio.
  std::vector<double> d;
  for (std::size_t i = m - 3; i < m; ++i) d.push_back(seq[i] - seq[i - 1]);
  const double scale = std::max(std::abs(seq.back()), 1e-300);
  for (double x : d)
    if (!(x > 1e-10 * scale)) return false;
  return d[2] >= kGrowthRatio * d[1];
}

SweepResult apq_constant(const Weight& w, double p, double q, const CubeSweep& sweep) {
  const double pp = checked_conjugate(p);
  if (!(q > 0.0)) throw std::invalid_argument("q must be positive");
  return run_sweep(
      w, {q, -pp},
      [&](const Cube&, const std::vector<double>& a) {
        if (!std::isfinite(a[0]) || !std::isfinite(a[1])) return kInf;
        return std::pow(a[0], 1.0 / q) * std::pow(a[1], 1.0 / pp);
      },
      std::max(q, pp), sweep);
}

SweepResult ap_constant(const Weight& v, double r, const CubeSweep& sweep) {
  if (!(r > 1.0)) throw std::invalid_argument("r must exceed 1");
  return run_sweep(
      v, {1.0, -1.0 / (r - 1.0)},
      [&](const Cube&, const std::vector<double>& a) {
        if (!std::isfinite(a[0]) || !std::isfinite(a[1])) return kInf;
        return a[0] * std::pow(a[1], r - 1.0);
      },
      std::max(1.0, 1.0 / (r - 1.0)), sweep);
}

SweepResult a1_constant(const Weight& w, double q, const CubeSweep& sweep) {
  if (!(q > 0.0)) throw std::invalid_argument("q must be positive");
  auto inf_on = [&](const Cube& c) {
    if (w.kind == Weight::Kind::power) {
      const auto [near, far] = radial_extent(c);
      const double e = w.lambda * q;
      return e > 0.0 ? std::pow(near, e) : (e < 0.0 ? std::pow(far, e) : 1.0);
    }
    const GridFunction& s = *w.samples;
    double lo = kInf;
    for (Eigen::Index i = 0; i < s.size(); ++i) {
      const Cube cell{s.center(i).array() - 0.5 * s.spacing(), s.spacing(), std::nullopt};
      if (overlaps(cell, c)) lo = std::min(lo, std::pow(s[i], q));
    }
    return lo;
  };
  return run_sweep(
      w, {q},
      [&](const Cube& c, const std::vector<double>& a) {
        const double lo = inf_on(c);
        if (!std::isfinite(a[0]) || lo == 0.0) return kInf;
        return a[0] / lo;
      },
      1.0, sweep);
}

SweepResult a1_s_constant(const Weight& w, double s, double q, const CubeSweep& sweep) {
  if (!(s >= 1.0) || !(q >= s)) throw std::invalid_argument("need 1 <= s <= q");
  return a1_constant(w, q, sweep);
}

double weighted_norm(const GridFunction& f, const Weight& w, double p, bool weak) {
  if (!(p > 0.0)) throw std::invalid_argument("p must be positive");
  const Values mass = weight_cell_integrals(w, 1.0, f.box(), f.resolution());
  if (!weak) {
    double acc = 0.0;
    for (Eigen::Index i = 0; i < f.size(); ++i)
      if (f[i] != 0.0) acc += std::pow(std::abs(f[i]), p) * mass[i];
    return std::pow(acc, 1.0 / p);
  }
  std::vector<Eigen::Index> order(f.size());
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::sort(order.begin(), order.end(),
            [&](Eigen::Index a, Eigen::Index b) { return std::abs(f[a]) > std::abs(f[b]); });
  double best = 0.0, cumulative = 0.0;
  for (std::size_t k = 0; k < order.size();) {
    const double v = std::abs(f[order[k]]);
    if (v == 0.0) break;
    while (k < order.size() && std::abs(f[order[k]]) == v) cumulative += mass[order[k++]];
    best = std::max(best, v * std::pow(cumulative, 1.0 / p));
  }
  return best;
}

RescalingCheck rescaling_check(const Weight& w, double p, double q, const CubeSweep& sweep) {
  const double pp = checked_conjugate(p);
  RescalingCheck out;
  out.apq = apq_constant(w, p, q, sweep);
  out.ap = ap_constant(w.pow(q), 1.0 + q / pp, sweep);
  out.finiteness_agrees = out.apq.finite == out.ap.finite;
  if (std::isfinite(out.ap.constant) && std::isfinite(out.apq.constant))
    out.relative_gap = std::abs(out.ap.constant - std::pow(out.apq.constant, q)) / out.ap.constant;
  else
    out.relative_gap = std::isfinite(out.ap.constant) == std::isfinite(out.apq.constant) ? 0.0 : kInf;
  out.pass = out.finiteness_agrees && out.relative_gap < 1e-9;
  return out;
}

long WindowSweep::misclassified() const {
  return std::count_if(entries.begin(), entries.end(),
                       [](const WindowEntry& e) { return e.expected != e.classified; });
}

WindowSweep sweep_window(int dim, double p, double q, double s, double step, double margin,
                         const CubeSweep& sweep) {
  require_dimension(dim);
  if (!(s >= 1.0) || !(s < p)) throw std::invalid_argument("need 1 <= s < p");
  if (!(q >= p)) throw std::invalid_argument("need q >= p");
  WindowSweep out;
  out.dim = dim;
  out.p = p;
  out.q = q;
  out.s = s;
  out.lower = -dim / q;
  out.upper = dim / s - dim / p;
  const long first = static_cast<long>(std::ceil((out.lower - margin) / step - 1e-9));
  const long last = static_cast<long>(std::floor((out.upper + margin) / step + 1e-9));
  for (long i = first; i <= last; ++i) {
    WindowEntry e;
    e.lambda = i * step;
    constexpr double tol = 1e-12;
    e.expected = e.lambda > out.lower + tol && e.lambda < out.upper - tol;
    e.sweep = apq_constant(Weight::power(dim, s * e.lambda), p / s, q / s, sweep);
    e.classified = e.sweep.finite;
    out.entries.push_back(std::move(e));
  }
  return out;
}

void write_window_csv(std::ostream& out, const std::vector<WindowSweep>& sweeps) {
  std::size_t octaves = 0;
  for (const auto& s : sweeps)
    for (const auto& e : s.entries) octaves = std::max(octaves, e.sweep.origin.size());
  out << "lambda,p,q,s,expected,classified";
  for (std::size_t j = 0; j < octaves; ++j) out << ",octave_" << j;
  out << '\n';
  out.precision(12);
  for (const auto& s : sweeps)
    for (const auto& e : s.entries) {
      out << e.lambda << ',' << s.p << ',' << s.q << ',' << s.s << ',' << (e.expected ? 1 : 0) << ','
          << (e.classified ? 1 : 0);
      for (std::size_t j = 0; j < octaves; ++j) {
        out << ',';
        if (j < e.sweep.origin.size()) out << e.sweep.origin[j];
      }
      out << '\n';
    }
}

}  // namespace rlab
