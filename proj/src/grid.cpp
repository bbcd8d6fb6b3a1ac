#include "rlab/grid.hpp"

#include <algorithm>
#include <bit>
#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>

#include "json.hpp"

#include "rlab/corpus.hpp"

namespace rlab {

Box::Box(Point lower_corner, double side_length)
    : lower(std::move(lower_corner)), side(side_length) {
  require_dimension(dim());
  if (!(side > 0.0) || !std::isfinite(side)) throw std::invalid_argument("box side must be > 0");
}

bool Cube::contains(const Point& x) const {
  for (int a = 0; a < dim(); ++a)
    if (x[a] < lower[a] || x[a] >= lower[a] + side) return false;
  return true;
}

GridFunction::GridFunction(Box box, int resolution, Values values, std::string corpus_id,
                           std::shared_ptr<const Expression> source, bool enforce_margin)
    : box_(std::move(box)),
      resolution_(resolution),
      values_(std::move(values)),
      corpus_id_(std::move(corpus_id)),
      source_(std::move(source)) {
  if (!is_power_of_two(resolution_) || resolution_ < 16)
    throw std::invalid_argument("resolution must be a power of two >= 16");
  Eigen::Index expected = 1;
  for (int a = 0; a < dim(); ++a) expected *= resolution_;
  if (values_.size() != expected) throw std::invalid_argument("value count != resolution^n");
  if (!values_.allFinite()) throw std::invalid_argument("grid values must be finite");
  if (enforce_margin && !vanishes_near_boundary(*this, 2))
    throw std::invalid_argument("function does not vanish on the two outer cell layers");
}

GridFunction GridFunction::zeros_like(const GridFunction& f) {
  return GridFunction(f.box(), f.resolution(), Values::Zero(f.size()));
}

GridFunction GridFunction::with_values(Values v) const {
  return GridFunction(box_, resolution_, std::move(v));
}

bool GridFunction::has_analytic_gradient() const {
  if (!source_) return false;
  return source_->gradient(box_.lower).has_value();
}

std::array<int, 3> GridFunction::multi_index(Eigen::Index flat) const {
  std::array<int, 3> idx{0, 0, 0};
  for (int a = 0; a < dim(); ++a) {
    idx[a] = static_cast<int>(flat % resolution_);
    flat /= resolution_;
  }
  return idx;
}

Point GridFunction::center(Eigen::Index flat) const {
  const auto idx = multi_index(flat);
  const double h = spacing();
  Point x(dim());
  for (int a = 0; a < dim(); ++a) x[a] = box_.lower[a] + (idx[a] + 0.5) * h;
  return x;
}

std::vector<Point> GridFunction::centers() const {
  std::vector<Point> out;
  out.reserve(size());
  for (Eigen::Index i = 0; i < size(); ++i) out.push_back(center(i));
  return out;
}

Eigen::Index GridFunction::cell_of(const Point& x) const {
  const double h = spacing();
  std::array<int, 3> idx{0, 0, 0};
  for (int a = 0; a < dim(); ++a) {
    const double u = std::floor((x[a] - box_.lower[a]) / h);
    if (u < 0 || u >= resolution_) return -1;
    idx[a] = static_cast<int>(u);
  }
  return flat_index(idx[0], idx[1], idx[2]);
}

double GridFunction::interpolate2(double x0, double x1) const {
  const double h = spacing();
  const double u0 = (x0 - box_.lower[0]) / h - 0.5;
  const double u1 = (x1 - box_.lower[1]) / h - 0.5;
  const double f0 = std::floor(u0), f1 = std::floor(u1);
  const int i0 = static_cast<int>(f0), i1 = static_cast<int>(f1);
  if (i0 < -1 || i1 < -1 || i0 >= resolution_ || i1 >= resolution_) return 0.0;
  const double w0 = u0 - f0, w1 = u1 - f1;
  const int R = resolution_;
  const double* v = values_.data();
  auto at = [&](int a, int b) -> double {
    return (a < 0 || b < 0 || a >= R || b >= R) ? 0.0 : v[a + static_cast<Eigen::Index>(R) * b];
  };
  if (i0 >= 0 && i1 >= 0 && i0 + 1 < R && i1 + 1 < R) {
    const double* p = v + i0 + static_cast<Eigen::Index>(R) * i1;
    return (1 - w1) * ((1 - w0) * p[0] + w0 * p[1]) + w1 * ((1 - w0) * p[R] + w0 * p[R + 1]);
  }
  return (1 - w1) * ((1 - w0) * at(i0, i1) + w0 * at(i0 + 1, i1)) +
         w1 * ((1 - w0) * at(i0, i1 + 1) + w0 * at(i0 + 1, i1 + 1));
}

double GridFunction::interpolate3(double x0, double x1, double x2) const {
  const double h = spacing();
  const double u[3] = {(x0 - box_.lower[0]) / h - 0.5, (x1 - box_.lower[1]) / h - 0.5,
                       (x2 - box_.lower[2]) / h - 0.5};
  int i[3];
  double w[3];
  for (int a = 0; a < 3; ++a) {
    const double f = std::floor(u[a]);
    i[a] = static_cast<int>(f);
    w[a] = u[a] - f;
    if (i[a] < -1 || i[a] >= resolution_) return 0.0;
  }
  const int R = resolution_;
  double acc = 0.0;
  for (int c = 0; c < 8; ++c) {
    const int a0 = i[0] + (c & 1), a1 = i[1] + ((c >> 1) & 1), a2 = i[2] + ((c >> 2) & 1);
    if (a0 < 0 || a1 < 0 || a2 < 0 || a0 >= R || a1 >= R || a2 >= R) continue;
    const double wt = ((c & 1) ? w[0] : 1 - w[0]) * (((c >> 1) & 1) ? w[1] : 1 - w[1]) *
                      (((c >> 2) & 1) ? w[2] : 1 - w[2]);
    acc += wt * values_[flat_index(a0, a1, a2)];
  }
  return acc;
}

double GridFunction::interpolate(const Point& x) const {
  return dim() == 2 ? interpolate2(x[0], x[1]) : interpolate3(x[0], x[1], x[2]);
}

GridFunction VectorField::magnitude() const {
  if (components.empty()) throw std::invalid_argument("empty vector field");
  Values sq = Values::Zero(components.front().size());
  for (const auto& c : components) sq += c.values().square();
  return components.front().with_values(sq.sqrt());
}

VectorField gradient(const GridFunction& f, bool prefer_analytic) {
  const int n = f.dim();
  const int R = f.resolution();
  const double h = f.spacing();
  VectorField out;
  if (prefer_analytic && f.has_analytic_gradient()) {
    std::vector<Values> comp(n, Values::Zero(f.size()));
    for (Eigen::Index i = 0; i < f.size(); ++i) {
      const Point g = *f.source()->gradient(f.center(i));
      for (int a = 0; a < n; ++a) comp[a][i] = g[a];
    }
    for (int a = 0; a < n; ++a) out.components.push_back(f.with_values(std::move(comp[a])));
    return out;
  }
  for (int a = 0; a < n; ++a) {
    Values d = Values::Zero(f.size());
    Eigen::Index stride = 1;
    for (int b = 0; b < a; ++b) stride *= R;
    for (Eigen::Index i = 0; i < f.size(); ++i) {
      const int ia = f.multi_index(i)[a];
      if (ia > 0 && ia + 1 < R) {
        d[i] = (f[i + stride] - f[i - stride]) / (2 * h);
      } else if (ia == 0) {
        d[i] = (-3 * f[i] + 4 * f[i + stride] - f[i + 2 * stride]) / (2 * h);
      } else {
        d[i] = (3 * f[i] - 4 * f[i - stride] + f[i - 2 * stride]) / (2 * h);
      }
    }
    out.components.push_back(f.with_values(std::move(d)));
  }
  return out;
}

double MeasuredSamples::total_measure() const {
  double t = 0.0;
  for (double m : measures) t += m;
  return t;
}

AxisOverlap axis_overlap(const Box& box, int resolution, int axis, double a, double b) {
  AxisOverlap out;
  const double h = box.side / resolution;
  const double lo = box.lower[axis];
  const int i0 = static_cast<int>(std::clamp(std::floor((a - lo) / h), 0.0, double(resolution)));
  const int i1 = static_cast<int>(std::clamp(std::ceil((b - lo) / h), 0.0, double(resolution)));
  out.first = i0;
  for (int i = i0; i < i1; ++i) {
    const double c0 = lo + i * h, c1 = lo + (i + 1) * h;
    out.lengths.push_back(std::max(0.0, std::min(b, c1) - std::max(a, c0)));
  }
  return out;
}

MeasuredSamples cube_samples(const GridFunction& f, const Cube& q) {
  const int n = f.dim();
  std::array<AxisOverlap, 3> ov;
  for (int a = 0; a < n; ++a)
    ov[a] = axis_overlap(f.box(), f.resolution(), a, q.lower[a], q.lower[a] + q.side);
  MeasuredSamples s;
  double inside = 0.0;
  const int c2 = n == 3 ? static_cast<int>(ov[2].lengths.size()) : 1;
  for (int k = 0; k < c2; ++k) {
    const double wk = n == 3 ? ov[2].lengths[k] : 1.0;
    for (std::size_t j = 0; j < ov[1].lengths.size(); ++j) {
      for (std::size_t i = 0; i < ov[0].lengths.size(); ++i) {
        const double m = ov[0].lengths[i] * ov[1].lengths[j] * wk;
        if (m <= 0.0) continue;
        const Eigen::Index idx =
            f.flat_index(ov[0].first + static_cast<int>(i), ov[1].first + static_cast<int>(j),
                         n == 3 ? ov[2].first + k : 0);
        s.add(f[idx], m);
        inside += m;
      }
    }
  }
  const double rest = q.volume() - inside;
  if (rest > 1e-14 * q.volume()) s.add(0.0, rest);
  return s;
}

double cell_average(const GridFunction& f, const Cube& q, double s) {
  if (s < 1.0) throw std::invalid_argument("cell_average power must be >= 1");
  const MeasuredSamples samples = cube_samples(f, q);
  double acc = 0.0;
  for (std::size_t i = 0; i < samples.values.size(); ++i)
    acc += std::pow(std::abs(samples.values[i]), s) * samples.measures[i];
  return std::pow(acc / q.volume(), 1.0 / s);
}

namespace {

template <typename Visit>
long visit_ball_lattice(const GridFunction& f, const Point& x, double t, Visit&& visit) {
  const int n = f.dim();
  const double h = f.spacing();
  std::array<int, 3> lo{0, 0, 0}, hi{0, 0, 0};
  for (int a = 0; a < n; ++a) {
    lo[a] = static_cast<int>(std::ceil((x[a] - t - f.box().lower[a]) / h - 0.5));
    hi[a] = static_cast<int>(std::floor((x[a] + t - f.box().lower[a]) / h - 0.5));
  }
  long count = 0;
  const double t2 = t * t;
  const int R = f.resolution();
  for (int k = lo[2]; k <= hi[2]; ++k) {
    for (int j = lo[1]; j <= hi[1]; ++j) {
      for (int i = lo[0]; i <= hi[0]; ++i) {
        const int idx[3] = {i, j, k};
        double d2 = 0.0;
        bool inside_box = true;
        for (int a = 0; a < n; ++a) {
          const double c = f.box().lower[a] + (idx[a] + 0.5) * h - x[a];
          d2 += c * c;
          if (idx[a] < 0 || idx[a] >= R) inside_box = false;
        }
        if (d2 >= t2) continue;
        ++count;
        visit(inside_box ? f[f.flat_index(i, j, n == 3 ? k : 0)] : 0.0);
      }
    }
  }
  return count;
}

double containing_cell_value(const GridFunction& f, const Point& x) {
  const Eigen::Index c = f.cell_of(x);
  return c < 0 ? 0.0 : f[c];
}

}  // namespace

double ball_average(const GridFunction& f, const Point& x, double t, double s) {
  if (s < 1.0) throw std::invalid_argument("ball_average power must be >= 1");
  double acc = 0.0;
  const long count =
      visit_ball_lattice(f, x, t, [&](double v) { acc += std::pow(std::abs(v), s); });
  if (count == 0) return std::abs(containing_cell_value(f, x));
  return std::pow(acc / count, 1.0 / s);
}

double ball_mean(const GridFunction& f, const Point& x, double t) {
  double acc = 0.0;
  const long count = visit_ball_lattice(f, x, t, [&](double v) { acc += v; });
  if (count == 0) return containing_cell_value(f, x);
  return acc / count;
}

MeasuredSamples ball_samples(const GridFunction& f, const Point& x, double t) {
  MeasuredSamples s;
  const double m = f.cell_volume();
  const long count = visit_ball_lattice(f, x, t, [&](double v) { s.add(v, m); });
  if (count == 0) s.add(containing_cell_value(f, x), m);
  return s;
}

namespace {

void write_u64_le(std::ostream& out, std::uint64_t v) {
  unsigned char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
  out.write(reinterpret_cast<const char*>(b), 8);
}

std::uint64_t read_u64_le(std::istream& in) {
  unsigned char b[8];
  if (!in.read(reinterpret_cast<char*>(b), 8)) throw std::runtime_error("truncated grid file");
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
  return v;
}

}  // namespace

void write_grid_function(std::ostream& out, const GridFunction& f) {
  nlohmann::json header;
  header["n"] = f.dim();
  header["resolution"] = f.resolution();
  header["corpus_id"] = f.corpus_id();
  header["box"] = {{"lower", std::vector<double>(f.box().lower.data(),
                                                 f.box().lower.data() + f.dim())},
                   {"side", f.box().side}};
  const std::string text = header.dump();
  write_u64_le(out, text.size());
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  for (Eigen::Index i = 0; i < f.size(); ++i)
    write_u64_le(out, std::bit_cast<std::uint64_t>(f[i]));
}

GridFunction read_grid_function(std::istream& in) {
  const std::uint64_t len = read_u64_le(in);
  if (len > (1u << 20)) throw std::runtime_error("grid header too large");
  std::string text(len, '\0');
  if (!in.read(text.data(), static_cast<std::streamsize>(len)))
    throw std::runtime_error("truncated grid header");
  const auto header = nlohmann::json::parse(text);
  const int n = header.at("n").get<int>();
  const int res = header.at("resolution").get<int>();
  const auto lower = header.at("box").at("lower").get<std::vector<double>>();
  if (static_cast<int>(lower.size()) != n) throw std::runtime_error("box dimension mismatch");
  Box box(Eigen::Map<const Point>(lower.data(), n), header.at("box").at("side").get<double>());
  Eigen::Index count = 1;
  for (int a = 0; a < n; ++a) count *= res;
  Values v(count);
  for (Eigen::Index i = 0; i < count; ++i) v[i] = std::bit_cast<double>(read_u64_le(in));
  return GridFunction(std::move(box), res, std::move(v), header.value("corpus_id", ""));
}

}  // namespace rlab
