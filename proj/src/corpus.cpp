#include "rlab/corpus.hpp"

#include <algorithm>
#include <functional>

namespace rlab {

namespace {

double param(const Params& p, const std::string& key, double fallback) {
  const auto it = p.find(key);
  return it == p.end() ? fallback : it->second;
}

Point center_param(const Params& p, int dim) {
  Point c(dim);
  const char* keys[3] = {"cx", "cy", "cz"};
  for (int a = 0; a < dim; ++a) c[a] = param(p, keys[a], 0.0);
  return c;
}

class Zero final : public Expression {
 public:
  explicit Zero(int dim) : dim_(dim) {}
  double value(const Point&) const override { return 0.0; }
  std::optional<Point> gradient(const Point&) const override { return Point::Zero(dim_); }
  double support_radius() const override { return 0.0; }

 private:
  int dim_;
};

class Constant final : public Expression {
 public:
  Constant(int dim, double c) : dim_(dim), c_(c) {}
  double value(const Point&) const override { return c_; }
  std::optional<Point> gradient(const Point&) const override { return Point::Zero(dim_); }
  bool compactly_supported() const override { return false; }

 private:
  int dim_;
  double c_;
};

class Linear final : public Expression {
 public:
  Linear(int dim, int axis, double slope) : dim_(dim), axis_(axis), slope_(slope) {}
  double value(const Point& x) const override { return slope_ * x[axis_]; }
  std::optional<Point> gradient(const Point&) const override {
    Point g = Point::Zero(dim_);
    g[axis_] = slope_;
    return g;
  }
  bool compactly_supported() const override { return false; }

 private:
  int dim_, axis_;
  double slope_;
};

// sum_a (a+1) x_a^2 + x_0 x_1
class Quadratic final : public Expression {
 public:
  explicit Quadratic(int dim) : dim_(dim) {}
  double value(const Point& x) const override {
    double v = x[0] * x[1];
    for (int a = 0; a < dim_; ++a) v += (a + 1) * x[a] * x[a];
    return v;
  }
  std::optional<Point> gradient(const Point& x) const override {
    Point g(dim_);
    for (int a = 0; a < dim_; ++a) g[a] = 2.0 * (a + 1) * x[a];
    g[0] += x[1];
    g[1] += x[0];
    return g;
  }
  bool compactly_supported() const override { return false; }

 private:
  int dim_;
};

// amplitude * exp(1 / (rho^2 - 1)), rho = |x - c| / radius
class RadialBump final : public Expression {
 public:
  RadialBump(Point c, double radius, double amplitude)
      : c_(std::move(c)), r_(radius), amp_(amplitude) {}
  double value(const Point& x) const override {
    const double rho2 = (x - c_).squaredNorm() / (r_ * r_);
    return rho2 < 1.0 ? amp_ * std::exp(1.0 / (rho2 - 1.0)) : 0.0;
  }
  std::optional<Point> gradient(const Point& x) const override {
    const Point d = x - c_;
    const double rho2 = d.squaredNorm() / (r_ * r_);
    if (rho2 >= 1.0) return Point::Zero(d.size());
    const double e = amp_ * std::exp(1.0 / (rho2 - 1.0));
    const double q = rho2 - 1.0;
    return Point(-e / (q * q) * 2.0 / (r_ * r_) * d);
  }
  double support_radius() const override { return c_.norm() + r_; }

 private:
  Point c_;
  double r_, amp_;
};

class TensorBump final : public Expression {
 public:
  TensorBump(Point c, double radius, double amplitude)
      : c_(std::move(c)), r_(radius), amp_(amplitude) {}
  double value(const Point& x) const override {
    double v = amp_;
    for (int a = 0; a < x.size(); ++a) {
      const double u = (x[a] - c_[a]) / r_;
      if (u * u >= 1.0) return 0.0;
      v *= std::exp(1.0 / (u * u - 1.0));
    }
    return v;
  }
  std::optional<Point> gradient(const Point& x) const override {
    const double v = value(x);
    Point g = Point::Zero(x.size());
    if (v == 0.0) return g;
    for (int a = 0; a < x.size(); ++a) {
      const double u = (x[a] - c_[a]) / r_;
      const double q = u * u - 1.0;
      g[a] = v * (-2.0 * u / (q * q)) / r_;
    }
    return g;
  }
  double support_radius() const override {
    return c_.norm() + r_ * std::sqrt(static_cast<double>(c_.size()));
  }

 private:
  Point c_;
  double r_, amp_;
};

double psi(double v) { return v > 0.0 ? std::exp(-1.0 / v) : 0.0; }
double dpsi(double v) { return v > 0.0 ? std::exp(-1.0 / v) / (v * v) : 0.0; }

// Smooth cutoff: 1 for u <= 1/2, 0 for u >= 1.
double cutoff(double u) {
  const double a = psi(1.0 - u), b = psi(u - 0.5);
  return a / (a + b);
}
double dcutoff(double u) {
  const double a = psi(1.0 - u), b = psi(u - 0.5);
  const double s = a + b;
  return (-dpsi(1.0 - u) * b - a * dpsi(u - 0.5)) / (s * s);
}

// log(e / sqrt(|x|^2 + delta^2))^gamma, smoothly cut off at |x| = radius.
class LogPower final : public Expression {
 public:
  LogPower(double gamma, double delta, double radius) : g_(gamma), d_(delta), r_(radius) {}
  double value(const Point& x) const override {
    const double rr = x.norm();
    if (rr >= r_) return 0.0;
    return std::pow(log_term(x), g_) * cutoff(rr / r_);
  }
  std::optional<Point> gradient(const Point& x) const override {
    const double rr = x.norm();
    if (rr >= r_) return Point::Zero(x.size());
    const double L = log_term(x);
    const double chi = cutoff(rr / r_);
    Point g = g_ * std::pow(L, g_ - 1.0) * chi * (-x / (x.squaredNorm() + d_ * d_));
    if (rr > 0.0) g += std::pow(L, g_) * dcutoff(rr / r_) / r_ * (x / rr);
    return g;
  }
  double support_radius() const override { return r_; }

 private:
  double log_term(const Point& x) const { return 1.0 - 0.5 * std::log(x.squaredNorm() + d_ * d_); }
  double g_, d_, r_;
};

// C^1 indicator of B(0, radius) with a cubic transition of width `width`.
class SmoothStep final : public Expression {
 public:
  SmoothStep(double radius, double width) : r_(radius), w_(width) {}
  double value(const Point& x) const override {
    const double u = std::clamp((r_ - x.norm()) / w_, 0.0, 1.0);
    return u * u * (3.0 - 2.0 * u);
  }
  std::optional<Point> gradient(const Point& x) const override {
    const double rr = x.norm();
    const double u = (r_ - rr) / w_;
    if (u <= 0.0 || u >= 1.0 || rr == 0.0) return Point::Zero(x.size());
    return Point(-6.0 * u * (1.0 - u) / w_ * (x / rr));
  }
  double support_radius() const override { return r_; }

 private:
  double r_, w_;
};

class BallIndicator final : public Expression {
 public:
  BallIndicator(Point c, double radius) : c_(std::move(c)), r_(radius) {}
  double value(const Point& x) const override { return (x - c_).norm() < r_ ? 1.0 : 0.0; }
  double support_radius() const override { return c_.norm() + r_; }

 private:
  Point c_;
  double r_;
};

// Indicator of the half-open cube [lo, lo + side)^n.
class CubeIndicator final : public Expression {
 public:
  CubeIndicator(double lo, double side) : lo_(lo), side_(side) {}
  double value(const Point& x) const override {
    for (int a = 0; a < x.size(); ++a)
      if (x[a] < lo_ || x[a] >= lo_ + side_) return 0.0;
    return 1.0;
  }
  double support_radius() const override {
    return std::max(std::abs(lo_), std::abs(lo_ + side_)) * std::sqrt(3.0);
  }

 private:
  double lo_, side_;
};

// Indicator of {x_axis < cut}.
class HalfSpace final : public Expression {
 public:
  HalfSpace(int axis, double cut) : axis_(axis), cut_(cut) {}
  double value(const Point& x) const override { return x[axis_] < cut_ ? 1.0 : 0.0; }
  bool compactly_supported() const override { return false; }

 private:
  int axis_;
  double cut_;
};

using Factory = std::function<std::shared_ptr<const Expression>(const Params&, int)>;

const std::map<std::string, Factory>& registry() {
  static const std::map<std::string, Factory> r = {
      {"zero", [](const Params&, int n) { return std::make_shared<Zero>(n); }},
      {"constant",
       [](const Params& p, int n) { return std::make_shared<Constant>(n, param(p, "c", 1.0)); }},
      {"linear",
       [](const Params& p, int n) {
         return std::make_shared<Linear>(n, static_cast<int>(param(p, "axis", 0)),
                                         param(p, "slope", 1.0));
       }},
      {"quadratic", [](const Params&, int n) { return std::make_shared<Quadratic>(n); }},
      {"bump",
       [](const Params& p, int n) {
         return std::make_shared<RadialBump>(center_param(p, n), param(p, "radius", 1.0),
                                             param(p, "amplitude", 1.0));
       }},
      {"tensor_bump",
       [](const Params& p, int n) {
         return std::make_shared<TensorBump>(center_param(p, n), param(p, "radius", 1.0),
                                             param(p, "amplitude", 1.0));
       }},
      {"logpow",
       [](const Params& p, int n) {
         // Default exponent 1/(2n'), inside (0, 1 - 1/n) so the function
         // has gradient in L^n while being unbounded as delta -> 0.
         const double nprime = n / (n - 1.0);
         return std::make_shared<LogPower>(param(p, "gamma", 0.5 / nprime),
                                           param(p, "delta", 0.0), param(p, "radius", 1.0));
       }},
      {"smooth_step",
       [](const Params& p, int) {
         return std::make_shared<SmoothStep>(param(p, "radius", 1.0), param(p, "width", 0.5));
       }},
      {"ball_indicator",
       [](const Params& p, int n) {
         return std::make_shared<BallIndicator>(center_param(p, n), param(p, "radius", 1.0));
       }},
      {"cube_indicator",
       [](const Params& p, int) {
         return std::make_shared<CubeIndicator>(param(p, "lo", 0.0), param(p, "side", 1.0));
       }},
      {"half_space",
       [](const Params& p, int) {
         return std::make_shared<HalfSpace>(static_cast<int>(param(p, "axis", 0)),
                                            param(p, "cut", 0.0));
       }},
  };
  return r;
}

}  // namespace

std::vector<std::string> corpus_ids() {
  std::vector<std::string> ids;
  for (const auto& [k, _] : registry()) ids.push_back(k);
  return ids;
}

std::shared_ptr<const Expression> make_expression(const std::string& id, const Params& params,
                                                  int dim) {
  require_dimension(dim);
  const auto it = registry().find(id);
  if (it == registry().end()) throw std::invalid_argument("unknown corpus expression: " + id);
  return it->second(params, dim);
}

GridFunction sample(const std::string& id, const Params& params, const Box& box, int resolution,
                    bool waive_margin) {
  if (!is_power_of_two(resolution) || resolution < 16)
    throw std::invalid_argument("resolution must be a power of two >= 16");
  Params p = params;
  if (id == "logpow" && param(p, "delta", 0.0) <= 0.0) p["delta"] = box.side / resolution;
  auto expr = make_expression(id, p, box.dim());
  Eigen::Index count = 1;
  for (int a = 0; a < box.dim(); ++a) count *= resolution;
  GridFunction shape(box, resolution, Values::Zero(count));
  Values v(count);
  for (Eigen::Index i = 0; i < count; ++i) {
    v[i] = expr->value(shape.center(i));
    // Underflow debris from exponential tails would otherwise reach the
    // multi-scale sums as meaningless sub-normal levels.
    if (std::abs(v[i]) < 1e-200) v[i] = 0.0;
  }
  const bool enforce = !waive_margin && expr->compactly_supported();
  return GridFunction(box, resolution, std::move(v), id, std::move(expr), enforce);
}

bool vanishes_near_boundary(const GridFunction& f, int cells) {
  const int R = f.resolution();
  for (Eigen::Index i = 0; i < f.size(); ++i) {
    if (f[i] == 0.0) continue;
    const auto idx = f.multi_index(i);
    for (int a = 0; a < f.dim(); ++a)
      if (idx[a] < cells || idx[a] >= R - cells) return false;
  }
  return true;
}

}  // namespace rlab
