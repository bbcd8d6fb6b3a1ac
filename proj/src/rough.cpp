#include "rlab/rough.hpp"

#include <stdexcept>

#include "rlab/parallel.hpp"
#include "rlab/quadrature.hpp"

namespace rlab {

namespace {

constexpr int kMaxShells = 40;

int max_directions(int dim) { return dim == 2 ? 256 : 2048; }

// Largest divisor of `total` not exceeding `limit` (at least 1).
int divisor_at_most(int total, int limit) {
  limit = std::max(1, std::min(limit, total));
  for (int g = limit; g > 1; --g)
    if (total % g == 0) return g;
  return 1;
}

int ceil_pow2(double v) {
  int p = 1;
  while (p < v && p < (1 << 29)) p *= 2;
  return p;
}

AngularRule merge_bins(const SphereSymbol& omega, const std::vector<std::vector<int>>& bins) {
  const int n = omega.dim;
  AngularRule rule;
  const auto count = static_cast<Eigen::Index>(bins.size());
  rule.dirs.resize(n, count);
  rule.signed_w = Values::Zero(count);
  rule.abs_w = Values::Zero(count);
  rule.plain_w = Values::Zero(count);
  for (Eigen::Index b = 0; b < count; ++b) {
    Eigen::VectorXd d = Eigen::VectorXd::Zero(n);
    for (int j : bins[b]) {
      const double w = omega.weights[j];
      d += w * omega.nodes.col(j);
      rule.signed_w[b] += w * omega.values[j];
      rule.abs_w[b] += w * std::abs(omega.values[j]);
      rule.plain_w[b] += w;
    }
    d.normalize();
    rule.dirs.col(b) = d;
    for (int j : bins[b])
      rule.half_width = std::max(
          rule.half_width, std::acos(std::clamp(d.dot(omega.nodes.col(j)), -1.0, 1.0)));
  }
  return rule;
}

// Angular rule for the circle (or sphere) of radius 2^level h.
AngularRule build_rule(const SphereSymbol& omega, int level, int cap) {
  const double r_over_h = std::ldexp(1.0, level);
  const auto total = static_cast<int>(omega.size());
  std::vector<std::vector<int>> bins;
  if (omega.dim == 2) {
    const int want = std::clamp(ceil_pow2(4.0 * kPi * r_over_h), 8, cap);
    const int g = divisor_at_most(total, total / want);
    for (int b = 0; b < total / g; ++b) {
      bins.emplace_back();
      for (int j = 0; j < g; ++j) bins.back().push_back(b * g + j);
    }
    return merge_bins(omega, bins);
  }
  // Product mesh: `polar` rings of 2 * polar azimuths each.
  const int polar = static_cast<int>(std::lround(std::sqrt(total / 2.0)));
  const int az = total / polar;
  const int want_polar =
      std::clamp(ceil_pow2(2.0 * kPi * r_over_h), 4,
                 static_cast<int>(std::sqrt(cap / 2.0)));
  const int gp = divisor_at_most(polar, polar / want_polar);
  const int ga = divisor_at_most(az, az / (2 * want_polar));
  for (int i = 0; i < polar; i += gp)
    for (int j = 0; j < az; j += ga) {
      bins.emplace_back();
      for (int ii = i; ii < i + gp; ++ii)
        for (int jj = j; jj < j + ga; ++jj) bins.back().push_back(ii * az + jj);
    }
  return merge_bins(omega, bins);
}

double sample(const GridFunction& f, const Point& x, double r, const Eigen::MatrixXd& dirs,
              Eigen::Index b) {
  if (f.dim() == 2) return f.interpolate2(x[0] - r * dirs(0, b), x[1] - r * dirs(1, b));
  return f.interpolate3(x[0] - r * dirs(0, b), x[1] - r * dirs(1, b), x[2] - r * dirs(2, b));
}

void require_mean_zero(const SphereSymbol& omega) {
  const double scale = std::max(1.0, omega.l1_norm());
  if (std::abs(omega.integral()) > 1e-10 * scale)
    throw std::invalid_argument("symbol must have mean zero on the sphere");
}

void require_dim_match(const GridFunction& f, const SphereSymbol& omega) {
  if (f.dim() != omega.dim) throw std::invalid_argument("symbol and function dimensions differ");
}

template <typename Fn>
PointValues evaluate(const GridFunction& f, const std::vector<Eigen::Index>& cells, Fn&& fn) {
  PointValues out;
  out.cells = cells;
  out.values = Values::Zero(static_cast<Eigen::Index>(cells.size()));
  out.argmax_radius = Values::Zero(static_cast<Eigen::Index>(cells.size()));
  parallel_for(cells.size(), [&](std::size_t i) {
    const auto [v, r] = fn(f.center(cells[i]));
    out.values[static_cast<Eigen::Index>(i)] = v;
    out.argmax_radius[static_cast<Eigen::Index>(i)] = r;
  });
  return out;
}

}  // namespace

std::vector<Eigen::Index> all_cells(const GridFunction& f) {
  std::vector<Eigen::Index> out(static_cast<std::size_t>(f.size()));
  for (Eigen::Index i = 0; i < f.size(); ++i) out[static_cast<std::size_t>(i)] = i;
  return out;
}

std::vector<Eigen::Index> cell_lattice(const GridFunction& f, int stride) {
  if (stride <= 1) return all_cells(f);
  std::vector<Eigen::Index> out;
  const int R = f.resolution();
  const int off = stride / 2;
  if (f.dim() == 2) {
    for (int j = off; j < R; j += stride)
      for (int i = off; i < R; i += stride) out.push_back(f.flat_index(i, j));
  } else {
    for (int k = off; k < R; k += stride)
      for (int j = off; j < R; j += stride)
        for (int i = off; i < R; i += stride) out.push_back(f.flat_index(i, j, k));
  }
  return out;
}

PolarSampler::PolarSampler(const SphereSymbol& omega, double h, int radial_nodes, int max_bins)
    : omega_(omega), h_(h) {
  const int cap = max_bins > 0 ? max_bins : max_directions(omega.dim);
  for (int j = 0; j <= kMaxShells; ++j) {
    const double outer = shell_outer(j);
    const double inner = j == 0 ? 0.0 : 0.5 * outer;
    shells_.push_back(gauss_legendre(radial_nodes, inner, outer));
  }
  for (int level = 0; level <= kMaxShells; ++level) rules_.emplace(level, build_rule(omega_, level, cap));
}

const AngularRule& PolarSampler::rule(double r) const {
  const int level = std::clamp(static_cast<int>(std::ceil(std::log2(std::max(r / h_, 1.0)))), 0,
                               kMaxShells);
  return rules_.at(level);
}

int PolarSampler::shells_for(const GridFunction& f, const Point& x) const {
  double reach = 0.0;
  const Box& b = f.box();
  for (int c = 0; c < (1 << b.dim()); ++c) {
    Point corner = b.lower;
    for (int a = 0; a < b.dim(); ++a)
      if ((c >> a) & 1) corner[a] += b.side;
    reach = std::max(reach, (corner - x).norm());
  }
  reach += h_;
  int j = 0;
  while (shell_outer(j) < reach && j < kMaxShells) ++j;
  return j;
}

double lipschitz_bound(const GridFunction& f) {
  return gradient(f).magnitude().values().maxCoeff();
}

double hessian_bound(const GridFunction& f) {
  double out = 0.0;
  for (const GridFunction& g : gradient(f).components) out = std::max(out, lipschitz_bound(g));
  return out * std::sqrt(static_cast<double>(f.dim()));
}

PointValues rough_singular(const GridFunction& f, const SphereSymbol& omega, double alpha,
                           const std::vector<Eigen::Index>& cells, Cancellation mode) {
  require_dim_match(f, omega);
  require_mean_zero(omega);
  const int n = f.dim();
  if (!(alpha > 0.0) || !(alpha < n)) throw std::invalid_argument("alpha must lie in (0, n)");
  const PolarSampler sampler(omega, f.spacing());
  const double h = f.spacing();
  const double vn = unit_ball_volume(n);
  // First moment of Omega: the ball |y| < h contributes
  // -(grad f(x) . moment) h^alpha / alpha up to second order.
  const Eigen::VectorXd moment = omega.nodes * (omega.weights * omega.values).matrix();
  const VectorField grad = gradient(f);

  PointValues out = evaluate(f, cells, [&](const Point& x) {
    const int J = sampler.shells_for(f, x);
    const double fx = f.interpolate(x);
    const Eigen::Index cell = f.cell_of(x);
    double inner = 0.0;
    for (int a = 0; a < n; ++a) inner -= grad.components[a][cell] * moment[a];
    double ball = 0.0, total = inner * std::pow(h, alpha) / alpha;
    for (int j = 0; j <= J; ++j) {
      const auto& [rn, rw] = sampler.shell(j);
      double shell_t = 0.0, shell_mass = 0.0;
      for (Eigen::Index q = 0; q < rn.size(); ++q) {
        const double r = rn[q];
        const AngularRule& rule = sampler.rule(r);
        double s_signed = 0.0, s_plain = 0.0;
        for (Eigen::Index b = 0; b < rule.dirs.cols(); ++b) {
          const double v = sample(f, x, r, rule.dirs, b);
          s_signed += rule.signed_w[b] * v;
          s_plain += rule.plain_w[b] * v;
        }
        ball += rw[q] * std::pow(r, n - 1) * s_plain;
        if (j > 0) {
          const double kern = rw[q] * std::pow(r, alpha - 2.0);
          shell_t += kern * s_signed;
          shell_mass += kern * rule.signed_w.sum();
        }
      }
      if (j == 0) continue;
      const double c =
          mode == Cancellation::ball_average ? ball / (vn * std::pow(sampler.shell_outer(j), n)) : fx;
      total += shell_t - c * shell_mass;
    }
    return std::pair{total, 0.0};
  });

  const double l1 = omega.l1_norm();
  const double lip = lipschitz_bound(f);
  double bound = l1 * hessian_bound(f) * std::pow(h, alpha + 1.0) / (2.0 * (alpha + 1.0));
  for (int j = 1; j <= kMaxShells && sampler.shell_outer(j - 1) < 4.0 * f.box().side * n; ++j) {
    const auto& [rn, rw] = sampler.shell(j);
    for (Eigen::Index q = 0; q < rn.size(); ++q)
      bound += rw[q] * std::pow(rn[q], alpha - 1.0) * l1 * lip * sampler.rule(rn[q]).half_width;
  }
  out.error_bound = bound;
  return out;
}

PointValues nonlinear_frac_derivative(const GridFunction& f, double alpha,
                                      const std::vector<Eigen::Index>& cells) {
  if (!(alpha > 0.0) || !(alpha < 1.0)) throw std::invalid_argument("alpha must lie in (0, 1)");
  const int n = f.dim();
  const SphereSymbol ones = make_symbol("one", n);
  const PolarSampler sampler(ones, f.spacing());
  const double omega_n = sphere_area(n);

  PointValues out = evaluate(f, cells, [&](const Point& x) {
    const int J = sampler.shells_for(f, x);
    const double fx = f.interpolate(x);
    double total = 0.0;
    for (int j = 1; j <= J; ++j) {
      const auto& [rn, rw] = sampler.shell(j);
      for (Eigen::Index q = 0; q < rn.size(); ++q) {
        const double r = rn[q];
        const AngularRule& rule = sampler.rule(r);
        double s = 0.0;
        for (Eigen::Index b = 0; b < rule.dirs.cols(); ++b)
          s += rule.plain_w[b] * std::abs(sample(f, x, r, rule.dirs, b) - fx);
        total += rw[q] * std::pow(r, alpha - 2.0) * s;
      }
    }
    // Beyond the last shell f vanishes, leaving |f(x)| against the kernel tail.
    total += std::abs(fx) * omega_n * std::pow(sampler.shell_outer(J), alpha - 1.0) / (1.0 - alpha);
    return std::pair{total, 0.0};
  });

  const double lip = lipschitz_bound(f);
  double bound = lip * omega_n * std::pow(f.spacing(), alpha) / alpha;
  for (int j = 1; j <= kMaxShells && sampler.shell_outer(j - 1) < 4.0 * f.box().side * n; ++j) {
    const auto& [rn, rw] = sampler.shell(j);
    for (Eigen::Index q = 0; q < rn.size(); ++q)
      bound += rw[q] * std::pow(rn[q], alpha - 1.0) * omega_n * lip * sampler.rule(rn[q]).half_width;
  }
  out.error_bound = bound;
  return out;
}

std::vector<MaximalSample> ball_maximal_profile(const PolarSampler& sampler, const GridFunction& f,
                                                const Point& x, double alpha) {
  const int n = f.dim();
  const int J = sampler.shells_for(f, x);
  const double vn = unit_ball_volume(n);
  struct Node {
    double value;
    double weight;  // radial weight times r^{n-1}
    const AngularRule* rule;
    Eigen::Index bin;
  };
  std::vector<Node> nodes;
  std::vector<MaximalSample> out;
  double rough = 0.0, natural = 0.0, plain = 0.0, mean = 0.0;
  for (int j = 0; j <= J; ++j) {
    const auto& [rn, rw] = sampler.shell(j);
    for (Eigen::Index q = 0; q < rn.size(); ++q) {
      const double r = rn[q];
      const AngularRule& rule = sampler.rule(r);
      const double wr = rw[q] * std::pow(r, n - 1);
      for (Eigen::Index b = 0; b < rule.dirs.cols(); ++b) {
        const double v = sample(f, x, r, rule.dirs, b);
        nodes.push_back({v, wr, &rule, b});
        rough += wr * rule.abs_w[b] * std::abs(v);
        natural += wr * rule.signed_w[b] * v;
        plain += wr * rule.plain_w[b] * std::abs(v);
        mean += wr * rule.plain_w[b] * v;
      }
    }
    const double t = sampler.shell_outer(j);
    const double vol = vn * std::pow(t, n);
    const double fb = mean / vol;
    double sharp = 0.0;
    for (const Node& nd : nodes) sharp += nd.weight * nd.rule->abs_w[nd.bin] * std::abs(nd.value - fb);
    const double scale = std::pow(t, alpha - 1.0) / vol;
    out.push_back({t, scale * rough, scale * std::abs(natural), scale * sharp, scale * plain});
  }
  return out;
}

namespace {

template <typename Pick>
PointValues profile_sup(const GridFunction& f, const SphereSymbol& omega, double alpha,
                        const std::vector<Eigen::Index>& cells, Pick&& pick) {
  const PolarSampler sampler(omega, f.spacing());
  PointValues out = evaluate(f, cells, [&](const Point& x) {
    double best = 0.0, at = 0.0;
    for (const MaximalSample& s : ball_maximal_profile(sampler, f, x, alpha)) {
      const double v = pick(s);
      if (v > best) {
        best = v;
        at = s.radius;
      }
    }
    return std::pair{best, at};
  });
  out.error_bound = binning_bound(sampler, f, alpha);
  return out;
}

}  // namespace

double binning_bound(const PolarSampler& sampler, const GridFunction& f, double alpha) {
  // Binning turns each sample at radius r through at most half_width, which
  // moves it by r * half_width on the same circle and shifts a ball mean of
  // |Omega||f| by at most (||Omega||_1 / omega) lip times the largest move.
  // Samples farther than the box diameter stay outside the box, so the ball
  // of radius t > diam carries the factor (diam / t)^n.
  const int n = f.dim();
  const double lip = lipschitz_bound(f);
  const double scale = sampler.symbol().l1_norm() / sphere_area(n);
  const double diam = f.box().side * std::sqrt(static_cast<double>(n));
  double move = 0.0, bound = 0.0;
  for (int level = 0; level <= kMaxShells; ++level) {
    const double t = std::ldexp(f.spacing(), level);
    const auto& [rn, rw] = sampler.shell(level);
    for (Eigen::Index q = 0; q < rn.size(); ++q)
      if (rn[q] <= diam) move = std::max(move, rn[q] * sampler.rule(rn[q]).half_width);
    const double tail = t > diam ? std::pow(diam / t, n) : 1.0;
    bound = std::max(bound, std::pow(t, alpha - 1.0) * scale * lip * move * tail);
    if (t > diam) break;
  }
  return bound;
}

PointValues rough_maximal(const GridFunction& f, const SphereSymbol& omega, double alpha,
                          const std::vector<Eigen::Index>& cells) {
  require_dim_match(f, omega);
  if (alpha < 1.0 || !(alpha < f.dim())) throw std::invalid_argument("alpha must lie in [1, n)");
  return profile_sup(f, omega, alpha, cells, [](const MaximalSample& s) { return s.rough; });
}

PointValues natural_rough_maximal(const GridFunction& f, const SphereSymbol& omega, double alpha,
                                  const std::vector<Eigen::Index>& cells) {
  require_dim_match(f, omega);
  require_mean_zero(omega);
  if (!(alpha > 0.0) || !(alpha < f.dim())) throw std::invalid_argument("alpha must lie in (0, n)");
  return profile_sup(f, omega, alpha, cells, [](const MaximalSample& s) { return s.natural; });
}

PointValues sharp_rough_maximal(const GridFunction& f, const SphereSymbol& omega, double alpha,
                                const std::vector<Eigen::Index>& cells) {
  require_dim_match(f, omega);
  if (!(alpha > 0.0) || !(alpha < f.dim())) throw std::invalid_argument("alpha must lie in (0, n)");
  return profile_sup(f, omega, alpha, cells, [](const MaximalSample& s) { return s.sharp; });
}

PointValues ball_fractional_maximal(const GridFunction& f, double beta,
                                    const std::vector<Eigen::Index>& cells) {
  if (beta < 0.0 || !(beta < f.dim())) throw std::invalid_argument("beta must lie in [0, n)");
  return profile_sup(f, make_symbol("one", f.dim()), beta + 1.0, cells,
                     [](const MaximalSample& s) { return s.plain; });
}

PointValues spherical_maximal(const GridFunction& f, double beta,
                              const std::vector<Eigen::Index>& cells) {
  const int n = f.dim();
  if (beta < 0.0 || !(beta < n - 1)) throw std::invalid_argument("beta must lie in [0, n-1)");
  const PolarSampler sampler(make_symbol("one", n), f.spacing());
  const double area = sphere_area(n);
  PointValues out = evaluate(f, cells, [&](const Point& x) {
    const int J = sampler.shells_for(f, x);
    double best = 0.0, at = 0.0;
    for (int i = 0; i <= 8 * J; ++i) {
      const double r = f.spacing() * std::exp2(i / 8.0);
      const AngularRule& rule = sampler.rule(r);
      double s = 0.0;
      for (Eigen::Index b = 0; b < rule.dirs.cols(); ++b)
        s += rule.plain_w[b] * std::abs(sample(f, x, r, rule.dirs, b));
      const double v = std::pow(r, beta) * s / area;
      if (v > best) {
        best = v;
        at = r;
      }
    }
    return std::pair{best, at};
  });
  out.error_bound = 0.0;
  return out;
}

}  // namespace rlab
