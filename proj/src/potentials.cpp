#include "rlab/potentials.hpp"

#include <complex>
#include <stdexcept>

#include <unsupported/Eigen/FFT>

#include "rlab/local_norms.hpp"
#include "rlab/parallel.hpp"
#include "rlab/quadrature.hpp"

namespace rlab {

namespace {

constexpr int kNearCells = 3;

void check_alpha(int n, double alpha) {
  if (!(alpha > 0.0) || !(alpha < n)) throw std::invalid_argument("alpha must lie in (0, n)");
}

// Panels per face axis: finer when the kernel's peak on the face is narrow.
int panel_count(double length, double dist) {
  if (dist <= 0.0) return 4;
  return static_cast<int>(std::clamp(std::ceil(4.0 * length / dist), 4.0, 64.0));
}

// Integral of |y|^{alpha-n} over the face {y_axis = plane} x prod_b [lo_b, lo_b + side).
double face_integral(int n, double alpha, const Point& lower, double side, int axis, double plane) {
  const auto [gx, gw] = gauss_legendre(8);
  const int other0 = axis == 0 ? 1 : 0;
  const int other1 = n == 3 ? (axis == 2 ? 1 : 2) : -1;
  const double dist = std::abs(plane);
  const int panels = panel_count(side, dist);
  const double ph = side / panels;
  const double e = 0.5 * (alpha - n);
  double acc = 0.0;
  if (n == 2) {
    for (int p = 0; p < panels; ++p) {
      const double a = lower[other0] + p * ph;
      for (int i = 0; i < gx.size(); ++i) {
        const double u = a + 0.5 * ph * (gx[i] + 1.0);
        acc += 0.5 * ph * gw[i] * std::pow(plane * plane + u * u, e);
      }
    }
    return acc;
  }
  for (int p = 0; p < panels; ++p) {
    const double a = lower[other0] + p * ph;
    for (int q = 0; q < panels; ++q) {
      const double b = lower[other1] + q * ph;
      for (int i = 0; i < gx.size(); ++i) {
        const double u = a + 0.5 * ph * (gx[i] + 1.0);
        for (int j = 0; j < gx.size(); ++j) {
          const double v = b + 0.5 * ph * (gx[j] + 1.0);
          acc += 0.25 * ph * ph * gw[i] * gw[j] * std::pow(plane * plane + u * u + v * v, e);
        }
      }
    }
  }
  return acc;
}

// Multi-dimensional FFT by successive 1-d transforms along each axis.
void fft_nd(std::vector<std::complex<double>>& data, int n, long long len, bool inverse) {
  Eigen::FFT<double> fft;
  std::vector<std::complex<double>> line(len), out(len);
  const long long total = static_cast<long long>(data.size());
  long long stride = 1;
  for (int a = 0; a < n; ++a) {
    for (long long base = 0; base < total; ++base) {
      if ((base / stride) % len != 0) continue;
      for (long long i = 0; i < len; ++i) line[i] = data[base + i * stride];
      if (inverse)
        fft.inv(out, line);
      else
        fft.fwd(out, line);
      for (long long i = 0; i < len; ++i) data[base + i * stride] = out[i];
    }
    stride *= len;
  }
}

// Discrete kernel weight for a source cell whose centre sits at offset d
// (in cells) from the target centre.
double kernel_weight(int n, double alpha, double h, const std::array<int, 3>& d) {
  int far = 0;
  double r2 = 0.0;
  for (int a = 0; a < n; ++a) {
    far = std::max(far, std::abs(d[a]));
    r2 += (d[a] * h) * (d[a] * h);
  }
  if (far > kNearCells) return std::pow(h, n) * std::pow(r2, 0.5 * (alpha - n));
  Point lower(n);
  for (int a = 0; a < n; ++a) lower[a] = (d[a] - 0.5) * h;
  return kernel_cube_integral(n, alpha, lower, h);
}

}  // namespace

double riesz_constant(int n, double alpha) {
  check_alpha(n, alpha);
  return std::tgamma(0.5 * (n - alpha)) /
         (std::pow(2.0, alpha) * std::pow(kPi, 0.5 * n) * std::tgamma(0.5 * alpha));
}

double kernel_cube_integral(int n, double alpha, const Point& lower, double side) {
  // div(y |y|^{alpha-n}) = alpha |y|^{alpha-n}; on a face y.nu is the
  // signed plane offset.
  double acc = 0.0;
  for (int a = 0; a < n; ++a) {
    const double lo = lower[a], hi = lower[a] + side;
    if (hi != 0.0) acc += hi * face_integral(n, alpha, lower, side, a, hi);
    if (lo != 0.0) acc -= lo * face_integral(n, alpha, lower, side, a, lo);
  }
  return acc / alpha;
}

GridFunction riesz_potential(const GridFunction& f, double alpha, ConvolutionPath path) {
  const int n = f.dim();
  check_alpha(n, alpha);
  const int R = f.resolution();
  const double h = f.spacing();
  const double c = riesz_constant(n, alpha);
  const long long span = 2LL * R - 1;
  long long kcount = 1;
  for (int a = 0; a < n; ++a) kcount *= span;

  // Kernel over offsets in (-R, R)^n, stored with offset + R - 1.
  std::vector<double> kernel(kcount);
  parallel_for(static_cast<std::size_t>(kcount), [&](std::size_t idx) {
    std::array<int, 3> d{0, 0, 0};
    long long rest = static_cast<long long>(idx);
    for (int a = 0; a < n; ++a) {
      d[a] = static_cast<int>(rest % span) - (R - 1);
      rest /= span;
    }
    kernel[idx] = c * kernel_weight(n, alpha, h, d);
  });

  Values out = Values::Zero(f.size());
  if (path == ConvolutionPath::direct) {
    parallel_for(static_cast<std::size_t>(f.size()), [&](std::size_t i) {
      const auto xi = f.multi_index(static_cast<Eigen::Index>(i));
      double acc = 0.0;
      for (Eigen::Index j = 0; j < f.size(); ++j) {
        if (f[j] == 0.0) continue;
        const auto yj = f.multi_index(j);
        long long k = 0, stride = 1;
        for (int a = 0; a < n; ++a) {
          k += (xi[a] - yj[a] + R - 1) * stride;
          stride *= span;
        }
        acc += kernel[k] * f[j];
      }
      out[static_cast<Eigen::Index>(i)] = acc;
    });
    return f.with_values(std::move(out));
  }

  const long long len = 2LL * R;
  long long total = 1;
  for (int a = 0; a < n; ++a) total *= len;
  std::vector<std::complex<double>> kf(total), ff(total);
  for (long long idx = 0; idx < kcount; ++idx) {
    long long rest = idx, pos = 0, stride = 1;
    for (int a = 0; a < n; ++a) {
      const long long d = rest % span - (R - 1);
      rest /= span;
      pos += ((d + len) % len) * stride;
      stride *= len;
    }
    kf[pos] = kernel[idx];
  }
  for (Eigen::Index j = 0; j < f.size(); ++j) {
    const auto m = f.multi_index(j);
    long long pos = 0, stride = 1;
    for (int a = 0; a < n; ++a) {
      pos += m[a] * stride;
      stride *= len;
    }
    ff[pos] = f[j];
  }
  fft_nd(kf, n, len, false);
  fft_nd(ff, n, len, false);
  for (long long i = 0; i < total; ++i) ff[i] *= kf[i];
  fft_nd(ff, n, len, true);
  for (Eigen::Index j = 0; j < f.size(); ++j) {
    const auto m = f.multi_index(j);
    long long pos = 0, stride = 1;
    for (int a = 0; a < n; ++a) {
      pos += m[a] * stride;
      stride *= len;
    }
    out[j] = ff[pos].real();
  }
  return f.with_values(std::move(out));
}

double riesz_potential_at(const GridFunction& f, double alpha, const Point& x) {
  const int n = f.dim();
  check_alpha(n, alpha);
  const double h = f.spacing();
  double acc = 0.0;
  for (Eigen::Index j = 0; j < f.size(); ++j) {
    if (f[j] == 0.0) continue;
    const Point d = f.center(j) - x;
    if (d.cwiseAbs().maxCoeff() > (kNearCells + 0.5) * h) {
      acc += f[j] * std::pow(h, n) * std::pow(d.squaredNorm(), 0.5 * (alpha - n));
    } else {
      const Point lower = d.array() - 0.5 * h;
      acc += f[j] * kernel_cube_integral(n, alpha, lower, h);
    }
  }
  return riesz_constant(n, alpha) * acc;
}

GridFunction dyadic_fractional(const GridFunction& f, double alpha, const Shift& t, double s) {
  return dyadic_fractional(f, alpha, t, s, level_range(f.box(), f.resolution()));
}

GridFunction dyadic_fractional(const GridFunction& f, double alpha, const Shift& t, double s,
                               const LevelRange& levels) {
  Values out = Values::Zero(f.size());
  LevelTable table(f, levels.k_min, t, s);
  for (int k = levels.k_min; k <= levels.k_max; ++k) {
    if (k > levels.k_min) table = table.parent_level();
    out += std::pow(2.0, k * alpha) * table.gather(table.averages());
  }
  return f.with_values(std::move(out));
}

GridFunction fractional_maximal(const GridFunction& f, double alpha, double s) {
  const int n = f.dim();
  if (alpha < 0.0 || !(s >= 1.0)) throw std::invalid_argument("need alpha >= 0 and s >= 1");
  if (alpha > 0.0 && !(s < n / alpha)) throw std::invalid_argument("need s < n / alpha");
  const LevelRange levels = level_range(f.box(), f.resolution());
  Values out = Values::Zero(f.size());
  for (const Shift& t : all_shifts(n)) {
    LevelTable table(f, levels.k_min, t, s);
    for (int k = levels.k_min; k <= levels.k_max; ++k) {
      if (k > levels.k_min) table = table.parent_level();
      out = out.max(std::pow(2.0, k * alpha) * table.gather(table.averages()));
    }
  }
  return f.with_values(std::move(out));
}

double dyadic_proxy_factor(int n, double alpha, double s) {
  (void)alpha;
  // Q inside Q_t with l(Q) < l(Q_t) <= 6 l(Q): the side factor only helps and
  // the average grows by at most (|Q_t| / |Q|)^{1/s}.
  return std::pow(6.0, n / s);
}

GridFunction lorentz_maximal(const GridFunction& f, double p, double q) {
  const int n = f.dim();
  const LevelRange levels = level_range(f.box(), f.resolution());
  Values out = Values::Zero(f.size());
  for (const Shift& t : all_shifts(n)) {
    LevelTable table(f, levels.k_min, t, 1.0);
    for (int k = levels.k_min; k <= levels.k_max; ++k) {
      if (k > levels.k_min) table = table.parent_level();
      Values per_cube = Values::Zero(table.cube_count());
      for (Eigen::Index c = 0; c < table.cube_count(); ++c)
        if (table.integrals()[c] > 0.0) per_cube[c] = lorentz_average(f, table.cube(c), p, q);
      out = out.max(table.gather(per_cube));
    }
  }
  return f.with_values(std::move(out));
}

}  // namespace rlab
