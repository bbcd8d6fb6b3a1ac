#include "doctest.h"
#include "rlab/corpus.hpp"
#include "rlab/potentials.hpp"
#include "rlab/rough.hpp"
#include "rlab/sphere.hpp"

using namespace rlab;

namespace {

Box square() { return Box(Point::Constant(2, -2.0), 4.0); }

GridFunction bump(int R, double cx = 0.1, double cy = -0.2) {
  return sample("bump", {{"cx", cx}, {"cy", cy}, {"radius", 1.2}}, square(), R);
}

}  // namespace

TEST_SUITE("rough_ops") {
  TEST_CASE("first-coordinate symbol against the derivative potential") {
    // For Omega(y') = y_1 the kernel is y_1 |y|^{alpha-2-n}, the x_1
    // derivative of |y|^{alpha-n} / (alpha - n); so T f = I_alpha(d_1 f) /
    // ((alpha - n) c_{n,alpha}).
    const GridFunction f = bump(128);
    const GridFunction d1 = gradient(f).components[0];
    const SphereSymbol omega = make_symbol("harmonic1", 2);
    const auto cells = cell_lattice(f, 8);
    for (double alpha : {0.5, 1.0, 1.5}) {
      const PointValues T = rough_singular(f, omega, alpha, cells);
      const GridFunction I = riesz_potential(d1, alpha);
      const double scale = 1.0 / ((alpha - 2.0) * riesz_constant(2, alpha));
      double err = 0.0, top = 0.0;
      for (std::size_t i = 0; i < cells.size(); ++i) {
        const double oracle = scale * I[cells[i]];
        err = std::max(err, std::abs(T.values[static_cast<Eigen::Index>(i)] - oracle));
        top = std::max(top, std::abs(oracle));
      }
      MESSAGE("alpha " << alpha << ": max error " << err << " of " << top << ", bound " << T.error_bound);
      CHECK(err <= 0.01 * top);
    }
  }

  TEST_CASE("zero input and zero symbol") {
    const GridFunction z = sample("zero", {}, square(), 64);
    const auto cells = cell_lattice(z, 8);
    CHECK(rough_singular(z, make_symbol("sign", 2), 1.0, cells).values.abs().maxCoeff() == 0.0);
    const GridFunction f = bump(64);
    CHECK(rough_singular(f, make_symbol("zero", 2), 1.0, cells).values.abs().maxCoeff() == 0.0);
    CHECK(sharp_rough_maximal(f, make_symbol("zero", 2), 1.0, cells).values.abs().maxCoeff() == 0.0);
    CHECK(spherical_maximal(z, 0.5, cells).values.abs().maxCoeff() == 0.0);
  }

  TEST_CASE("parameter and symbol requirements") {
    const GridFunction f = bump(64);
    const auto cells = cell_lattice(f, 16);
    CHECK_THROWS_AS(rough_singular(f, make_symbol("one", 2), 1.0, cells), std::invalid_argument);
    CHECK_THROWS_AS(rough_singular(f, make_symbol("sign", 2), 2.0, cells), std::invalid_argument);
    CHECK_THROWS_AS(rough_maximal(f, make_symbol("one", 2), 0.5, cells), std::invalid_argument);
    CHECK_THROWS_AS(rough_singular(f, make_symbol("sign", 3), 1.0, cells), std::invalid_argument);
  }

  TEST_CASE("hypersingular bound below order one") {
    const GridFunction f = bump(64);
    const auto cells = cell_lattice(f, 4);
    for (const char* id : {"harmonic1", "sign", "harmonic2"}) {
      const SphereSymbol omega = make_symbol(id, 2);
      const double sup = sphere_norm(omega, SymbolNorm::sup);
      for (double alpha : {0.25, 0.5, 0.75}) {
        const PointValues T = rough_singular(f, omega, alpha, cells);
        const PointValues D = nonlinear_frac_derivative(f, alpha, cells);
        const Values excess = T.values.abs() - sup * D.values - T.error_bound - D.error_bound;
        CHECK(excess.maxCoeff() <= 0.0);
      }
    }
  }

  TEST_CASE("fractional derivative is positively homogeneous") {
    const GridFunction f = bump(64);
    const auto cells = cell_lattice(f, 8);
    const PointValues a = nonlinear_frac_derivative(f, 0.5, cells);
    const PointValues b = nonlinear_frac_derivative(f.with_values(-3.0 * f.values()), 0.5, cells);
    CHECK((b.values - 3.0 * a.values).abs().maxCoeff() <= 1e-12 * b.values.maxCoeff());
  }

  TEST_CASE("constant symbol at order one is the ball maximal function") {
    const GridFunction f = bump(64);
    const auto cells = cell_lattice(f, 8);
    const PointValues rough = rough_maximal(f, make_symbol("one", 2), 1.0, cells);
    const PointValues ball = ball_fractional_maximal(f, 0.0, cells);
    CHECK((rough.values - ball.values).abs().maxCoeff() <= 1e-10 * ball.values.maxCoeff());
  }

  TEST_CASE("maximal operators are monotone and homogeneous") {
    const GridFunction f = bump(64);
    const GridFunction g = f.with_values(f.values() + sample("tensor_bump", {{"radius", 0.8}}, square(), 64).values());
    const auto cells = cell_lattice(f, 8);
    const SphereSymbol omega = make_symbol("llog", 2);
    const Values mf = rough_maximal(f, omega, 1.5, cells).values;
    CHECK((rough_maximal(g, omega, 1.5, cells).values - mf).minCoeff() >= -1e-14);
    const Values m2 = rough_maximal(f.with_values(2.0 * f.values()), omega, 1.5, cells).values;
    CHECK((m2 - 2.0 * mf).abs().maxCoeff() <= 1e-12 * m2.maxCoeff());
  }

  TEST_CASE("natural below sharp at every radius") {
    const GridFunction f = bump(64);
    const SphereSymbol omega = make_symbol("sign", 2);
    const PolarSampler sampler(omega, f.spacing());
    for (Eigen::Index c : cell_lattice(f, 8))
      for (const MaximalSample& s : ball_maximal_profile(sampler, f, f.center(c), 1.0))
        CHECK(s.natural <= s.sharp * (1.0 + 1e-12) + 1e-300);
  }

  TEST_CASE("sharp and plain maximal defect at every radius") {
    const GridFunction f = bump(64);
    for (const char* id : {"one", "harmonic1", "llog"}) {
      const SphereSymbol omega = make_symbol(id, 2);
      const PolarSampler sampler(omega, f.spacing());
      const double K = omega.l1_norm() / sphere_area(2);
      for (Eigen::Index c : cell_lattice(f, 8))
        for (const MaximalSample& s : ball_maximal_profile(sampler, f, f.center(c), 1.5))
          CHECK(std::abs(s.rough - s.sharp) <= K * s.plain * (1.0 + 1e-12) + 1e-300);
    }
  }

  TEST_CASE("spherical means of a constant") {
    const GridFunction c = sample("constant", {{"c", 2.5}}, square(), 64, true);
    const std::vector<Eigen::Index> centre{c.cell_of(Point::Constant(2, 0.01))};
    CHECK(spherical_maximal(c, 0.0, centre).values[0] == doctest::Approx(2.5).epsilon(1e-12));
  }

  TEST_CASE("spherical bound with the chain constant") {
    // S_{alpha-1} f(x) <= (1/omega) integral |grad f(y)| |x-y|^{alpha-n} dy
    const GridFunction f = bump(128);
    const GridFunction g = gradient(f).magnitude();
    const auto cells = cell_lattice(f, 8);
    for (double alpha : {1.0, 1.5}) {
      const PointValues S = spherical_maximal(f, alpha - 1.0, cells);
      const GridFunction I = riesz_potential(g, alpha);
      const double scale = 1.0 / (sphere_area(2) * riesz_constant(2, alpha));
      double worst = 0.0;
      for (std::size_t i = 0; i < cells.size(); ++i)
        worst = std::max(worst, (S.values[static_cast<Eigen::Index>(i)] - S.error_bound) / (scale * I[cells[i]]));
      MESSAGE("alpha " << alpha << ": ratio to the chain constant " << worst);
      CHECK(worst <= 1.0 + 1e-2);
    }
  }

  TEST_CASE("error bounds shrink under refinement") {
    const SphereSymbol omega = make_symbol("sign", 2);
    double prev = INFINITY;
    for (int R : {64, 128, 256}) {
      const GridFunction f = bump(R);
      const std::vector<Eigen::Index> one{f.cell_of(Point::Constant(2, 0.3))};
      const double b = rough_singular(f, omega, 1.0, one).error_bound;
      CHECK(b < prev);
      prev = b;
    }
  }
}
