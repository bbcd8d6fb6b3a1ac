#include "doctest.h"
#include "rlab/corpus.hpp"
#include "oracles.hpp"
#include "rlab/potentials.hpp"

using namespace rlab;

namespace {

Box square() { return Box(Point::Constant(2, -2.0), 4.0); }

// Integral of |y|^{alpha-2} over [-a, a]^2 in polar coordinates:
// 8 a^alpha / alpha * integral_0^{pi/4} cos(theta)^{-alpha} dtheta.
double centred_square_integral(double alpha, double a) {
  const int steps = 200000;
  double sum = 0.0;
  for (int i = 0; i < steps; ++i) {
    const double th = (i + 0.5) * (kPi / 4.0) / steps;
    sum += std::pow(std::cos(th), -alpha);
  }
  return 8.0 * std::pow(a, alpha) / alpha * sum * (kPi / 4.0) / steps;
}

// Midpoint rule on a cube away from the origin.
double far_square_integral(double alpha, const Point& lower, double side) {
  const int m = 800;
  const double d = side / m;
  double sum = 0.0;
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j)
      sum += std::pow(std::hypot(lower[0] + (i + 0.5) * d, lower[1] + (j + 0.5) * d), alpha - 2.0);
  return sum * d * d;
}

double relative_l2(const Values& a, const Values& b) { return (a - b).matrix().norm() / b.matrix().norm(); }

}  // namespace

TEST_SUITE("potentials") {
  TEST_CASE("Riesz normalisation") {
    CHECK(riesz_constant(2, 1.0) == doctest::Approx(1.0 / (2.0 * kPi)).epsilon(1e-14));
    CHECK(riesz_constant(3, 2.0) == doctest::Approx(1.0 / (4.0 * kPi)).epsilon(1e-14));
    for (double a = 0.1; a < 2.0; a += 0.1) CHECK(riesz_constant(2, a) > 0.0);
    CHECK_THROWS_AS(riesz_constant(2, 2.0), std::invalid_argument);
    CHECK_THROWS_AS(riesz_constant(2, 0.0), std::invalid_argument);
  }

  TEST_CASE("exact kernel integral over cubes") {
    for (double alpha : {0.5, 1.0, 1.5}) {
      CHECK(kernel_cube_integral(2, alpha, Point::Constant(2, -0.5), 1.0) ==
            doctest::Approx(centred_square_integral(alpha, 0.5)).epsilon(1e-8));
      Point lo(2);
      lo << 0.7, -0.2;
      CHECK(kernel_cube_integral(2, alpha, lo, 0.5) ==
            doctest::Approx(far_square_integral(alpha, lo, 0.5)).epsilon(1e-5));
    }
  }

  TEST_CASE("potential of the unit ball at its centre") {
    for (double alpha : {0.5, 1.0, 1.5}) {
      const GridFunction ball = sample("ball_indicator", {{"radius", 1.0}}, square(), 256);
      const double exact = riesz_constant(2, alpha) * sphere_area(2) / alpha;
      CHECK(riesz_potential_at(ball, alpha, Point::Zero(2)) == doctest::Approx(exact).epsilon(0.01));
    }
  }

  TEST_CASE("fast and direct convolution agree") {
    const GridFunction f = sample("bump", {{"cx", 0.1}, {"radius", 1.2}}, square(), 32);
    const GridFunction a = riesz_potential(f, 0.7, ConvolutionPath::fft);
    const GridFunction b = riesz_potential(f, 0.7, ConvolutionPath::direct);
    CHECK((a.values() - b.values()).abs().maxCoeff() < 1e-8 * b.values().abs().maxCoeff());
  }

  TEST_CASE("pointwise and grid evaluation agree") {
    const GridFunction f = sample("bump", {{"cy", 0.2}, {"radius", 1.0}}, square(), 64);
    const GridFunction g = riesz_potential(f, 1.0);
    for (Eigen::Index i : {Eigen::Index(1000), Eigen::Index(2080), Eigen::Index(3000)})
      CHECK(riesz_potential_at(f, 1.0, f.center(i)) == doctest::Approx(g[i]).epsilon(1e-10));
  }

  TEST_CASE("composition of potentials adds orders") {
    // The box cuts off the outer potential's input; that tail is bounded in
    // closed form and the rest of the deviation must stay within 2%.
    const GridFunction f = sample("bump", {{"radius", 1.0}}, square(), 256);
    const oracle::CompositionResult r = oracle::composition(f, 0.5, 0.5, 1.0);
    MESSAGE("raw " << r.raw << ", unexplained " << r.unexplained << ", tail bound " << r.tail);
    CHECK(r.unexplained < 0.02);
    const GridFunction coarse = sample("bump", {{"radius", 1.0}}, square(), 128);
    CHECK(r.unexplained <= oracle::composition(coarse, 0.5, 0.5, 1.0).unexplained + 1e-12);

    // the raw deviation is the truncation: it falls as the box grows
    const Box wide(Point::Constant(2, -8.0), 16.0);
    const GridFunction g = sample("bump", {{"radius", 1.0}}, wide, 256);
    CHECK(oracle::composition(g, 0.5, 0.5, 1.0).raw < 0.5 * r.raw);
  }

  TEST_CASE("fractional maximal identity") {
    const GridFunction f = sample("tensor_bump", {{"cx", 0.2}, {"radius", 1.1}}, square(), 64);
    for (double s : {1.5, 2.0}) {
      const double alpha = 0.5;
      const GridFunction lhs = fractional_maximal(f, alpha, s);
      const GridFunction rhs = fractional_maximal(f.with_values(f.values().abs().pow(s)), alpha * s, 1.0);
      CHECK((lhs.values() - rhs.values().pow(1.0 / s)).abs().maxCoeff() <= 1e-12 * lhs.values().maxCoeff());
    }
    CHECK_THROWS_AS(fractional_maximal(f, 1.5, 2.0), std::invalid_argument);
  }

  TEST_CASE("Lorentz maximal with p = q is the L^p maximal function") {
    const GridFunction f = sample("bump", {{"radius", 1.3}}, square(), 32);
    const GridFunction a = lorentz_maximal(f, 2.0, 2.0);
    const GridFunction b = fractional_maximal(f, 0.0, 2.0);
    CHECK((a.values() - b.values()).abs().maxCoeff() <= 1e-12 * b.values().maxCoeff());
  }

  TEST_CASE("dyadic and continuous potentials are comparable") {
    const GridFunction f = sample("bump", {{"cx", 0.15}, {"radius", 1.0}}, square(), 64);
    const double alpha = 1.0;
    const GridFunction I = riesz_potential(f, alpha);
    Values sum = Values::Zero(f.size());
    double up = 0.0;
    for (const Shift& t : all_shifts(2)) {
      const GridFunction D = dyadic_fractional(f, alpha, t);
      sum += D.values();
      up = std::max(up, (D.values() / I.values()).maxCoeff());
    }
    const double down = (I.values() / sum).maxCoeff();
    MESSAGE("dyadic over continuous " << up << ", continuous over shifted sum " << down);
    CHECK(std::isfinite(up));
    CHECK(std::isfinite(down));
    CHECK(up < 50.0);
    CHECK(down < 1.0);
  }

  TEST_CASE("fractional maximal below the potential") {
    const GridFunction f = sample("bump", {{"cx", -0.2}, {"radius", 1.0}}, square(), 64);
    for (double alpha : {0.5, 1.0}) {
      const double c = (fractional_maximal(f, alpha).values() / riesz_potential(f, alpha).values()).maxCoeff();
      MESSAGE("M_alpha / I_alpha at alpha " << alpha << ": " << c);
      CHECK(std::isfinite(c));
      CHECK(c < 100.0);
    }
  }
}
