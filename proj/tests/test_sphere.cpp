#include <random>

#include "doctest.h"
#include "rlab/sphere.hpp"

using namespace rlab;

namespace {

// x sqrt(log(1 + x)) = 1 for the normalised L(log L)^{1/2} average of 1.
double log_orlicz_of_one() {
  double lo = 0.1, hi = 10.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (mid * std::sqrt(std::log1p(mid)) > 1.0 ? hi : lo) = mid;
  }
  return 1.0 / lo;
}

}  // namespace

TEST_SUITE("sphere_symbols") {
  TEST_CASE("mesh weights integrate polynomials") {
    for (int n : {2, 3}) {
      const SphereSymbol s = sphere_mesh(n, default_mesh_order(n));
      CHECK(s.weights.sum() == doctest::Approx(sphere_area(n)).epsilon(1e-12));
      const double second = (s.weights * s.nodes.row(0).array().transpose().square()).sum();
      CHECK(second == doctest::Approx(sphere_area(n) / n).epsilon(1e-10));
      CHECK((s.nodes.colwise().norm().array() - 1.0).abs().maxCoeff() < 1e-14);
    }
  }

  TEST_CASE("catalogue symbols") {
    const SphereSymbol h2 = make_symbol("harmonic1", 2);
    CHECK(h2.l1_norm() == doctest::Approx(4.0).epsilon(1e-4));
    const SphereSymbol h3 = make_symbol("harmonic1", 3);
    CHECK(h3.l1_norm() == doctest::Approx(2.0 * kPi).epsilon(1e-4));
    for (const SymbolInfo& info : symbol_catalog()) {
      const SphereSymbol om = make_symbol(info.id, 2);
      if (info.mean_zero) CHECK(std::abs(om.integral()) < 1e-10);
    }
    CHECK(make_symbol("sign", 2).l1_norm() == doctest::Approx(2.0 * kPi).epsilon(1e-12));
    CHECK_THROWS_AS(make_symbol("no-such-symbol", 2), std::invalid_argument);
  }

  TEST_CASE("mean-zero projection") {
    const SphereSymbol one = make_symbol("one", 2);
    CHECK(project_mean_zero(one).values.abs().maxCoeff() < 1e-15);
    const SphereSymbol sign = make_symbol("sign", 3);
    CHECK((project_mean_zero(sign).values - sign.values).abs().maxCoeff() < 1e-15);
    SphereSymbol rnd = make_symbol("one", 3);
    std::mt19937_64 rng(1);
    std::normal_distribution<double> g;
    for (Eigen::Index i = 0; i < rnd.size(); ++i) rnd.values[i] = g(rng);
    const SphereSymbol p = project_mean_zero(rnd);
    CHECK(std::abs(p.integral()) < 1e-12);
    CHECK((project_mean_zero(p).values - p.values).abs().maxCoeff() < 1e-15);
  }

  TEST_CASE("norms of the constant symbol") {
    const SphereSymbol one = make_symbol("one", 2);
    const double area = 2.0 * kPi;
    CHECK(sphere_norm(one, SymbolNorm::weak_n) == doctest::Approx(std::sqrt(area)).epsilon(1e-12));
    const double r = 1.5, rstar = 6.0;
    CHECK(sphere_norm(one, SymbolNorm::lorentz_rstar, r) ==
          doctest::Approx(std::pow(r / rstar, 1.0 / rstar) * std::pow(area, 1.0 / r)).epsilon(1e-12));
    CHECK(sphere_norm(one, SymbolNorm::log_orlicz) == doctest::Approx(log_orlicz_of_one()).epsilon(1e-8));
    CHECK(sphere_norm(one, SymbolNorm::lebesgue, 2.0) == doctest::Approx(std::sqrt(area)).epsilon(1e-12));
    CHECK_THROWS_AS(sphere_norm(one, SymbolNorm::lorentz_rstar, 2.0), std::invalid_argument);
  }

  TEST_CASE("level sets of the first coordinate") {
    const SphereSymbol h = make_symbol("harmonic1", 2, 4096);
    for (double t : {0.1, 0.5, 0.9}) {
      const double exact = 4.0 * std::acos(t);
      CHECK(level_set_measure(h, t) == doctest::Approx(exact).epsilon(2e-3));
    }
  }

  TEST_CASE("ball level sets scale the sphere level sets") {
    // |{y in B(0, 2^k) : |Omega(y/|y|)| > t}| = (2^{kn} / n) sigma({|Omega| > t})
    const SphereSymbol h = make_symbol("harmonic1", 2, 4096);
    const int k = 1, cells = 800;
    const double radius = std::ldexp(1.0, k), step = 2.0 * radius / cells;
    for (double t : {0.3, 0.7}) {
      double count = 0.0;
      for (int i = 0; i < cells; ++i)
        for (int j = 0; j < cells; ++j) {
          const double x = -radius + (i + 0.5) * step, y = -radius + (j + 0.5) * step;
          const double r = std::hypot(x, y);
          if (r < radius && std::abs(x / r) > t) count += step * step;
        }
      const double expected = radius * radius / 2.0 * level_set_measure(h, t);
      CHECK(std::abs(count - expected) <= 3.0 * step * 2.0 * kPi * radius);
    }
  }

  TEST_CASE("power singularities separate the Lebesgue scale") {
    // d^{-1/r}: mesh refinement increments shrink below r and grow above r.
    const double r = 1.5;
    auto increments = [&](double e) {
      std::vector<double> v;
      for (int order : {1024, 4096, 16384})
        v.push_back(sphere_norm(make_symbol("power", 2, order, {{"r", r}}), SymbolNorm::lebesgue, e));
      return std::pair{v[1] - v[0], v[2] - v[1]};
    };
    for (double e : {1.0, 1.2}) {
      const auto [a, b] = increments(e);
      CHECK(b < 0.8 * a);
    }
    for (double e : {1.8, 2.0}) {
      const auto [a, b] = increments(e);
      CHECK(b > a);
    }
  }

  TEST_CASE("symbol JSON round trip") {
    const SphereSymbol a = make_symbol("llog", 3);
    const SphereSymbol b = symbol_from_json(to_json(a));
    CHECK(b.dim == 3);
    CHECK((a.values - b.values).abs().maxCoeff() == 0.0);
    CHECK((a.weights - b.weights).abs().maxCoeff() == 0.0);
    CHECK((a.nodes - b.nodes).cwiseAbs().maxCoeff() == 0.0);
  }
}
