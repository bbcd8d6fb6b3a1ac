#include <random>

#include <boost/multiprecision/cpp_int.hpp>

#include "doctest.h"
#include "rlab/dyadic.hpp"

using namespace rlab;
using Rational = boost::multiprecision::cpp_rational;

namespace {

// Exact value of a double.
Rational exact(double v) {
  int e = 0;
  const double m = std::frexp(v, &e);
  const auto mant = static_cast<long long>(std::ldexp(m, 53));
  Rational r(mant);
  const int shift = e - 53;
  if (shift >= 0) return r * Rational(boost::multiprecision::cpp_int(1) << shift);
  return r / Rational(boost::multiprecision::cpp_int(1) << -shift);
}

// Corner of 2^k([0,1)^n + m + (-1)^k t) along one axis.
Rational corner(int level, long long m, int t) {
  const Rational two_k = level >= 0 ? Rational(boost::multiprecision::cpp_int(1) << level)
                                    : Rational(1) / Rational(boost::multiprecision::cpp_int(1) << -level);
  const int sign = (level % 2 == 0) ? 1 : -1;
  return two_k * (Rational(m) + Rational(sign * t, 3));
}

bool oracle_contains(const Shift& t, int level, const Index3& m, const Cube& q) {
  const Rational side = level >= 0 ? Rational(boost::multiprecision::cpp_int(1) << level)
                                   : Rational(1) / Rational(boost::multiprecision::cpp_int(1) << -level);
  for (int a = 0; a < q.dim(); ++a) {
    const Rational lo = corner(level, m[a], t[a]);
    const Rational qlo = exact(q.lower[a]);
    if (qlo < lo || qlo + exact(q.side) > lo + side) return false;
  }
  return true;
}

Cube random_cube(std::mt19937_64& rng, bool dyadic_side) {
  std::uniform_real_distribution<double> pos(-20.0, 20.0);
  std::uniform_int_distribution<int> level(-6, 4);
  std::uniform_real_distribution<double> side(0.01, 8.0);
  Cube q;
  q.lower = Point(2);
  q.lower << pos(rng), pos(rng);
  q.side = dyadic_side ? std::ldexp(1.0, level(rng)) : side(rng);
  return q;
}

}  // namespace

TEST_SUITE("dyadic") {
  TEST_CASE("shifted dyadic corners") {
    const Cube a = dyadic_cube(Shift{1, 1, 0}, 1, Index3{0, 0, 0}, 2);
    CHECK(a.lower[0] == doctest::Approx(-2.0 / 3.0));
    CHECK(a.lower[1] == doctest::Approx(-2.0 / 3.0));
    CHECK(a.side == 2.0);
    const Cube b = dyadic_cube(Shift{1, 1, 0}, 2, Index3{1, 0, 0}, 2);
    CHECK(b.lower[0] == doctest::Approx(16.0 / 3.0));
    CHECK(b.lower[1] == doctest::Approx(4.0 / 3.0));
    CHECK(b.side == 4.0);
    REQUIRE(b.tag.has_value());
    CHECK(b.tag->level == 2);
  }

  TEST_CASE("locate uses the shifted lattice") {
    Point x(2);
    x << 0.5, 0.5;
    const Cube c = locate(x, 0, Shift{1, 1, 0});
    CHECK(c.lower[0] == doctest::Approx(1.0 / 3.0));
    CHECK(c.contains(x));
    x << 0.2, 0.2;
    const Cube d = locate(x, 0, Shift{1, 1, 0});
    CHECK(d.lower[0] == doctest::Approx(-2.0 / 3.0));
  }

  TEST_CASE("locate agrees with the rational oracle") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> pos(-50.0, 50.0);
    std::uniform_int_distribution<int> lev(-5, 5);
    for (int trial = 0; trial < 2000; ++trial) {
      const int k = lev(rng);
      const int t = trial % 2;
      const double x = pos(rng);
      const long long m = locate_axis(x, k, t);
      const Rational lo = corner(k, m, t);
      const Rational side = k >= 0 ? Rational(boost::multiprecision::cpp_int(1) << k)
                                   : Rational(1) / Rational(boost::multiprecision::cpp_int(1) << -k);
      CHECK(lo <= exact(x));
      CHECK(exact(x) < lo + side);
    }
  }

  TEST_CASE("all shifts") {
    CHECK(all_shifts(2).size() == 4);
    CHECK(all_shifts(3).size() == 8);
    CHECK(all_shifts(2)[3] == Shift{1, 1, 0});
  }

  TEST_CASE("one-third trick on a fixed cube") {
    Cube q;
    q.lower = Point::Constant(2, 0.4);
    q.side = 0.5;
    const ShiftedCube r = third_trick(q);
    CHECK((r.cube.side == 1.0 || r.cube.side == 2.0));
    REQUIRE(r.cube.tag.has_value());
    CHECK(oracle_contains(r.shift, r.cube.tag->level, r.cube.tag->index, q));
    CHECK(contains_exact(*r.cube.tag, q));
  }

  TEST_CASE("one-third trick on random cubes") {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 2000; ++trial) {
      const Cube q = random_cube(rng, false);
      const ShiftedCube r = third_trick(q);
      REQUIRE(r.cube.tag.has_value());
      CHECK(r.cube.side <= 6.0 * q.side);
      CHECK(r.cube.side > q.side);
      CHECK(oracle_contains(r.shift, r.cube.tag->level, r.cube.tag->index, q));
    }
  }

  TEST_CASE("level k+3 variant") {
    Cube q;
    q.lower = Point::Constant(2, 0.5);
    q.side = 1.0;
    const ShiftedCube r = third_trick_level(q);
    CHECK(r.cube.side == 8.0);
    CHECK(oracle_contains(r.shift, 3, r.cube.tag->index, q));

    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 2000; ++trial) {
      const Cube c = random_cube(rng, true);
      const ShiftedCube s = third_trick_level(c);
      const int k = std::ilogb(c.side);
      CHECK(s.cube.tag->level == k + 3);
      CHECK(oracle_contains(s.shift, k + 3, s.cube.tag->index, c));
    }
    q.side = 0.75;
    CHECK_THROWS_AS(third_trick_level(q), std::invalid_argument);
  }

  TEST_CASE("exact containment rejects a cube poking out by one ulp") {
    const Cube d = dyadic_cube(Shift{0, 0, 0}, 0, Index3{0, 0, 0}, 2);
    Cube q;
    q.lower = Point::Zero(2);
    q.side = 1.0;
    CHECK(contains_exact(*d.tag, q));
    q.lower[0] = std::nextafter(0.0, 1.0);
    CHECK_FALSE(contains_exact(*d.tag, q));
  }

  TEST_CASE("tag containment matches the oracle") {
    const DyadicTag outer{{1, 0, 0}, 2, {0, 0, 0}};
    const DyadicTag inner{{1, 0, 0}, 0, {-1, 1, 0}};
    // inner corner at (1/3 - 1, 1) side 1; outer corner at (4/3, 0) side 4
    const Cube in = dyadic_cube(inner, 2);
    CHECK(contains_exact(outer, inner, 2) == oracle_contains(outer.shift, 2, outer.index, in));
    const DyadicTag inside{{1, 0, 0}, 0, {2, 1, 0}};
    CHECK(contains_exact(outer, inside, 2));
    CHECK(oracle_contains(outer.shift, 2, outer.index, dyadic_cube(inside, 2)));
  }
}
