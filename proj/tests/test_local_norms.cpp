#include <algorithm>
#include <random>

#include "doctest.h"
#include "rlab/corpus.hpp"
#include "rlab/local_norms.hpp"

using namespace rlab;

namespace {

MeasuredSamples random_samples(std::mt19937_64& rng, int count) {
  std::uniform_real_distribution<double> value(0.0, 3.0), measure(0.01, 1.0);
  MeasuredSamples s;
  for (int i = 0; i < count; ++i) s.add(value(rng), measure(rng));
  return s;
}

// p^{1/q} (integral_0^oo t^{q-1} lambda(t)^{q/p} dt)^{1/q} by a fine midpoint rule in t.
double lorentz_by_quadrature(const MeasuredSamples& f, double p, double q) {
  const double top = *std::max_element(f.values.begin(), f.values.end());
  const int steps = 200000;
  const double dt = top / steps;
  double sum = 0.0;
  for (int i = 0; i < steps; ++i) {
    const double t = (i + 0.5) * dt;
    double lambda = 0.0;
    for (std::size_t j = 0; j < f.values.size(); ++j)
      if (std::abs(f.values[j]) > t) lambda += f.measures[j];
    sum += std::pow(t, q - 1.0) * std::pow(lambda, q / p) * dt;
  }
  return std::pow(p, 1.0 / q) * std::pow(sum, 1.0 / q);
}

}  // namespace

TEST_SUITE("local_norms") {
  TEST_CASE("half indicator in L^{2,1}") {
    MeasuredSamples f;
    f.add(1.0, 0.5);
    f.add(0.0, 0.5);
    CHECK(lorentz_average(f, 2.0, 1.0) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-6));
    CHECK(std::abs(lorentz_average(f, 2.0, 1.0) - std::sqrt(2.0)) < 1e-6);
  }

  TEST_CASE("normalisation cancels the measure of the region") {
    MeasuredSamples f;
    f.add(1.0, 2.0);
    f.add(0.0, 2.0);
    CHECK(std::abs(lorentz_average(f, 2.0, 1.0) - std::sqrt(2.0)) < 1e-6);
  }

  TEST_CASE("Lorentz norm against direct quadrature of the distribution function") {
    std::mt19937_64 rng(17);
    for (double p : {1.5, 2.0, 3.0})
      for (double q : {1.0, 2.0, 4.0}) {
        const MeasuredSamples f = random_samples(rng, 6);
        CHECK(lorentz_global(f, p, q) == doctest::Approx(lorentz_by_quadrature(f, p, q)).epsilon(1e-4));
      }
  }

  TEST_CASE("weak norm is sup t lambda(t)^{1/p}") {
    MeasuredSamples f;
    f.add(2.0, 0.25);
    f.add(1.0, 0.75);
    // t just below 1: 1 * 1^{1/2}; t just below 2: 2 * 0.25^{1/2} = 1
    CHECK(lorentz_global(f, 2.0, INFINITY) == doctest::Approx(1.0).epsilon(1e-12));
    f.values[0] = 3.0;
    CHECK(lorentz_global(f, 2.0, INFINITY) == doctest::Approx(1.5).epsilon(1e-12));
  }

  TEST_CASE("p = q reduces to the L^p average") {
    const GridFunction f = sample("tensor_bump", {{"cx", 0.1}, {"radius", 1.3}}, Box(Point::Constant(2, -2.0), 4.0), 64);
    for (double p : {1.5, 2.0, 3.0}) {
      const Cube q{Point::Constant(2, -0.7), 1.1, std::nullopt};
      CHECK(std::abs(lorentz_average(f, q, p, p) - cell_average(f, q, p)) < 1e-12);
    }
  }

  TEST_CASE("Luxemburg average of a constant") {
    MeasuredSamples f;
    f.add(2.5, 1.0);
    const double v = luxemburg_average(f, YoungFunction::exp_power(2.0));
    CHECK(std::abs(v - 2.5 / std::sqrt(std::log(2.0))) < 1e-8);
    MeasuredSamples zero;
    zero.add(0.0, 1.0);
    CHECK(luxemburg_average(zero, YoungFunction::exp_power(2.0)) == 0.0);
  }

  TEST_CASE("Luxemburg average solves the defining equation") {
    std::mt19937_64 rng(23);
    for (const YoungFunction phi : {YoungFunction::exp_power(2.0), YoungFunction::log_power(2.0)}) {
      const MeasuredSamples f = random_samples(rng, 8);
      const double lambda = luxemburg_average(f, phi);
      double mean = 0.0;
      for (std::size_t j = 0; j < f.values.size(); ++j) mean += phi(f.values[j] / lambda) * f.measures[j];
      mean /= f.total_measure();
      CHECK(mean == doctest::Approx(1.0).epsilon(1e-8));
    }
  }

  TEST_CASE("Young functions") {
    CHECK(YoungFunction::exp_power(2.0)(1.0) == doctest::Approx(std::exp(1.0) - 1.0));
    CHECK(YoungFunction::log_power(2.0)(3.0) == doctest::Approx(3.0 * std::sqrt(std::log(4.0))));
  }

  TEST_CASE("Hoelder defects stay bounded") {
    std::mt19937_64 rng(29);
    double worst_lorentz = 0.0, worst_orlicz = 0.0;
    for (int trial = 0; trial < 1000; ++trial) {
      MeasuredSamples f = random_samples(rng, 5), g = random_samples(rng, 5);
      g.measures = f.measures;
      worst_lorentz = std::max(worst_lorentz, holder_defect(f, g, LorentzPairing{2.0, 1.0}).ratio);
      worst_orlicz = std::max(worst_orlicz, holder_defect(f, g, OrliczPairing{2.0}).ratio);
    }
    CHECK(worst_lorentz > 0.0);
    CHECK(worst_lorentz <= 1.0 + 1e-12);
    CHECK(std::isfinite(worst_orlicz));
    CHECK(worst_orlicz <= 2.0);
    MESSAGE("Hoelder ratios: Lorentz " << worst_lorentz << ", Orlicz " << worst_orlicz);

    MeasuredSamples half, one;
    half.add(1.0, 0.5);
    half.add(0.0, 0.5);
    one.add(1.0, 0.5);
    one.add(1.0, 0.5);
    CHECK(std::isfinite(holder_defect(half, one, OrliczPairing{2.0}).ratio));
  }
}
