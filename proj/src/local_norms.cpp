#include "rlab/local_norms.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace rlab {

namespace {

struct Level {
  double value;
  double cumulative;  // |{|f| >= value}|
};

// Distinct positive |values| in decreasing order with the measure of the
// super-level set at each.
std::vector<Level> distribution(const MeasuredSamples& f) {
  std::vector<std::size_t> order(f.values.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return std::abs(f.values[a]) > std::abs(f.values[b]);
  });
  std::vector<Level> out;
  double acc = 0.0;
  for (std::size_t i : order) {
    const double v = std::abs(f.values[i]);
    if (v == 0.0) break;
    acc += f.measures[i];
    if (!out.empty() && out.back().value == v)
      out.back().cumulative = acc;
    else
      out.push_back({v, acc});
  }
  return out;
}

}  // namespace

double YoungFunction::operator()(double t) const {
  if (kind == Kind::exp_power) return std::expm1(std::pow(t, q));
  return t * std::pow(std::log1p(t), 1.0 / q);
}

double lorentz_global(const MeasuredSamples& f, double p, double q) {
  if (!(p > 1.0)) throw std::invalid_argument("Lorentz exponent p must exceed 1");
  if (!(q >= 1.0)) throw std::invalid_argument("Lorentz exponent q must be >= 1");
  const std::vector<Level> levels = distribution(f);
  if (std::isinf(q)) {
    double best = 0.0;
    for (const Level& l : levels) best = std::max(best, l.value * std::pow(l.cumulative, 1.0 / p));
    return best;
  }
  // On [v_{j+1}, v_j) the distribution function equals the measure where
  // |f| >= v_j, so each step integrates in closed form.
  double acc = 0.0;
  for (std::size_t j = 0; j < levels.size(); ++j) {
    const double next = j + 1 < levels.size() ? levels[j + 1].value : 0.0;
    acc += std::pow(levels[j].cumulative, q / p) * (std::pow(levels[j].value, q) - std::pow(next, q));
  }
  return std::pow(p / q * acc, 1.0 / q);
}

double lorentz_average(const MeasuredSamples& f, double p, double q) {
  const double total = f.total_measure();
  if (!(total > 0.0)) return 0.0;
  return std::pow(total, -1.0 / p) * lorentz_global(f, p, q);
}

double lorentz_average(const GridFunction& f, const Cube& q_cube, double p, double q) {
  return lorentz_average(cube_samples(f, q_cube), p, q);
}

double luxemburg_average(const MeasuredSamples& f, const YoungFunction& phi) {
  const double total = f.total_measure();
  double top = 0.0;
  for (double v : f.values) top = std::max(top, std::abs(v));
  if (top == 0.0 || !(total > 0.0)) return 0.0;
  auto mean = [&](double lambda) {
    double acc = 0.0;
    for (std::size_t i = 0; i < f.values.size(); ++i)
      if (f.values[i] != 0.0) acc += phi(std::abs(f.values[i]) / lambda) * f.measures[i];
    return acc / total;
  };
  double hi = top, lo = top;
  while (mean(hi) > 1.0) hi *= 2.0;
  while (mean(lo) <= 1.0) lo *= 0.5;
  while (hi - lo > 1e-10 * hi) {
    const double mid = 0.5 * (lo + hi);
    (mean(mid) > 1.0 ? lo : hi) = mid;
  }
  return hi;
}

double luxemburg_average(const GridFunction& f, const Cube& q_cube, const YoungFunction& phi) {
  return luxemburg_average(cube_samples(f, q_cube), phi);
}

HolderDefect holder_defect(const MeasuredSamples& f, const MeasuredSamples& g,
                           const Pairing& pairing) {
  if (f.values.size() != g.values.size())
    throw std::invalid_argument("paired samples must share their pieces");
  const double total = f.total_measure();
  HolderDefect d;
  if (!(total > 0.0)) return d;
  for (std::size_t i = 0; i < f.values.size(); ++i)
    d.lhs += std::abs(f.values[i] * g.values[i]) * f.measures[i];
  d.lhs /= total;
  if (const auto* o = std::get_if<OrliczPairing>(&pairing)) {
    d.rhs = luxemburg_average(f, YoungFunction::log_power(o->q)) *
            luxemburg_average(g, YoungFunction::exp_power(o->q));
  } else {
    const auto& l = std::get<LorentzPairing>(pairing);
    d.rhs = lorentz_average(f, l.p, l.q) * lorentz_average(g, conjugate(l.p), conjugate(l.q));
  }
  if (d.rhs == 0.0) {
    if (d.lhs > 0.0) throw std::logic_error("dual averages vanish while the pairing does not");
    return d;
  }
  d.ratio = d.lhs / d.rhs;
  return d;
}

}  // namespace rlab
