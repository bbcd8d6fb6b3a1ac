#pragma once

#include <variant>

#include "rlab/grid.hpp"

namespace rlab {

/// exp_power(q): exp(t^q) - 1. log_power(q): t log(1 + t)^{1/q}, the
/// associate class of exp_power(q) up to equivalence.
struct YoungFunction {
  enum class Kind { exp_power, log_power };
  Kind kind = Kind::exp_power;
  double q = 2.0;

  static YoungFunction exp_power(double q) { return {Kind::exp_power, q}; }
  static YoungFunction log_power(double q) { return {Kind::log_power, q}; }
  double operator()(double t) const;
};

/// L^{p,q} norm of a simple function given as (value, measure) pairs, from
/// the exact integral of the step distribution function. q = infinity gives
/// the weak norm sup_t t |{|f| > t}|^{1/p}.
double lorentz_global(const MeasuredSamples& f, double p, double q);

/// Normalised Lorentz average |E|^{-1/p} ||f 1_E||_{L^{p,q}} where the
/// samples describe f on E and their measures sum to |E|.
double lorentz_average(const MeasuredSamples& f, double p, double q);
double lorentz_average(const GridFunction& f, const Cube& q_cube, double p, double q);

/// inf{lambda > 0 : mean over E of Phi(|f| / lambda) <= 1}, by bisection to
/// relative width 1e-10. Zero when f vanishes on E.
double luxemburg_average(const MeasuredSamples& f, const YoungFunction& phi);
double luxemburg_average(const GridFunction& f, const Cube& q_cube, const YoungFunction& phi);

struct OrliczPairing {
  double q;
};
struct LorentzPairing {
  double p;
  double q;
};
using Pairing = std::variant<OrliczPairing, LorentzPairing>;

struct HolderDefect {
  double lhs = 0.0;
  double rhs = 0.0;
  double ratio = 0.0;
};

/// lhs = mean of |fg| over E; rhs = product of the dual averages of f and g:
/// L(log L)^{1/q} times exp L^q, or L^{p,q} times L^{p',q'}. f and g must be
/// sampled on the same pieces of E.
HolderDefect holder_defect(const MeasuredSamples& f, const MeasuredSamples& g,
                           const Pairing& pairing);

}  // namespace rlab
