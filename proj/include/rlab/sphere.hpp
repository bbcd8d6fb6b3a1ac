#pragma once

#include <map>
#include <string>
#include <vector>

#include "json.hpp"

#include "rlab/types.hpp"

namespace rlab {

/// A function on the unit sphere S^{n-1} sampled on a quadrature mesh.
/// Weights integrate against surface measure and sum to |S^{n-1}|.
struct SphereSymbol {
  std::string id;
  int dim = 2;
  Eigen::MatrixXd nodes;  // dim x count, unit columns
  Values weights;
  Values values;

  Eigen::Index size() const { return values.size(); }
  double integral() const { return (weights * values).sum(); }
  /// Integral of |values|^1: the L^1 norm against surface measure.
  double l1_norm() const { return (weights * values.abs()).sum(); }
};

/// Sphere meshes: uniform half-offset angles on S^1; on S^2 a product of
/// Gauss-Legendre nodes in the polar cosine with uniform azimuths.
/// order = angle count (n = 2) or polar node count (n = 3, azimuths 2 order).
SphereSymbol sphere_mesh(int dim, int order);
int default_mesh_order(int dim);

struct SymbolInfo {
  std::string id;
  std::string description;
  bool mean_zero;
};
std::vector<SymbolInfo> symbol_catalog();

/// Samples a catalogued symbol. Parameters: r and beta for the singular
/// families (see symbol_catalog()). Unknown ids throw std::invalid_argument.
SphereSymbol make_symbol(const std::string& id, int dim, int order = 0,
                         const std::map<std::string, double>& params = {});

/// Subtracts the weighted mean; idempotent.
SphereSymbol project_mean_zero(const SphereSymbol& omega);

enum class SymbolNorm { lebesgue, lorentz_rstar, weak_n, log_orlicz, l1, sup };

/// Norms of the classes that stratify the rough-operator bounds:
/// lebesgue (L^r), lorentz_rstar (L^{r, r*} with r* = nr/(n-r), r < n),
/// weak_n (L^{n,oo}), log_orlicz (normalised Luxemburg average for
/// t log(1+t)^{1/n'}), l1 and sup.
double sphere_norm(const SphereSymbol& omega, SymbolNorm kind, double r = 1.0);

/// sigma({|Omega| > t}).
double level_set_measure(const SphereSymbol& omega, double t);

nlohmann::json to_json(const SphereSymbol& omega);
SphereSymbol symbol_from_json(const nlohmann::json& j);

}  // namespace rlab
