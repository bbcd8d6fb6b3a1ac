#include "rlab/sphere.hpp"

#include <algorithm>
#include <functional>
#include <stdexcept>

#include "rlab/grid.hpp"
#include "rlab/local_norms.hpp"
#include "rlab/quadrature.hpp"

namespace rlab {

namespace {

double param(const std::map<std::string, double>& p, const std::string& key, double fallback) {
  const auto it = p.find(key);
  return it == p.end() ? fallback : it->second;
}

double angle_between(const Eigen::VectorXd& y, const Eigen::VectorXd& e) {
  return std::acos(std::clamp(y.dot(e), -1.0, 1.0));
}

// Odd pair g(d(y, e1)) - g(d(y, -e1)): mean zero on any antipodally
// symmetric mesh, singular at the two poles.
using Profile = std::function<double(double)>;
std::function<double(const Eigen::VectorXd&)> odd_pair(Profile g, int dim) {
  Eigen::VectorXd e = Eigen::VectorXd::Zero(dim);
  e[0] = 1.0;
  return [g = std::move(g), e](const Eigen::VectorXd& y) {
    return g(angle_between(y, e)) - g(angle_between(y, -e));
  };
}

MeasuredSamples as_samples(const SphereSymbol& omega) {
  MeasuredSamples s;
  s.values.assign(omega.values.begin(), omega.values.end());
  s.measures.assign(omega.weights.begin(), omega.weights.end());
  return s;
}

}  // namespace

int default_mesh_order(int dim) { return dim == 2 ? 4096 : 80; }

SphereSymbol sphere_mesh(int dim, int order) {
  require_dimension(dim);
  if (order <= 0) order = default_mesh_order(dim);
  SphereSymbol s;
  s.dim = dim;
  if (dim == 2) {
    s.nodes.resize(2, order);
    s.weights = Values::Constant(order, 2.0 * kPi / order);
    for (int i = 0; i < order; ++i) {
      const double th = 2.0 * kPi * (i + 0.5) / order;
      s.nodes(0, i) = std::cos(th);
      s.nodes(1, i) = std::sin(th);
    }
  } else {
    const int az = 2 * order;
    const auto [z, wz] = gauss_legendre(order);
    s.nodes.resize(3, order * az);
    s.weights.resize(order * az);
    for (int i = 0; i < order; ++i) {
      const double rho = std::sqrt(1.0 - z[i] * z[i]);
      for (int j = 0; j < az; ++j) {
        const double ph = 2.0 * kPi * (j + 0.5) / az;
        const int c = i * az + j;
        s.nodes(0, c) = rho * std::cos(ph);
        s.nodes(1, c) = rho * std::sin(ph);
        s.nodes(2, c) = z[i];
        s.weights[c] = wz[i] * 2.0 * kPi / az;
      }
    }
  }
  s.values = Values::Zero(s.nodes.cols());
  return s;
}

std::vector<SymbolInfo> symbol_catalog() {
  return {
      {"zero", "identically zero", true},
      {"one", "identically one", false},
      {"harmonic1", "first coordinate y_1", true},
      {"harmonic2", "product y_1 y_2", true},
      {"sign", "sign of y_1", true},
      {"power",
       "odd pair of d^{-(n-1)/r} (1 + |log d|)^{-beta} about +-e_1, d the geodesic distance; "
       "r = n, beta = 0 is the weak-L^n model",
       true},
      {"llog",
       "odd pair of d^{-(n-1)} (1 + |log d|)^{-beta} about +-e_1; beta > 1 + 1/n' lies in "
       "L(log L)^{1/n'}",
       true},
  };
}

SphereSymbol make_symbol(const std::string& id, int dim, int order,
                         const std::map<std::string, double>& params) {
  SphereSymbol s = sphere_mesh(dim, order);
  s.id = id;
  const int count = static_cast<int>(s.nodes.cols());
  // Singular profiles are capped at the mesh scale.
  const double cap = dim == 2 ? kPi / count : kPi / (order > 0 ? order : default_mesh_order(3));
  std::function<double(const Eigen::VectorXd&)> fn;
  if (id == "zero") {
    fn = [](const Eigen::VectorXd&) { return 0.0; };
  } else if (id == "one") {
    fn = [](const Eigen::VectorXd&) { return 1.0; };
  } else if (id == "harmonic1") {
    fn = [](const Eigen::VectorXd& y) { return y[0]; };
  } else if (id == "harmonic2") {
    fn = [](const Eigen::VectorXd& y) { return y[0] * y[1]; };
  } else if (id == "sign") {
    fn = [](const Eigen::VectorXd& y) { return y[0] > 0.0 ? 1.0 : (y[0] < 0.0 ? -1.0 : 0.0); };
  } else if (id == "power") {
    const double r = param(params, "r", dim);
    const double beta = param(params, "beta", 0.0);
    fn = odd_pair(
        [=](double d) {
          d = std::max(d, cap);
          return std::pow(d, -(dim - 1) / r) * std::pow(1.0 + std::abs(std::log(d)), -beta);
        },
        dim);
  } else if (id == "llog") {
    const double beta = param(params, "beta", 2.5);
    fn = odd_pair(
        [=](double d) {
          d = std::max(d, cap);
          return std::pow(d, -(dim - 1.0)) * std::pow(1.0 + std::abs(std::log(d)), -beta);
        },
        dim);
  } else {
    throw std::invalid_argument("unknown sphere symbol: " + id);
  }
  for (int i = 0; i < count; ++i) s.values[i] = fn(s.nodes.col(i));
  return s;
}

SphereSymbol project_mean_zero(const SphereSymbol& omega) {
  SphereSymbol out = omega;
  const double mean = omega.integral() / omega.weights.sum();
  out.values -= mean;
  return out;
}

double sphere_norm(const SphereSymbol& omega, SymbolNorm kind, double r) {
  const int n = omega.dim;
  switch (kind) {
    case SymbolNorm::l1:
      return omega.l1_norm();
    case SymbolNorm::sup:
      return omega.values.abs().maxCoeff();
    case SymbolNorm::lebesgue:
      if (!(r >= 1.0)) throw std::invalid_argument("L^r needs r >= 1");
      return std::pow((omega.weights * omega.values.abs().pow(r)).sum(), 1.0 / r);
    case SymbolNorm::lorentz_rstar: {
      if (!(r > 1.0) || !(r < n)) throw std::invalid_argument("L^{r,r*} needs 1 < r < n");
      const double rstar = n * r / (n - r);
      return lorentz_global(as_samples(omega), r, rstar);
    }
    case SymbolNorm::weak_n:
      return lorentz_global(as_samples(omega), n, INFINITY);
    case SymbolNorm::log_orlicz:
      return luxemburg_average(as_samples(omega), YoungFunction::log_power(n / (n - 1.0)));
  }
  return 0.0;
}

double level_set_measure(const SphereSymbol& omega, double t) {
  return (omega.values.abs() > t).select(omega.weights, 0.0).sum();
}

nlohmann::json to_json(const SphereSymbol& omega) {
  nlohmann::json j;
  j["id"] = omega.id;
  j["n"] = omega.dim;
  nlohmann::json nodes = nlohmann::json::array();
  for (Eigen::Index c = 0; c < omega.nodes.cols(); ++c) {
    nlohmann::json v = nlohmann::json::array();
    for (int a = 0; a < omega.dim; ++a) v.push_back(omega.nodes(a, c));
    nodes.push_back(std::move(v));
  }
  j["nodes"] = std::move(nodes);
  j["weights"] = std::vector<double>(omega.weights.begin(), omega.weights.end());
  j["values"] = std::vector<double>(omega.values.begin(), omega.values.end());
  return j;
}

SphereSymbol symbol_from_json(const nlohmann::json& j) {
  SphereSymbol s;
  s.id = j.value("id", std::string{});
  s.dim = j.at("n").get<int>();
  require_dimension(s.dim);
  const auto& nodes = j.at("nodes");
  const auto w = j.at("weights").get<std::vector<double>>();
  const auto v = j.at("values").get<std::vector<double>>();
  if (nodes.size() != w.size() || w.size() != v.size())
    throw std::invalid_argument("symbol arrays differ in length");
  s.nodes.resize(s.dim, static_cast<Eigen::Index>(w.size()));
  for (std::size_t c = 0; c < w.size(); ++c)
    for (int a = 0; a < s.dim; ++a) s.nodes(a, static_cast<Eigen::Index>(c)) = nodes[c].at(a).get<double>();
  s.weights = Eigen::Map<const Values>(w.data(), static_cast<Eigen::Index>(w.size()));
  s.values = Eigen::Map<const Values>(v.data(), static_cast<Eigen::Index>(v.size()));
  return s;
}

}  // namespace rlab
