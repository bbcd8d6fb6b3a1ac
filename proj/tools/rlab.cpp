#include <algorithm>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "json.hpp"
#include "rlab/corpus.hpp"
#include "rlab/dyadic.hpp"
#include "rlab/harness.hpp"
#include "rlab/potentials.hpp"
#include "rlab/rough.hpp"
#include "rlab/sparse.hpp"
#include "rlab/sphere.hpp"
#include "rlab/weights.hpp"

using json = nlohmann::json;
using namespace rlab;

namespace {

std::map<std::string, double> parse_params(const std::vector<std::string>& items) {
  std::map<std::string, double> out;
  for (const std::string& item : items) {
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw CLI::ValidationError("--param", "expected key=value, got " + item);
    out[item.substr(0, eq)] = std::stod(item.substr(eq + 1));
  }
  return out;
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return json::parse(in);
}

template <typename Write>
void write_to(const std::string& path, Write&& write) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  write(out);
}

struct FunctionArgs {
  std::string id;
  std::vector<std::string> params;
  int dim = 2;
  int resolution = 128;
  double lower = -2.0;
  double side = 4.0;

  void attach(CLI::App* app) {
    app->add_option("f-id", id, "corpus function")->required();
    app->add_option("--param", params, "function parameter key=value (repeatable)");
    app->add_option("--dim", dim, "dimension")->check(CLI::IsMember({2, 3}));
    app->add_option("--res", resolution, "cells per axis");
    app->add_option("--lower", lower, "box corner coordinate");
    app->add_option("--side", side, "box side length");
  }

  GridFunction sample_function() const {
    return sample(id, parse_params(params), Box(Point::Constant(dim, lower), side), resolution);
  }
};

Shift parse_shift(const std::vector<int>& v) {
  Shift t{0, 0, 0};
  for (std::size_t i = 0; i < std::min<std::size_t>(3, v.size()); ++i) t[i] = v[i];
  return t;
}

void print_summary(const GridFunction& g, const std::string& label) {
  Eigen::Index arg = 0;
  const double top = g.values().maxCoeff(&arg);
  const Point x = g.center(arg);
  std::cout << label << ": min " << g.values().minCoeff() << ", max " << top << " at (";
  for (Eigen::Index i = 0; i < x.size(); ++i) std::cout << (i ? ", " : "") << x[i];
  std::cout << ")" << std::endl;
}

json point_values_json(const GridFunction& f, const PointValues& pv) {
  json points = json::array();
  for (std::size_t i = 0; i < pv.cells.size(); ++i) {
    const Point x = f.center(pv.cells[i]);
    points.push_back({{"x", std::vector<double>(x.data(), x.data() + x.size())},
                      {"value", pv.values[static_cast<Eigen::Index>(i)]}});
  }
  return {{"error_bound", pv.error_bound}, {"points", std::move(points)}};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Pointwise potential bounds for rough operators: checks and evaluators"};
  app.require_subcommand(1);

  auto* list_checks = app.add_subcommand("list-checks", "list registered checks");

  std::string run_target;
  std::vector<int> run_res;
  std::string json_out, csv_out, config_path;
  int jobs = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  auto* run = app.add_subcommand("run", "run one check or all of them");
  run->add_option("check", run_target, "check id or 'all'")->required();
  run->add_option("--res", run_res, "resolutions, comma separated")->delimiter(',');
  run->add_option("--json", json_out, "write the JSON report here");
  run->add_option("--csv", csv_out, "write the CSV report here");
  run->add_option("--config", config_path, "JSON file overriding functions, resolutions and parameters");
  run->add_option("--jobs", jobs, "checks run concurrently")->check(CLI::PositiveNumber);

  FunctionArgs sparse_fn;
  double sp_alpha = 1.0, sp_s = 1.0;
  std::vector<int> sp_shift;
  bool sp_gradient = false;
  std::string sp_out;
  auto* build = app.add_subcommand("build-sparse", "stopping-time sparse family of a corpus function");
  sparse_fn.attach(build);
  build->add_option("--alpha", sp_alpha, "fractional order")->check(CLI::PositiveNumber);
  build->add_option("--s", sp_s, "averaging exponent");
  build->add_option("--shift", sp_shift, "shift numerators in {0,1}, comma separated")->delimiter(',');
  build->add_flag("--gradient", sp_gradient, "build from |grad f| instead of f");
  build->add_option("--out", sp_out, "write the family JSON here");

  std::string op;
  FunctionArgs eval_fn;
  double ev_alpha = 1.0, ev_s = 1.0;
  std::string ev_symbol = "harmonic1";
  std::vector<std::string> ev_symbol_params;
  int ev_stride = 16;
  std::string ev_out;
  auto* eval = app.add_subcommand("eval", "evaluate an operator on a corpus function");
  eval->add_option("operator", op, "operator")
      ->required()
      ->check(CLI::IsMember({"sample", "gradient", "riesz", "fractional_maximal", "dyadic_fractional",
                             "sparse_fractional", "rough", "rough_maximal", "sharp_maximal",
                             "ball_maximal", "spherical_maximal"}));
  eval_fn.attach(eval);
  eval->add_option("--alpha", ev_alpha, "order");
  eval->add_option("--s", ev_s, "averaging exponent");
  eval->add_option("--symbol", ev_symbol, "sphere symbol for the rough operators");
  eval->add_option("--symbol-param", ev_symbol_params, "symbol parameter key=value (repeatable)");
  eval->add_option("--stride", ev_stride, "lattice stride for pointwise operators")->check(CLI::PositiveNumber);
  eval->add_option("--out", ev_out, "grid operators: binary grid file; pointwise operators: JSON");

  int sym_dim = 2;
  std::string sym_dump;
  auto* symbols = app.add_subcommand("list-symbols", "list the sphere symbol corpus");
  symbols->add_option("--dim", sym_dim, "dimension")->check(CLI::IsMember({2, 3}));
  symbols->add_option("--dump", sym_dump, "print the sampled symbol as JSON");

  int sw_dim = 2;
  double sw_p = 2.0, sw_q = 2.0, sw_s = 1.0, sw_step = 0.125;
  std::string sw_out;
  auto* sweep = app.add_subcommand("sweep-weights", "classify power weights over a lambda grid");
  sweep->add_option("--dim", sw_dim, "dimension")->check(CLI::IsMember({2, 3}));
  sweep->add_option("--p", sw_p, "p");
  sweep->add_option("--q", sw_q, "q");
  sweep->add_option("--s", sw_s, "rescaling exponent");
  sweep->add_option("--step", sw_step, "lambda step");
  sweep->add_option("--csv", sw_out, "write the sweep CSV here");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*list_checks) {
      for (const CheckSpec& s : registry())
        std::cout << std::left << std::setw(12) << s.id << std::setw(12) << to_string(s.kind) << "expect "
                  << std::setw(6) << to_string(s.expected) << ' ' << s.theorem << '\n';
      return 0;
    }

    if (*run) {
      json config = json::object();
      if (!config_path.empty()) config = read_json_file(config_path);
      if (!run_res.empty()) config["resolutions"] = run_res;
      std::vector<CheckSpec> specs;
      if (run_target == "all") {
        for (const CheckSpec& s : registry()) specs.push_back(apply_config(s, config));
      } else {
        specs.push_back(apply_config(find_check(run_target), config));
      }
      const std::vector<CheckReport> reports = run_checks(specs, jobs);
      bool all_expected = true;
      for (const CheckReport& r : reports) {
        all_expected = all_expected && r.as_expected();
        std::cout << std::left << std::setw(12) << r.check_id << std::setw(13) << to_string(r.verdict)
                  << "expected " << std::setw(13) << to_string(r.expected)
                  << (r.as_expected() ? "ok   " : "MISS ") << std::right << std::fixed
                  << std::setprecision(1) << std::setw(6) << r.runtime << " s  " << std::left << r.detail
                  << std::endl;
      }
      if (!json_out.empty()) write_to(json_out, [&](std::ostream& o) { write_reports_json(o, reports); });
      if (!csv_out.empty()) write_to(csv_out, [&](std::ostream& o) { write_reports_csv(o, reports); });
      return all_expected ? 0 : 1;
    }

    if (*build) {
      const GridFunction f = sparse_fn.sample_function();
      const GridFunction g = sp_gradient ? gradient(f).magnitude() : f;
      const SparseFamily family = build_sparse_family(g, sp_alpha, sp_s, parse_shift(sp_shift));
      const Certificate cert = certify_sparseness(family, g);
      std::cout << family.cubes.size() << " cubes, generations " << family.k_lo << ".." << family.k_hi
                << ", certificate " << (cert.pass ? "pass" : "fail") << ", min |E_Q|/|Q| "
                << cert.worst_ratio << std::endl;
      if (!cert.pass) std::cout << cert.detail << std::endl;
      if (!sp_out.empty())
        write_to(sp_out, [&](std::ostream& o) { o << to_json(family).dump(1) << '\n'; });
      return cert.pass ? 0 : 1;
    }

    if (*eval) {
      const GridFunction f = eval_fn.sample_function();
      const int n = f.dim();
      auto grid_result = [&](const GridFunction& g) {
        print_summary(g, op);
        if (!ev_out.empty()) write_to(ev_out, [&](std::ostream& o) { write_grid_function(o, g); });
        return 0;
      };
      if (op == "sample") return grid_result(f);
      if (op == "gradient") return grid_result(gradient(f).magnitude());
      if (op == "riesz") return grid_result(riesz_potential(f, ev_alpha));
      if (op == "fractional_maximal") return grid_result(fractional_maximal(f, ev_alpha, ev_s));
      if (op == "dyadic_fractional") return grid_result(dyadic_fractional(f, ev_alpha, Shift{0, 0, 0}, ev_s));
      if (op == "sparse_fractional") {
        Values sum = Values::Zero(f.size());
        for (const Shift& t : all_shifts(n))
          sum += sparse_fractional(f, build_sparse_family(f, ev_alpha, ev_s, t)).values();
        return grid_result(GridFunction(f.box(), f.resolution(), sum));
      }
      const std::vector<Eigen::Index> cells = cell_lattice(f, ev_stride);
      const SphereSymbol omega = make_symbol(ev_symbol, n, 0, parse_params(ev_symbol_params));
      PointValues pv;
      if (op == "rough") pv = rough_singular(f, omega, ev_alpha, cells);
      else if (op == "rough_maximal") pv = rough_maximal(f, omega, ev_alpha, cells);
      else if (op == "sharp_maximal") pv = sharp_rough_maximal(f, omega, ev_alpha, cells);
      else if (op == "ball_maximal") pv = ball_fractional_maximal(f, ev_alpha, cells);
      else pv = spherical_maximal(f, ev_alpha, cells);
      Eigen::Index arg = 0;
      const double top = pv.values.abs().maxCoeff(&arg);
      const Point x = f.center(pv.cells[arg]);
      std::cout << op << ": " << pv.cells.size() << " points, sup |value| " << top << " at (";
      for (Eigen::Index i = 0; i < x.size(); ++i) std::cout << (i ? ", " : "") << x[i];
      std::cout << "), error bound " << pv.error_bound << std::endl;
      if (!ev_out.empty())
        write_to(ev_out, [&](std::ostream& o) { o << point_values_json(f, pv).dump(1) << '\n'; });
      return 0;
    }

    if (*symbols) {
      if (!sym_dump.empty()) {
        std::cout << to_json(make_symbol(sym_dump, sym_dim)).dump(1) << std::endl;
        return 0;
      }
      for (const SymbolInfo& info : symbol_catalog()) {
        const SphereSymbol om = make_symbol(info.id, sym_dim);
        std::cout << std::left << std::setw(11) << info.id << (info.mean_zero ? "mean-zero  " : "           ")
                  << "L1 " << std::setw(10) << om.l1_norm() << ' ' << info.description << '\n';
      }
      return 0;
    }

    if (*sweep) {
      const WindowSweep ws = sweep_window(sw_dim, sw_p, sw_q, sw_s, sw_step);
      std::cout << "window (" << ws.lower << ", " << ws.upper << "), " << ws.entries.size()
                << " weights, " << ws.misclassified() << " misclassified" << std::endl;
      if (!sw_out.empty()) write_to(sw_out, [&](std::ostream& o) { write_window_csv(o, {ws}); });
      return ws.misclassified() == 0 ? 0 : 1;
    }
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid parameters: " << e.what() << std::endl;
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << std::endl;
    return 2;
  }
  return 0;
}
