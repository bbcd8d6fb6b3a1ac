#include "rlab/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <exception>
#include <thread>
#include <cmath>
#include <ostream>
#include <stdexcept>

#include "checks.hpp"
#include "rlab/sphere.hpp"
#include "rlab/types.hpp"

namespace rlab {

namespace {

using json = nlohmann::json;

const std::vector<int> kGridResolutions = {128, 256};
const std::vector<int> kGridResolutions3 = {32, 64};

json functions_default() {
  return json::array({{{"id", "bump"}, {"params", {{"cx", 0.2}, {"cy", -0.1}, {"radius", 1.0}}}},
                      {{"id", "tensor_bump"}, {"params", {{"cx", -0.15}, {"cy", 0.1}, {"radius", 0.9}}}}});
}

json llog_symbol() { return {{"id", "llog"}, {"params", {{"beta", 2.5}}}}; }

std::vector<CheckSpec> build_registry() {
  const json F = functions_default();
  const json weak_symbols = json::array({"harmonic1", "sign", "power"});
  std::vector<CheckSpec> r;
  auto add = [&](std::string id, std::string theorem, CheckKind kind, Verdict expected,
                 std::vector<int> res, json params) {
    params["dim"] = 2;
    r.push_back({std::move(id), std::move(theorem), kind, expected, std::move(res), std::move(params)});
  };
  add("DY-THIRD",
      "one-third trick: every cube lies in a shifted dyadic cube with side at most six times "
      "larger, and a cube of side 2^k lies in a level k+3 shifted dyadic cube",
      CheckKind::exact, Verdict::pass, {}, {{"trials", 10000}, {"seed", 7}});
  add("SP-DOM",
      "stopping cubes of the dyadic L^s fractional operator form a sparse family, and the dyadic "
      "operator is at most a/(1-2^-alpha) times the sparse one, a = 2^((n+1)/s)",
      CheckKind::exact, Verdict::pass, kGridResolutions,
      {{"functions", F},
       {"cases", json::array({{{"alpha", 0.5}, {"s", 1.0}}, {{"alpha", 1.0}, {"s", 1.5}},
                              {{"alpha", 1.5}, {"s", 1.0}}})}});
  add("DIV-EX",
      "the L^s sparse operator over {[0,2^k)^n} applied to the unit cube is the series "
      "sum 2^(k(alpha-n/s)), finite exactly when s < n/alpha",
      CheckKind::exact, Verdict::pass, {},
      {{"terms", 10},
       {"cases", json::array({{{"alpha", 1.0}, {"s", 1.0}}, {{"alpha", 1.0}, {"s", 1.5}},
                              {{"alpha", 1.0}, {"s", 2.0}}, {{"alpha", 1.5}, {"s", 2.0}}})}});
  add("PW-CRIT",
      "|T_{Omega,alpha} f| <= c ||Omega||_{L^{n,oo}} I_alpha(|grad f|) for mean-zero Omega in "
      "weak L^n, 0 < alpha < n",
      CheckKind::empirical, Verdict::pass, kGridResolutions,
      {{"functions", F}, {"symbols", weak_symbols}, {"alphas", {0.5, 1.0, 1.5}}});
  add("PW-SUB",
      "|T_{Omega,alpha} f| <= c ||Omega||_{L^{r,r*}} sum_t I^{S_t}_{alpha,L^s}(|grad f|) with "
      "1/s = 1/n + 1/r', 1 < r < n, alpha < 1 + n/r'",
      CheckKind::empirical, Verdict::pass, kGridResolutions,
      {{"functions", F},
       {"symbols", weak_symbols},
       {"cases", json::array({{{"r", 1.5}, {"alpha", 0.5}}, {{"r", 1.5}, {"alpha", 1.0}},
                              {{"r", 1.5}, {"alpha", 1.5}}, {{"r", 4.0 / 3.0}, {"alpha", 0.5}},
                              {{"r", 4.0 / 3.0}, {"alpha", 1.0}}})}});
  add("PW-END",
      "|T_{Omega,alpha} f| <= c ||Omega||_{L(log L)^{1/n'}} sum_t I^{S_t}_{alpha,L^n}(|grad f|) "
      "for mean-zero Omega, 0 < alpha < 1",
      CheckKind::empirical, Verdict::pass, kGridResolutions,
      {{"functions", F}, {"symbols", json::array({llog_symbol(), "sign"})}, {"alphas", {0.25, 0.5, 0.75}}});
  add("PW-SOB", "|f(x)| <= (1/omega_{n-1}) integral |grad f(y)| |x-y|^{1-n} dy",
      CheckKind::documented, Verdict::pass, kGridResolutions,
      {{"functions",
        [&] {
          json f = F;
          f.push_back({{"id", "smooth_step"}, {"params", {{"radius", 1.0}, {"width", 0.5}}}});
          return f;
        }()}});
  add("PW-MAXSHARP",
      "|M_{Omega,alpha} f - M#_{Omega,alpha} f| <= (||Omega||_1 / omega_{n-1}) M_{alpha-1} f, "
      "1 <= alpha < n",
      CheckKind::documented, Verdict::pass, kGridResolutions,
      {{"functions", F},
       {"symbols", json::array({"one", "harmonic1", "sign", "power", llog_symbol()})},
       {"alphas", {1.0, 1.5}},
       {"lattice", 16}});
  add("PW-MAXTRIO",
      "M#_{Omega,alpha} f <= c ||Omega|| M_{alpha,L^s}(|grad f|) with (norm, s) = (L^{n,oo}, 1), "
      "(L^{r,r*}, r'n/(r'+n)) or (L(log L)^{1/n'}, n)",
      CheckKind::empirical, Verdict::pass, kGridResolutions,
      {{"functions", F},
       {"lattice", 16},
       {"branches",
        json::array({{{"branch", "weak"}, {"alphas", {0.5, 1.0, 1.5}}, {"symbols", weak_symbols}},
                     {{"branch", "lorentz"}, {"r", 1.5}, {"alphas", {0.5, 1.0, 1.5}},
                      {"symbols", weak_symbols}},
                     {{"branch", "log"}, {"alphas", {0.25, 0.5, 0.75}},
                      {"symbols", json::array({llog_symbol(), "sign"})}}})}});
  add("PW-SPH", "S_{alpha-1} f <= c_n I_alpha(|grad f|) for the spherical maximal function, 1 <= alpha < n",
      CheckKind::empirical, Verdict::pass, kGridResolutions,
      {{"functions", F}, {"alphas", {1.0, 1.5}}, {"lattice", 16}});
  add("PS-LOR", "||f - f_Q||_{L^{p*,p}(Q)} <= C l(Q) (mean_Q |grad f|^p)^{1/p}, 1 <= p < n",
      CheckKind::empirical, Verdict::pass, kGridResolutions,
      {{"functions", F}, {"exponents", {1.0, 1.5}}, {"cubes", 200}, {"seed", 11}});
  add("PS-TRU", "||f - f_Q||_{exp L^{n'}(Q)} <= C (integral_Q |grad f|^n)^{1/n}", CheckKind::empirical,
      Verdict::pass, kGridResolutions, {{"functions", F}, {"cubes", 200}, {"seed", 13}});
  add("NEG-MAX",
      "Mf <= c M_1(|grad f|) is false: the ratio is unbounded on truncated log-power functions",
      CheckKind::divergence, Verdict::fail, kGridResolutions,
      {{"gamma", 1.0}, {"delta_cells", 1.0}, {"radius", 1.0}, {"lattice", 32}});
  add("W-POW1",
      "|| |x|^lambda T_{Omega,alpha} f ||_q <= C || |x|^lambda grad f ||_p for Omega in L^{r,r*}, "
      "r'n/(r'+n) < p < n/alpha, alpha - n/p < lambda < 1 + n/r' - n/p",
      CheckKind::empirical, Verdict::pass, kGridResolutions,
      {{"functions", json::array({F[0]})}, {"alpha", 0.5}, {"r", 1.5}, {"p", 2.0}, {"step", 0.125},
       {"margin", 0.5}});
  add("W-POW2",
      "|| |x|^lambda T_{Omega,alpha} f ||_q <= C || |x|^lambda grad f ||_p for Omega in "
      "L(log L)^{1/n'}, 0 < alpha < 1, n < p < n/alpha, alpha - n/p < lambda < 1 - n/p",
      CheckKind::empirical, Verdict::pass, kGridResolutions,
      {{"functions", json::array({F[0]})}, {"alpha", 0.5}, {"p", 3.0}, {"step", 0.125}, {"margin", 0.5}});
  add("W-CMP", "||I^S_{alpha,L^s} f||_{L^p(w)} <= C ||M_{alpha,L^s} f||_{L^p(w)} for w in A_oo",
      CheckKind::empirical, Verdict::pass, kGridResolutions,
      {{"functions", F}, {"alpha", 1.0}, {"s", {1.0, 1.2}}, {"lambdas", {-1.0, 0.0, 1.0}},
       {"exponents", {1.0, 2.0}}, {"weak", {false}}});
  add("W-AINF",
      "||I^S_{alpha,L^s} f|| <= C ||[I_{alpha s}(f^s)]^{1/s}|| in L^p(w) and L^{p,oo}(w), w in A_oo",
      CheckKind::empirical, Verdict::pass, kGridResolutions,
      {{"functions", F}, {"alpha", 1.0}, {"s", {1.0, 1.2}}, {"lambdas", {-1.0, 0.0, 1.0}},
       {"exponents", {1.0, 2.0}}, {"weak", {false, true}}});
  add("W-EQV",
      "w in A_{p,q} iff w^q in A_{1+q/p'}, with [w^q]_{A_{1+q/p'}} = [w]_{A_{p,q}}^q, over power "
      "weights",
      CheckKind::consistency, Verdict::pass, {},
      {{"cases", json::array({{{"p", 2.0}, {"q", 2.0}}, {{"p", 1.5}, {"q", 3.0}}})},
       {"step", 0.125}, {"margin", 0.5}, {"sweep_resolution", 256}});
  return r;
}

[[noreturn]] void reject(const CheckSpec& spec, const std::string& why) {
  throw std::invalid_argument(spec.id + ": " + why);
}

void require_alpha_range(const CheckSpec& spec, double a, double lo, bool lo_closed, double hi,
                         const std::string& hypothesis) {
  const bool low_ok = lo_closed ? a >= lo : a > lo;
  if (!low_ok || !(a < hi)) reject(spec, "alpha = " + std::to_string(a) + " violates " + hypothesis);
}

void require_mean_zero(const CheckSpec& spec, const json& symbols) {
  for (const json& s : symbols) {
    const std::string id = s.is_string() ? s.get<std::string>() : s.at("id").get<std::string>();
    bool found = false;
    for (const SymbolInfo& info : symbol_catalog())
      if (info.id == id) {
        found = true;
        if (!info.mean_zero) reject(spec, "symbol " + id + " must have mean zero");
      }
    if (!found) reject(spec, "unknown symbol " + id);
  }
}

json number(double v) {
  if (std::isfinite(v)) return v;
  return std::isnan(v) ? "nan" : (v > 0 ? "inf" : "-inf");
}

double octaves_between(int a, int b) { return std::log2(static_cast<double>(b) / a); }

}  // namespace

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::pass:
      return "pass";
    case Verdict::fail:
      return "fail";
    default:
      return "inconclusive";
  }
}

std::string to_string(CheckKind k) {
  switch (k) {
    case CheckKind::documented:
      return "documented";
    case CheckKind::empirical:
      return "empirical";
    case CheckKind::divergence:
      return "divergence";
    case CheckKind::exact:
      return "exact";
    default:
      return "consistency";
  }
}

const std::vector<CheckSpec>& registry() {
  static const std::vector<CheckSpec> r = build_registry();
  return r;
}

CheckSpec find_check(const std::string& id) {
  for (const CheckSpec& s : registry())
    if (s.id == id) return s;
  throw std::invalid_argument("unknown check: " + id);
}

void validate(const CheckSpec& spec) {
  const json& p = spec.params;
  const int n = p.at("dim").get<int>();
  if (n != 2 && n != 3) reject(spec, "dimension must be 2 or 3");
  for (int R : spec.resolutions)
    if (!is_power_of_two(R) || R < 16) reject(spec, "resolution must be a power of two >= 16");
  const std::string& id = spec.id;
  if (id == "PW-CRIT") {
    for (double a : p.at("alphas")) require_alpha_range(spec, a, 0.0, false, n, "0 < alpha < n");
    require_mean_zero(spec, p.at("symbols"));
  } else if (id == "PW-SUB") {
    for (const json& c : p.at("cases")) {
      const double r = c.at("r"), a = c.at("alpha");
      if (!(r > 1.0 && r < n)) reject(spec, "r = " + std::to_string(r) + " violates 1 < r < n");
      require_alpha_range(spec, a, 0.0, false, 1.0 + n / conjugate(r), "0 < alpha < 1 + n/r'");
    }
    require_mean_zero(spec, p.at("symbols"));
  } else if (id == "PW-END") {
    for (double a : p.at("alphas")) require_alpha_range(spec, a, 0.0, false, 1.0, "0 < alpha < 1");
    require_mean_zero(spec, p.at("symbols"));
  } else if (id == "PW-MAXSHARP") {
    for (double a : p.at("alphas")) require_alpha_range(spec, a, 1.0, true, n, "1 <= alpha < n");
  } else if (id == "PW-MAXTRIO") {
    for (const json& b : p.at("branches")) {
      const std::string kind = b.at("branch");
      for (double a : b.at("alphas")) {
        if (kind == "weak") {
          require_alpha_range(spec, a, 0.0, false, n, "0 < alpha < n");
        } else if (kind == "lorentz") {
          const double r = b.at("r");
          if (!(r > 1.0 && r < n)) reject(spec, "r must satisfy 1 < r < n");
          require_alpha_range(spec, a, 0.0, false, 1.0 + n / conjugate(r), "0 < alpha < 1 + n/r'");
        } else if (kind == "log") {
          require_alpha_range(spec, a, 0.0, false, 1.0, "0 < alpha < 1");
        } else {
          reject(spec, "unknown branch " + kind);
        }
      }
    }
  } else if (id == "PW-SPH") {
    for (double a : p.at("alphas")) require_alpha_range(spec, a, 1.0, true, n, "1 <= alpha < n");
  } else if (id == "PS-LOR") {
    for (double e : p.at("exponents"))
      if (!(e >= 1.0 && e < n)) reject(spec, "p must satisfy 1 <= p < n");
  } else if (id == "NEG-MAX") {
    if (!(p.at("gamma").get<double>() > 0.0)) reject(spec, "the log power must be positive");
  } else if (id == "W-POW1" || id == "W-POW2") {
    const double a = p.at("alpha"), pe = p.at("p");
    double s = n;
    if (id == "W-POW1") {
      const double r = p.at("r");
      if (!(r > 1.0 && r < n)) reject(spec, "r must satisfy 1 < r < n");
      require_alpha_range(spec, a, 0.0, false, 1.0 + n / conjugate(r), "0 < alpha < 1 + n/r'");
      s = conjugate(r) * n / (conjugate(r) + n);
    } else {
      require_alpha_range(spec, a, 0.0, false, 1.0, "0 < alpha < 1");
    }
    if (!(pe > s && pe < n / a))
      reject(spec, "p = " + std::to_string(pe) + " violates " + std::to_string(s) + " < p < n/alpha");
  } else if (id == "W-CMP" || id == "W-AINF" || id == "SP-DOM") {
    auto check_s = [&](double a, double s) {
      if (!(a > 0.0)) reject(spec, "alpha must be positive");
      if (!(s >= 1.0 && s < n / a)) reject(spec, "s = " + std::to_string(s) + " violates 1 <= s < n/alpha");
    };
    if (id == "SP-DOM") {
      for (const json& c : p.at("cases")) check_s(c.at("alpha"), c.at("s"));
    } else {
      for (double s : p.at("s")) check_s(p.at("alpha"), s);
      for (double lam : p.at("lambdas"))
        if (!(lam > -n)) reject(spec, "power weight |x|^lambda needs lambda > -n to lie in A_oo");
      for (double e : p.at("exponents"))
        if (!(e > 0.0)) reject(spec, "p must be positive");
    }
  } else if (id == "DIV-EX") {
    for (const json& c : p.at("cases"))
      if (!(c.at("alpha").get<double>() > 0.0) || !(c.at("s").get<double>() >= 1.0))
        reject(spec, "need alpha > 0 and s >= 1");
  } else if (id == "W-EQV") {
    for (const json& c : p.at("cases"))
      if (!(c.at("p").get<double>() > 1.0) || !(c.at("q").get<double>() > 0.0))
        reject(spec, "need p > 1 and q > 0");
  }
}

Verdict judge(CheckKind kind, const std::vector<Measurement>& runs, std::string* detail) {
  auto say = [&](const std::string& s) {
    if (detail) *detail = s;
  };
  if (runs.empty()) {
    say("no measurements");
    return Verdict::inconclusive;
  }
  for (const Measurement& m : runs)
    if (!m.holds) {
      say("failed at resolution " + std::to_string(m.resolution));
      return Verdict::fail;
    }
  switch (kind) {
    case CheckKind::exact:
    case CheckKind::consistency:
      say("holds at every resolution");
      return Verdict::pass;
    case CheckKind::documented:
      for (std::size_t i = 1; i < runs.size(); ++i)
        if (!(runs[i].error_bound < runs[i - 1].error_bound)) {
          say("band does not shrink under refinement");
          return Verdict::inconclusive;
        }
      say("holds within the band at every resolution");
      return Verdict::pass;
    case CheckKind::empirical: {
      for (const Measurement& m : runs)
        if (!std::isfinite(m.constant)) {
          say("infinite ratio at resolution " + std::to_string(m.resolution));
          return Verdict::fail;
        }
      if (runs.size() < 2) {
        say("stability needs two resolutions");
        return Verdict::inconclusive;
      }
      double worst = 0.0;
      std::string where;
      for (std::size_t i = 1; i < runs.size(); ++i)
        for (const auto& [key, c] : runs[i].pairings) {
          const auto prev = runs[i - 1].pairings.find(key);
          if (prev == runs[i - 1].pairings.end()) continue;
          if (!std::isfinite(c) || !std::isfinite(prev->second)) {
            say("infinite ratio for " + key);
            return Verdict::fail;
          }
          const double change = std::abs(c / prev->second - 1.0);
          if (change > worst) {
            worst = change;
            where = key;
          }
        }
      if (worst > kStability) {
        say("unstable under refinement: " + where + " changes by " + std::to_string(worst));
        return Verdict::inconclusive;
      }
      say("largest relative change " + std::to_string(worst) + (where.empty() ? "" : " (" + where + ")"));
      return Verdict::pass;
    }
    case CheckKind::divergence: {
      if (runs.size() < 2) {
        say("growth needs two resolutions");
        return Verdict::inconclusive;
      }
      double slowest = INFINITY;
      for (std::size_t i = 1; i < runs.size(); ++i) {
        const double per_octave = std::pow(runs[i].constant / runs[i - 1].constant,
                                           1.0 / octaves_between(runs[i - 1].resolution, runs[i].resolution));
        slowest = std::min(slowest, per_octave);
      }
      say("slowest growth per octave " + std::to_string(slowest));
      if (slowest >= kDivergenceGrowth) return Verdict::fail;
      return slowest <= 1.0 ? Verdict::pass : Verdict::inconclusive;
    }
  }
  return Verdict::inconclusive;
}

CheckReport refinement_study(const CheckSpec& spec, const std::vector<int>& resolutions) {
  CheckSpec s = spec;
  s.resolutions = resolutions;
  return run_check(s);
}

CheckReport run_check(const CheckSpec& spec) {
  validate(spec);
  CheckReport rep;
  rep.check_id = spec.id;
  rep.theorem = spec.theorem;
  rep.kind = spec.kind;
  rep.params = spec.params;
  rep.expected = spec.expected;
  const auto start = std::chrono::steady_clock::now();
  const std::vector<int> res = spec.resolutions.empty() ? std::vector<int>{0} : spec.resolutions;
  for (int R : res) rep.per_resolution.push_back(checks::measure(spec.id, spec.params, R));
  rep.verdict = judge(spec.kind, rep.per_resolution, &rep.detail);
  rep.runtime = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return rep;
}

std::vector<CheckReport> run_checks(const std::vector<CheckSpec>& specs, int jobs) {
  for (const CheckSpec& s : specs) validate(s);
  std::vector<CheckReport> out(specs.size());
  std::vector<std::exception_ptr> errors(specs.size());
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i; (i = next++) < specs.size();) {
      try {
        out[i] = run_check(specs[i]);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const std::size_t workers = std::clamp<std::size_t>(jobs, 1, std::max<std::size_t>(1, specs.size()));
  std::vector<std::thread> pool;
  for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

json to_json(const CheckReport& report) {
  json per = json::array();
  for (const Measurement& m : report.per_resolution) {
    json pairings = json::object();
    for (const auto& [k, v] : m.pairings) pairings[k] = number(v);
    per.push_back({{"res", m.resolution},
                   {"constant", number(m.constant)},
                   {"error_bound", number(m.error_bound)},
                   {"lhs_sup_location", m.location},
                   {"holds", m.holds},
                   {"pairings", std::move(pairings)},
                   {"extra", m.extra}});
  }
  return {{"check_id", report.check_id},
          {"theorem", report.theorem},
          {"kind", to_string(report.kind)},
          {"params", report.params},
          {"per_resolution", std::move(per)},
          {"verdict", to_string(report.verdict)},
          {"expected", to_string(report.expected)},
          {"detail", report.detail}};
}

void write_reports_json(std::ostream& out, const std::vector<CheckReport>& reports) {
  json all = json::array();
  for (const CheckReport& r : reports) all.push_back(to_json(r));
  out << all.dump(2) << '\n';
}

void write_reports_csv(std::ostream& out, const std::vector<CheckReport>& reports) {
  out << "check_id,kind,res,constant,error_bound,holds,location,verdict,expected\n";
  out.precision(12);
  for (const CheckReport& r : reports)
    for (const Measurement& m : r.per_resolution) {
      out << r.check_id << ',' << to_string(r.kind) << ',' << m.resolution << ',' << m.constant << ','
          << m.error_bound << ',' << (m.holds ? 1 : 0) << ',';
      for (std::size_t i = 0; i < m.location.size(); ++i) out << (i ? " " : "") << m.location[i];
      out << ',' << to_string(r.verdict) << ',' << to_string(r.expected) << '\n';
    }
}

CheckSpec apply_config(CheckSpec spec, const json& config) {
  if (config.contains("checks") && config.at("checks").contains(spec.id))
    spec.params.merge_patch(config.at("checks").at(spec.id));
  if (config.contains("dim")) spec.params["dim"] = config.at("dim");
  if (config.contains("functions") && spec.params.contains("functions"))
    spec.params["functions"] = config.at("functions");
  if (!spec.resolutions.empty()) {
    if (config.contains("resolutions"))
      spec.resolutions = config.at("resolutions").get<std::vector<int>>();
    else if (spec.params.at("dim").get<int>() == 3)
      spec.resolutions = kGridResolutions3;
  }
  return spec;
}

}  // namespace rlab
