#pragma once

#include <functional>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "json.hpp"

namespace rlab {

enum class Verdict { pass, fail, inconclusive };
std::string to_string(Verdict v);

/// How a check turns measurements into a verdict.
///  documented:  LHS <= C RHS + band at every point, band shrinking with h.
///  empirical:   sup ratio finite and within +-10% between resolutions, per pairing.
///  divergence:  the ratio must grow by a fixed factor per octave (expected failure).
///  exact:       an identity or certificate checked to a fixed tolerance.
///  consistency: finite-sweep agreement of equivalent conditions.
enum class CheckKind { documented, empirical, divergence, exact, consistency };
std::string to_string(CheckKind k);

struct CheckSpec {
  std::string id;
  std::string theorem;  // the inequality under test, stated in words
  CheckKind kind = CheckKind::empirical;
  Verdict expected = Verdict::pass;
  std::vector<int> resolutions;
  nlohmann::json params;  // operator configuration; merged with defaults
};

/// One resolution's outcome.
struct Measurement {
  int resolution = 0;
  double constant = 0.0;     // sup of LHS / RHS (or the check's headline number)
  double error_bound = 0.0;  // quadrature / truncation band carried from the modules
  std::vector<double> location;  // where the sup was attained
  bool holds = true;             // documented / exact / consistency checks
  std::map<std::string, double> pairings;  // per-configuration constants
  double seconds = 0.0;
  nlohmann::json extra = nlohmann::json::object();
};

struct CheckReport {
  std::string check_id;
  std::string theorem;
  CheckKind kind = CheckKind::empirical;
  nlohmann::json params;
  std::vector<Measurement> per_resolution;
  Verdict verdict = Verdict::inconclusive;
  Verdict expected = Verdict::pass;
  std::string detail;
  double runtime = 0.0;

  bool as_expected() const { return verdict == expected; }
};

/// Relative change allowed between consecutive resolutions for empirical constants.
inline constexpr double kStability = 0.10;
/// Per-octave growth required of the expected-failure ratio.
inline constexpr double kDivergenceGrowth = 1.2;

/// Registered checks in display order, with default parameters and resolutions.
const std::vector<CheckSpec>& registry();
/// Registry entry by id; throws std::invalid_argument for unknown ids.
CheckSpec find_check(const std::string& id);

/// Parameter windows required by the inequality under test. Throws
/// std::invalid_argument naming the violated hypothesis.
void validate(const CheckSpec& spec);

/// Validates, then measures at each of the check's resolutions and assigns a verdict.
CheckReport run_check(const CheckSpec& spec);
/// run_check with the resolutions replaced.
CheckReport refinement_study(const CheckSpec& spec, const std::vector<int>& resolutions);
/// run_check over several specs on up to `jobs` worker threads; reports keep
/// the input order.
std::vector<CheckReport> run_checks(const std::vector<CheckSpec>& specs, int jobs);

/// Verdict from measurements alone (exposed for tests).
Verdict judge(CheckKind kind, const std::vector<Measurement>& runs, std::string* detail = nullptr);

/// {check_id, theorem, params, per_resolution: [{res, constant, error_bound,
/// lhs_sup_location, ...}], verdict, expected}
nlohmann::json to_json(const CheckReport& report);
void write_reports_json(std::ostream& out, const std::vector<CheckReport>& reports);
/// One row per (check, resolution).
void write_reports_csv(std::ostream& out, const std::vector<CheckReport>& reports);

/// Applies a configuration object {"resolutions": [...], "checks": {id: {params}}}
/// on top of a registry entry.
CheckSpec apply_config(CheckSpec spec, const nlohmann::json& config);

}  // namespace rlab
