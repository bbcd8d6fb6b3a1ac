#include <set>
#include <sstream>

#include "doctest.h"
#include "rlab/harness.hpp"

using namespace rlab;
using json = nlohmann::json;

namespace {

Measurement run(int R, double constant, double band = 0.0, bool holds = true,
                std::map<std::string, double> pairings = {}) {
  Measurement m;
  m.resolution = R;
  m.constant = constant;
  m.error_bound = band;
  m.holds = holds;
  m.pairings = std::move(pairings);
  return m;
}

CheckSpec with(const std::string& id, const std::string& key, json value) {
  CheckSpec s = find_check(id);
  s.params[key] = std::move(value);
  return s;
}

}  // namespace

TEST_SUITE("harness") {
  TEST_CASE("registry covers every check") {
    const std::vector<std::string> ids{"DY-THIRD", "SP-DOM",  "DIV-EX",   "PW-CRIT",     "PW-SUB",
                                       "PW-END",   "PW-SOB",  "PW-MAXSHARP", "PW-MAXTRIO", "PW-SPH",
                                       "PS-LOR",   "PS-TRU",  "NEG-MAX",  "W-POW1",      "W-POW2",
                                       "W-CMP",    "W-AINF",  "W-EQV"};
    std::set<std::string> seen;
    for (const CheckSpec& s : registry()) {
      seen.insert(s.id);
      CHECK_MESSAGE(!s.theorem.empty(), s.id);
      CHECK(s.params.at("dim") == 2);
      CHECK(s.expected == (s.id == "NEG-MAX" ? Verdict::fail : Verdict::pass));
      CHECK_NOTHROW(validate(s));
    }
    for (const std::string& id : ids) CHECK_MESSAGE(seen.count(id) == 1, id);
    CHECK(seen.size() == ids.size());
    CHECK(find_check("NEG-MAX").kind == CheckKind::divergence);
    CHECK_THROWS_AS(find_check("NOPE"), std::invalid_argument);
  }

  TEST_CASE("parameter windows are enforced") {
    CHECK_THROWS_AS(validate(with("PW-CRIT", "alphas", {2.0})), std::invalid_argument);
    CHECK_THROWS_AS(validate(with("PW-CRIT", "symbols", {"one"})), std::invalid_argument);
    CHECK_THROWS_AS(validate(with("PW-END", "alphas", {1.0})), std::invalid_argument);
    CHECK_THROWS_AS(validate(with("PW-SUB", "cases", {{{"r", 2.0}, {"alpha", 0.5}}})), std::invalid_argument);
    CHECK_THROWS_AS(validate(with("PW-SUB", "cases", {{{"r", 1.5}, {"alpha", 1.7}}})), std::invalid_argument);
    CHECK_THROWS_AS(validate(with("PW-MAXSHARP", "alphas", {0.5})), std::invalid_argument);
    CHECK_THROWS_AS(validate(with("PS-LOR", "exponents", {2.0})), std::invalid_argument);
    CHECK_THROWS_AS(validate(with("W-POW1", "p", 1.0)), std::invalid_argument);
    CHECK_THROWS_AS(validate(with("W-POW2", "p", 5.0)), std::invalid_argument);
    CHECK_THROWS_AS(validate(with("W-CMP", "lambdas", {-2.0})), std::invalid_argument);
    CHECK_THROWS_AS(validate(with("SP-DOM", "cases", {{{"alpha", 1.0}, {"s", 2.0}}})), std::invalid_argument);
    CHECK_THROWS_AS(validate(with("NEG-MAX", "gamma", 0.0)), std::invalid_argument);
    CHECK_THROWS_AS(validate(with("PW-SOB", "dim", 4)), std::invalid_argument);
    CheckSpec odd = find_check("PW-SOB");
    odd.resolutions = {100};
    CHECK_THROWS_AS(validate(odd), std::invalid_argument);
    try {
      validate(with("PW-END", "alphas", {1.0}));
    } catch (const std::invalid_argument& e) {
      CHECK(std::string(e.what()).rfind("PW-END", 0) == 0);
    }
    CHECK_THROWS_AS(run_checks({find_check("DIV-EX"), with("PW-END", "alphas", {1.0})}, 2),
                    std::invalid_argument);
  }

  TEST_CASE("verdicts from measurements") {
    CHECK(judge(CheckKind::exact, {}) == Verdict::inconclusive);
    CHECK(judge(CheckKind::exact, {run(0, 1.0)}) == Verdict::pass);
    CHECK(judge(CheckKind::consistency, {run(64, 1.0), run(128, 1.0, 0.0, false)}) == Verdict::fail);

    CHECK(judge(CheckKind::documented, {run(64, 1.0, 0.2), run(128, 1.0, 0.1)}) == Verdict::pass);
    CHECK(judge(CheckKind::documented, {run(64, 1.0, 0.2), run(128, 1.0, 0.2)}) == Verdict::inconclusive);
    CHECK(judge(CheckKind::documented, {run(64, 1.0, 0.2, false), run(128, 1.0, 0.1)}) == Verdict::fail);

    const auto emp = [](double a, double b) {
      return std::vector<Measurement>{run(64, a, 0, true, {{"x", a}}), run(128, b, 0, true, {{"x", b}})};
    };
    CHECK(judge(CheckKind::empirical, emp(2.0, 2.1)) == Verdict::pass);
    CHECK(judge(CheckKind::empirical, emp(2.0, 2.5)) == Verdict::inconclusive);
    CHECK(judge(CheckKind::empirical, emp(2.0, INFINITY)) == Verdict::fail);
    CHECK(judge(CheckKind::empirical, {run(64, 1.0)}) == Verdict::inconclusive);
    std::string why;
    judge(CheckKind::empirical, emp(2.0, 2.5), &why);
    CHECK(why.find("x") != std::string::npos);

    CHECK(judge(CheckKind::divergence, {run(64, 1.0), run(128, 1.5), run(256, 2.2)}) == Verdict::fail);
    CHECK(judge(CheckKind::divergence, {run(64, 1.0), run(128, 1.5), run(256, 1.6)}) == Verdict::inconclusive);
    CHECK(judge(CheckKind::divergence, {run(64, 1.0), run(128, 1.0)}) == Verdict::pass);
    CHECK(judge(CheckKind::divergence, {run(64, 1.0), run(256, 1.44)}) == Verdict::fail);
    CHECK(judge(CheckKind::divergence, {run(64, 1.0)}) == Verdict::inconclusive);
  }

  TEST_CASE("configuration overrides") {
    json config = {{"resolutions", {32, 64}},
                   {"checks", {{"PW-END", {{"alphas", {0.5}}}}}},
                   {"functions", {{{"id", "bump"}, {"params", {{"radius", 0.5}}}}}}};
    const CheckSpec end = apply_config(find_check("PW-END"), config);
    CHECK(end.resolutions == std::vector<int>{32, 64});
    CHECK(end.params.at("alphas") == json{0.5});
    CHECK(end.params.at("symbols") == find_check("PW-END").params.at("symbols"));
    CHECK(end.params.at("functions").size() == 1);
    CHECK(apply_config(find_check("DIV-EX"), config).resolutions.empty());
    const CheckSpec three = apply_config(find_check("PW-SOB"), json{{"dim", 3}});
    CHECK(three.params.at("dim") == 3);
    CHECK(three.resolutions == std::vector<int>{32, 64});
  }

  TEST_CASE("reports are reproducible byte for byte") {
    CheckSpec spec = with("DY-THIRD", "trials", 500);
    const std::vector<CheckSpec> specs{spec, find_check("DIV-EX")};
    std::ostringstream a, b;
    write_reports_json(a, run_checks(specs, 1));
    write_reports_json(b, run_checks(specs, 2));
    CHECK(a.str() == b.str());
    const json j = json::parse(a.str());
    REQUIRE(j.size() == 2);
    for (const json& r : j) {
      for (const char* key : {"check_id", "theorem", "params", "per_resolution", "verdict"})
        CHECK_MESSAGE(r.contains(key), key);
      CHECK(r.at("verdict") == "pass");
      for (const json& m : r.at("per_resolution")) {
        for (const char* key : {"res", "constant", "error_bound", "lhs_sup_location"})
          CHECK_MESSAGE(m.contains(key), key);
        CHECK_FALSE(m.contains("seconds"));
      }
      CHECK(a.str().find("runtime") == std::string::npos);
    }
    std::ostringstream csv;
    write_reports_csv(csv, run_checks(specs, 1));
    std::string line;
    std::istringstream in(csv.str());
    int rows = 0;
    while (std::getline(in, line)) ++rows;
    CHECK(rows == 3);
  }

  TEST_CASE("non-finite numbers serialise as strings") {
    CheckReport r;
    r.check_id = "X";
    r.per_resolution = {run(64, INFINITY, NAN)};
    const json j = to_json(r);
    CHECK(j["per_resolution"][0]["constant"] == "inf");
    CHECK(j["per_resolution"][0]["error_bound"] == "nan");
  }
}
