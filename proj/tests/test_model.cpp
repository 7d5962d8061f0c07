// Copyright 2026 The pevmech Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <catch_amalgamated.hpp>

#include "pevmech/model.hpp"
#include "pevmech/polynomial.hpp"
#include "pevmech/rng.hpp"

namespace {

using namespace pevmech;

PolynomialValuation poly(std::vector<MonomialTerm> terms) {
  return PolynomialValuation{std::move(terms)};
}

// Hand-built twin of the bundled two-route relay scenario.
Scenario relay_scenario() {
  Scenario s;
  s.num_agents = 2;
  s.mode = Mode::plain;
  s.allocations = {Allocation{"tau", {{"haul"}, {"relay"}}},
                   Allocation{"tau_prime", {{}, {"direct"}}}};
  AgentType a0;
  a0.valuations = {{"tau", {}}, {"tau_prime", {}}};
  a0.pos = {{"tau", 0.0}, {"tau_prime", 0.0}};
  AgentType a1;
  a1.valuations = {{"tau", poly({{1.0, {{0, 1}, {1, 1}}}})},
                   {"tau_prime", poly({{1.0, {{1, 1}}}})}};
  a1.pos = {{"tau", 1.0}, {"tau_prime", 0.5}};
  s.true_types = {a0, a1};
  return s;
}

}  // namespace

TEST_CASE("splitmix64 matches the reference sequence") {
  SplitMix64 g(42);
  CHECK(g.next() == 0xbdd732262feb6e95ULL);
  CHECK(g.next() == 0x28efe333b266f103ULL);
  CHECK(g.next() == 0x47526757130f9f52ULL);
  SplitMix64 z(0);
  CHECK(z.next() == 0xe220a8397b1dcdafULL);
  CHECK(z.next() == 0x6e789e6aa1b965f4ULL);
}

TEST_CASE("next_unit is a 53-bit uniform in [0,1)") {
  SplitMix64 g(42);
  const double u = g.next_unit();
  CHECK(u == Catch::Approx(0.7415648787718233).margin(1e-15));
  SplitMix64 h(42);
  CHECK(h.next_unit() == u);
  for (int k = 0; k < 1000; ++k) {
    const double x = g.next_unit();
    REQUIRE(x >= 0.0);
    REQUIRE(x < 1.0);
  }
}

TEST_CASE("seed splitting takes outputs of the root sequence") {
  SplitMix64 g(42);
  CHECK(split_seed(42, 0) == g.next());
  CHECK(split_seed(42, 1) == g.next());
  CHECK(split_seed(42, 0) != split_seed(42, 2));
  CHECK(split_seed(42, 0) != split_seed(43, 0));
}

TEST_CASE("polynomial terms are merged and zeros dropped") {
  const PolynomialValuation v = poly({{0.5, {{0, 1}}},
                                      {0.25, {{0, 1}}},
                                      {1.0, {{1, 0}}},
                                      {0.0, {{2, 3}}}});
  REQUIRE(v.terms().size() == 2);
  // Zero exponents vanish, so the second surviving term is a constant.
  CHECK(v.terms()[0].exponents.empty());
  CHECK(v.terms()[0].coeff == 1.0);
  CHECK(v.terms()[1].exponents == std::map<AgentId, unsigned>{{0, 1}});
  CHECK(v.terms()[1].coeff == 0.75);
}

TEST_CASE("terms cancelling to zero leave the zero polynomial") {
  const PolynomialValuation v = poly({{0.5, {{0, 1}}}, {-0.5, {{0, 1}}}});
  CHECK(v.is_zero());
  CHECK(v.terms().empty());
  CHECK(v.max_variable() == PolynomialValuation::kNoVariable);
}

TEST_CASE("polynomial evaluation") {
  // 0.5 x0^2 x1 + 2 x2 + 1
  const PolynomialValuation v =
      poly({{0.5, {{0, 2}, {1, 1}}}, {2.0, {{2, 1}}}, {1.0, {}}});
  const std::vector<double> p{0.5, 1.0, 0.25};
  CHECK(v.eval(p) == Catch::Approx(0.5 * 0.25 + 0.5 + 1.0).margin(1e-15));
  CHECK(v.max_variable() == 2);
  CHECK_FALSE(v.is_multilinear());

  // Variables beyond the point contribute a zero factor.
  const std::vector<double> two{0.5, 1.0};
  CHECK(v.eval(two) == Catch::Approx(0.5 * 0.25 + 1.0).margin(1e-15));
}

TEST_CASE("constant and zero polynomials") {
  CHECK(PolynomialValuation::zero().is_zero());
  const PolynomialValuation c = PolynomialValuation::constant(0.7);
  CHECK(c.eval(std::vector<double>{}) == 0.7);
  CHECK(c.is_multilinear());
  CHECK(PolynomialValuation::constant(0.0).is_zero());
}

TEST_CASE("scaling a polynomial") {
  const PolynomialValuation v = poly({{0.5, {{0, 1}}}, {1.0, {}}});
  const PolynomialValuation w = v.scaled(2.0);
  const std::vector<double> p{0.25};
  CHECK(w.eval(p) == Catch::Approx(2.0 * v.eval(p)).margin(1e-15));
  CHECK(v.scaled(0.0).is_zero());

  const PolynomialValuation one = v.with_term_scaled(0, 0.0);
  // Term 0 is the canonical constant; scaling it away keeps the linear part.
  REQUIRE(one.terms().size() == 1);
  CHECK(one.terms()[0].coeff == 0.5);
}

TEST_CASE("multilinearity is a syntactic exponent test") {
  CHECK(poly({{1.0, {{0, 1}, {4, 1}}}}).is_multilinear());
  CHECK_FALSE(poly({{1.0, {{0, 2}}}}).is_multilinear());
  CHECK_FALSE(poly({{1e-300, {{3, 2}}}}).is_multilinear());
  CHECK(PolynomialValuation::zero().is_multilinear());
}

TEST_CASE("validation appends a do-nothing allocation") {
  const Scenario s = validate_scenario(relay_scenario());
  REQUIRE(s.allocations.size() == 3);
  CHECK(s.allocations[2].id == "null");
  CHECK(s.allocations[2].all_empty());
  for (AgentId i = 0; i < 2; ++i) {
    CHECK(s.true_types[i].valuations.at("null").is_zero());
    CHECK(s.true_types[i].pos.at("null") == 1.0);
  }
}

TEST_CASE("an explicit all-empty allocation suppresses the appended one") {
  Scenario raw = relay_scenario();
  raw.allocations.push_back(Allocation{"rest", {{}, {}}});
  for (auto& ty : raw.true_types) {
    ty.valuations.emplace("rest", PolynomialValuation::zero());
    ty.pos.emplace("rest", 1.0);
  }
  const Scenario s = validate_scenario(std::move(raw));
  CHECK(s.allocations.size() == 3);
  CHECK(s.allocations.back().id == "rest");
}

TEST_CASE("the appended allocation id avoids collisions") {
  Scenario raw = relay_scenario();
  raw.allocations[0].id = "null";
  for (auto& ty : raw.true_types) {
    auto v = ty.valuations.extract("tau");
    v.key() = "null";
    ty.valuations.insert(std::move(v));
    auto p = ty.pos.extract("tau");
    p.key() = "null";
    ty.pos.insert(std::move(p));
  }
  const Scenario s = validate_scenario(std::move(raw));
  REQUIRE(s.allocations.size() == 3);
  CHECK(s.allocations[2].id == "null_");
}

TEST_CASE("validation is idempotent") {
  const Scenario once = validate_scenario(relay_scenario());
  const Scenario twice = validate_scenario(once);
  CHECK(once == twice);
}

TEST_CASE("task lists are sorted and deduplicated") {
  Scenario raw = relay_scenario();
  raw.allocations[0].tasks[1] = {"b", "a", "b"};
  const Scenario s = validate_scenario(std::move(raw));
  CHECK(s.allocations[0].tasks[1] == std::vector<std::string>{"a", "b"});
}

TEST_CASE("validation rejects malformed scenarios") {
  CHECK_THROWS_AS(validate_scenario(Scenario{}), ValidationError);

  Scenario missing_valuation = relay_scenario();
  missing_valuation.true_types[0].valuations.erase("tau");
  CHECK_THROWS_AS(validate_scenario(std::move(missing_valuation)),
                  ValidationError);

  Scenario bad_pos = relay_scenario();
  bad_pos.true_types[1].pos["tau"] = 1.5;
  CHECK_THROWS_AS(validate_scenario(std::move(bad_pos)), ValidationError);

  Scenario missing_pos = relay_scenario();
  missing_pos.true_types[0].pos.erase("tau_prime");
  CHECK_THROWS_AS(validate_scenario(std::move(missing_pos)), ValidationError);

  Scenario dup_id = relay_scenario();
  dup_id.allocations[1].id = "tau";
  CHECK_THROWS_AS(validate_scenario(std::move(dup_id)), ValidationError);

  Scenario empty_id = relay_scenario();
  empty_id.allocations[0].id = "";
  CHECK_THROWS_AS(validate_scenario(std::move(empty_id)), ValidationError);

  Scenario stray_agent = relay_scenario();
  stray_agent.true_types[1].valuations["tau"] = poly({{1.0, {{7, 1}}}});
  CHECK_THROWS_AS(validate_scenario(std::move(stray_agent)), ValidationError);

  Scenario stray_entry = relay_scenario();
  stray_entry.true_types[0].pos["ghost"] = 0.5;
  CHECK_THROWS_AS(validate_scenario(std::move(stray_entry)), ValidationError);

  Scenario short_tasks = relay_scenario();
  short_tasks.allocations[0].tasks.pop_back();
  CHECK_THROWS_AS(validate_scenario(std::move(short_tasks)), ValidationError);

  Scenario plain_with_aggregation = relay_scenario();
  plain_with_aggregation.aggregation.resize(2);
  CHECK_THROWS_AS(validate_scenario(std::move(plain_with_aggregation)),
                  ValidationError);

  Scenario plain_with_rows = relay_scenario();
  plain_with_rows.true_types[0].trust_row["tau"] = {1.0, 1.0};
  CHECK_THROWS_AS(validate_scenario(std::move(plain_with_rows)),
                  ValidationError);
}

TEST_CASE("trust mode validation") {
  Scenario s;
  s.num_agents = 2;
  s.mode = Mode::trust;
  s.allocations = {Allocation{"a", {{}, {"serve"}}}};
  AgentType a0;
  a0.valuations = {{"a", poly({{0.4, {{1, 1}}}})}};
  a0.trust_row = {{"a", {1.0, 0.8}}};
  AgentType a1;
  a1.valuations = {{"a", poly({{0.5, {{1, 1}}}})}};
  a1.trust_row = {{"a", {1.0, 0.9}}};
  s.true_types = {a0, a1};
  s.aggregation.resize(2);
  const PolynomialValuation mean =
      poly({{0.5, {{0, 1}}}, {0.5, {{1, 1}}}});
  s.aggregation[0]["a"] = mean;
  s.aggregation[1]["a"] = mean;

  SECTION("a well-formed scenario validates and gains a null allocation") {
    const Scenario v = validate_scenario(s);
    REQUIRE(v.allocations.size() == 2);
    CHECK(v.true_types[0].trust_row.at("null") ==
          std::vector<double>{1.0, 1.0});
    // The appended entry aggregates to the self-opinion.
    CHECK(v.aggregation[0].at("null") == poly({{1.0, {{0, 1}}}}));
    CHECK(v.aggregation[1].at("null") == poly({{1.0, {{1, 1}}}}));
  }
  SECTION("scalar pos entries are rejected in trust mode") {
    s.true_types[0].pos["a"] = 0.5;
    CHECK_THROWS_AS(validate_scenario(std::move(s)), ValidationError);
  }
  SECTION("a short trust row is rejected") {
    s.true_types[1].trust_row["a"] = {1.0};
    CHECK_THROWS_AS(validate_scenario(std::move(s)), ValidationError);
  }
  SECTION("an out-of-range opinion is rejected") {
    s.true_types[1].trust_row["a"] = {1.0, 1.2};
    CHECK_THROWS_AS(validate_scenario(std::move(s)), ValidationError);
  }
  SECTION("missing aggregation entries are rejected") {
    s.aggregation[1].erase("a");
    CHECK_THROWS_AS(validate_scenario(std::move(s)), ValidationError);
  }
  SECTION("aggregations escaping [0,1] are rejected") {
    s.aggregation[0]["a"] = poly({{2.0, {{0, 1}}}});
    CHECK_THROWS_AS(validate_scenario(std::move(s)), ValidationError);
  }
}

TEST_CASE("allocation lookup") {
  const Scenario s = validate_scenario(relay_scenario());
  CHECK(s.allocation_index("tau") == 0);
  CHECK(s.allocation_index("null") == 2);
  CHECK_THROWS_AS(s.allocation_index("ghost"), ValidationError);
}

TEST_CASE("report profiles") {
  const Scenario s = validate_scenario(relay_scenario());
  TypeReportProfile prof = truthful_reports(s);
  REQUIRE(prof.reports.size() == 2);
  CHECK(prof.is_reporter(0));
  CHECK(prof.reports.at(1) == s.true_types[1]);

  prof = restrict_reports(std::move(prof), 0);
  CHECK_FALSE(prof.is_reporter(0));
  CHECK(prof.is_reporter(1));
  // Excluding an agent that is already gone is an error, not a no-op.
  CHECK_THROWS_AS(restrict_reports(prof, 0), ValidationError);
}

TEST_CASE("validation grid is deterministic and ordered") {
  const auto pts = detail::validation_points(2);
  REQUIRE(pts.size() == 25 + 32);
  CHECK(pts[0] == std::vector<double>{0.0, 0.0});
  CHECK(pts[1] == std::vector<double>{0.0, 0.25});
  CHECK(pts[5] == std::vector<double>{0.25, 0.0});
  for (const auto& p : pts) {
    for (double x : p) {
      REQUIRE(x >= 0.0);
      REQUIRE(x <= 1.0);
    }
  }
  CHECK(pts == detail::validation_points(2));
}

TEST_CASE("large grids are subsampled deterministically") {
  const auto pts = detail::validation_points(8);  // 5^8 lattice points
  CHECK(pts.size() == 100000 + 32);
  CHECK(pts == detail::validation_points(8));
}
