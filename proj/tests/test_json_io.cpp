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

#include <string>

#include "pevmech/bundled.hpp"
#include "pevmech/json_io.hpp"
#include "pevmech/verify.hpp"

namespace {

using namespace pevmech;

// Minimal well-formed document used as the base for the rejection tests.
Json minimal_doc() {
  return Json::parse(R"({
    "agents": [0, 1],
    "mode": "plain",
    "allocations": [
      {"id": "a", "tasks": {"0": ["t"], "1": []}}
    ],
    "types": {
      "0": {
        "valuations": {"a": [{"coeff": 0.5, "exponents": {"0": 1}}]},
        "pos": {"a": 0.9}
      },
      "1": {
        "valuations": {"a": []},
        "pos": {"a": 1.0}
      }
    }
  })");
}

}  // namespace

TEST_CASE("mechanism names round-trip") {
  for (Mechanism m : {Mechanism::groves_zero, Mechanism::groves_clarke,
                      Mechanism::pev, Mechanism::pev_trust}) {
    CHECK(parse_mechanism(mechanism_name(m)) == m);
  }
  CHECK(mechanism_name(Mechanism::pev_trust) == "pev-trust");
  CHECK_THROWS_AS(parse_mechanism("vickrey"), ValidationError);
}

TEST_CASE("every bundled scenario parses, validates, and round-trips") {
  for (const BundledScenario& b : bundled_catalog()) {
    INFO("bundle " << b.name);
    const Scenario s = parse_scenario_text(b.json);
    const Json emitted = emit_scenario(s);
    const Scenario reparsed = parse_scenario(emitted);
    CHECK(reparsed == s);
    // Emission is canonical: a second pass is byte-identical.
    CHECK(emit_scenario(reparsed).dump() == emitted.dump());
  }
}

TEST_CASE("emission spells out the appended allocation") {
  const Json doc = emit_scenario(load_bundled("table1"));
  REQUIRE(doc["allocations"].size() == 3);
  CHECK(doc["allocations"][2]["id"] == "null");
  CHECK(doc["types"]["0"]["pos"]["null"] == 1.0);
  CHECK(doc["types"]["0"]["valuations"]["null"].empty());
  CHECK(doc["agents"] == Json::parse("[0, 1]"));
}

TEST_CASE("malformed json text is a validation error") {
  CHECK_THROWS_AS(parse_scenario_text("{"), ValidationError);
  CHECK_THROWS_AS(parse_scenario_text("[]"), ValidationError);
  CHECK_THROWS_AS(parse_scenario_text("42"), ValidationError);
}

TEST_CASE("the parser accepts only the documented keys") {
  CHECK_NOTHROW(parse_scenario(minimal_doc()));

  SECTION("top level") {
    Json doc = minimal_doc();
    doc["extra"] = 1;
    CHECK_THROWS_AS(parse_scenario(doc), ValidationError);
    Json missing = minimal_doc();
    missing.erase("mode");
    CHECK_THROWS_AS(parse_scenario(missing), ValidationError);
  }
  SECTION("allocation entries") {
    Json doc = minimal_doc();
    doc["allocations"][0]["weight"] = 2;
    CHECK_THROWS_AS(parse_scenario(doc), ValidationError);
  }
  SECTION("type entries") {
    Json doc = minimal_doc();
    doc["types"]["0"]["mood"] = "sunny";
    CHECK_THROWS_AS(parse_scenario(doc), ValidationError);
  }
  SECTION("term objects") {
    Json doc = minimal_doc();
    doc["types"]["0"]["valuations"]["a"][0]["sign"] = -1;
    CHECK_THROWS_AS(parse_scenario(doc), ValidationError);
    Json missing = minimal_doc();
    missing["types"]["0"]["valuations"]["a"][0].erase("coeff");
    CHECK_THROWS_AS(parse_scenario(missing), ValidationError);
  }
}

TEST_CASE("agent lists and agent keys are strict") {
  SECTION("agents must be the exact zero-based sequence") {
    for (const char* agents : {"[0, 2]", "[1, 0]", "[0, 1, 1]", "[\"0\"]"}) {
      Json doc = minimal_doc();
      doc["agents"] = Json::parse(agents);
      INFO("agents " << agents);
      CHECK_THROWS_AS(parse_scenario(doc), ValidationError);
    }
  }
  SECTION("object keys must be plain decimal ids") {
    Json doc = minimal_doc();
    doc["types"]["01"] = doc["types"]["1"];
    doc["types"].erase("1");
    CHECK_THROWS_AS(parse_scenario(doc), ValidationError);

    Json tasks = minimal_doc();
    tasks["allocations"][0]["tasks"]["x"] = Json::array();
    CHECK_THROWS_AS(parse_scenario(tasks), ValidationError);
  }
  SECTION("exponent keys follow the same rule") {
    Json doc = minimal_doc();
    doc["types"]["0"]["valuations"]["a"][0]["exponents"] = {{"7", 1}};
    CHECK_THROWS_AS(parse_scenario(doc), ValidationError);
  }
}

TEST_CASE("numeric fields are type-checked") {
  SECTION("exponents are unsigned integers") {
    for (const char* e : {"-1", "1.5", "\"2\"", "true"}) {
      Json doc = minimal_doc();
      doc["types"]["0"]["valuations"]["a"][0]["exponents"]["0"] =
          Json::parse(e);
      INFO("exponent " << e);
      CHECK_THROWS_AS(parse_scenario(doc), ValidationError);
    }
  }
  SECTION("coefficients and pos are numbers") {
    Json doc = minimal_doc();
    doc["types"]["0"]["valuations"]["a"][0]["coeff"] = "0.5";
    CHECK_THROWS_AS(parse_scenario(doc), ValidationError);
    Json pos = minimal_doc();
    pos["types"]["0"]["pos"]["a"] = "high";
    CHECK_THROWS_AS(parse_scenario(pos), ValidationError);
  }
  SECTION("task labels are strings") {
    Json doc = minimal_doc();
    doc["allocations"][0]["tasks"]["0"] = {1, 2};
    CHECK_THROWS_AS(parse_scenario(doc), ValidationError);
  }
}

TEST_CASE("structural mistakes surface as validation errors") {
  SECTION("unknown mode") {
    Json doc = minimal_doc();
    doc["mode"] = "hybrid";
    CHECK_THROWS_AS(parse_scenario(doc), ValidationError);
  }
  SECTION("tasks must cover every agent") {
    Json doc = minimal_doc();
    doc["allocations"][0]["tasks"].erase("1");
    CHECK_THROWS_AS(parse_scenario(doc), ValidationError);
  }
  SECTION("valuations for undeclared allocations") {
    Json doc = minimal_doc();
    doc["types"]["0"]["valuations"]["ghost"] = Json::array();
    CHECK_THROWS_AS(parse_scenario(doc), ValidationError);
  }
  SECTION("trust rows are rejected in plain mode") {
    Json doc = minimal_doc();
    doc["types"]["0"]["trust_row"] = {{"a", {1.0, 1.0}}};
    CHECK_THROWS_AS(parse_scenario(doc), ValidationError);
  }
  SECTION("aggregation is rejected in plain mode") {
    Json doc = minimal_doc();
    doc["aggregation"] = Json::object();
    CHECK_THROWS_AS(parse_scenario(doc), ValidationError);
  }
  SECTION("trust mode requires an aggregation") {
    Json doc = Json::parse(load_bundled("trust_weighted").mode == Mode::trust
                               ? bundled_json::kTrustWeighted
                               : "{}");
    doc.erase("aggregation");
    CHECK_THROWS_AS(parse_scenario(doc), ValidationError);
  }
}

TEST_CASE("report serialization carries the documented fields") {
  const Scenario s = load_bundled("table1");
  const TypeReportProfile truthful = truthful_reports(s);

  SECTION("welfare ledger") {
    const auto [chosen, ledger] = efficient_allocation(s, truthful);
    const Json j = to_json(ledger);
    CHECK(j["argmax"] == "tau_prime");
    REQUIRE(j["entries"].size() == 3);
    CHECK(j["entries"][1]["allocation"] == "tau_prime");
    CHECK(j["entries"][1]["welfare"] == 0.5);
    CHECK(j["tie_set"] == Json::parse(R"(["tau_prime"])"));
  }
  SECTION("payment breakdown") {
    const Json j =
        to_json(pev_payment_breakdown(s, truthful, Mechanism::pev, 0));
    CHECK(j["agent"] == 0);
    CHECK(j["h_i"] == 0.5);
    CHECK(j.contains("payment_if_success"));
    CHECK(j.contains("payment_if_failure"));
  }
  SECTION("deviation report with ledger") {
    const auto rep = check_ex_post_truthful_agent(s, Mechanism::groves_zero,
                                                  DeviationSpace{}, 0);
    const Json j = to_json(rep);
    CHECK(j["agent"] == 0);
    CHECK(j["verdict"] == "manipulation_found");
    CHECK(j["first_profitable"]["misreport"] == "alloc=tau pos=0.6 scale=0");
    CHECK(j["ledger"].size() == rep.ledger.size());
  }
  SECTION("ir report serializes a non-finite minimum as null") {
    IrReport rep;
    const Json j = to_json(rep);
    CHECK(j["empirical_min_utility"].is_null());
    CHECK(j["static_ok"] == true);
  }
  SECTION("monte carlo rows") {
    const auto rows = monte_carlo_check(s, truthful, Mechanism::pev, 50, 1);
    const Json j = to_json(rows);
    REQUIRE(j.size() == 2);
    CHECK(j[0]["agent"] == 0);
    CHECK(j[0].contains("mean"));
    CHECK(j[0].contains("std_error"));
    CHECK(j[0].contains("closed_form"));
    CHECK(j[0].contains("z"));
  }
  SECTION("episode outcome") {
    const Json j = to_json(run_episode(s, truthful, Mechanism::pev, 7));
    CHECK(j["chosen"] == "tau_prime");
    CHECK(j["mode"] == "realized");
    CHECK(j["payments"].size() == 2);
    CHECK(j["success"]["0"] == true);
  }
  SECTION("manipulation witness") {
    const auto w = find_manipulation(load_bundled_family("square_family"),
                                     Mechanism::pev, DeviationSpace{});
    REQUIRE(w.has_value());
    const Json j = to_json(*w);
    CHECK(j["tuning"] == Json::parse("[1.0]"));
    CHECK(j["agent"] == 0);
    CHECK(j["misreport"] == "alloc=tau pos=0.6 scale=0");
    CHECK(j.contains("gain"));
  }
}
