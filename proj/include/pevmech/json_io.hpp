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

#pragma once

#include <cmath>
#include <map>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "pevmech/mechanisms.hpp"
#include "pevmech/model.hpp"
#include "pevmech/verify.hpp"
#include "pevmech/welfare.hpp"

namespace pevmech {

using Json = nlohmann::ordered_json;

inline std::string mechanism_name(Mechanism m) {
  switch (m) {
    case Mechanism::groves_zero:
      return "groves-zero";
    case Mechanism::groves_clarke:
      return "groves-clarke";
    case Mechanism::pev:
      return "pev";
    case Mechanism::pev_trust:
      return "pev-trust";
  }
  return "?";
}

inline Mechanism parse_mechanism(const std::string& name) {
  if (name == "groves-zero") return Mechanism::groves_zero;
  if (name == "groves-clarke") return Mechanism::groves_clarke;
  if (name == "pev") return Mechanism::pev;
  if (name == "pev-trust") return Mechanism::pev_trust;
  throw ValidationError("unknown mechanism: " + name);
}

namespace detail {

inline void expect_object(const Json& j, const std::string& where) {
  if (!j.is_object()) throw ValidationError(where + ": expected an object");
}

// Unknown keys are schema errors, missing required keys too.
inline void expect_keys(const Json& j, const std::set<std::string>& required,
                        const std::set<std::string>& optional,
                        const std::string& where) {
  expect_object(j, where);
  for (const auto& [key, val] : j.items()) {
    if (!required.count(key) && !optional.count(key))
      throw ValidationError(where + ": unknown key \"" + key + "\"");
  }
  for (const auto& key : required) {
    if (!j.contains(key))
      throw ValidationError(where + ": missing key \"" + key + "\"");
  }
}

inline AgentId parse_agent_key(const std::string& key,
                               const std::string& where) {
  for (char c : key) {
    if (c < '0' || c > '9')
      throw ValidationError(where + ": \"" + key + "\" is not an agent id");
  }
  if (key.empty() || (key.size() > 1 && key[0] == '0'))
    throw ValidationError(where + ": \"" + key + "\" is not an agent id");
  return static_cast<AgentId>(std::stoull(key));
}

inline double parse_number(const Json& j, const std::string& where) {
  if (!j.is_number()) throw ValidationError(where + ": expected a number");
  return j.get<double>();
}

inline PolynomialValuation parse_polynomial(const Json& j,
                                            const std::string& where) {
  if (!j.is_array()) throw ValidationError(where + ": expected a term array");
  std::vector<MonomialTerm> terms;
  for (std::size_t t = 0; t < j.size(); ++t) {
    const std::string here = where + ", term " + std::to_string(t);
    expect_keys(j[t], {"coeff", "exponents"}, {}, here);
    MonomialTerm term;
    term.coeff = parse_number(j[t]["coeff"], here + ": coeff");
    expect_object(j[t]["exponents"], here + ": exponents");
    for (const auto& [key, val] : j[t]["exponents"].items()) {
      const AgentId var = parse_agent_key(key, here + ": exponents");
      if (!val.is_number_unsigned())
        throw ValidationError(here + ": exponent for \"" + key +
                              "\" must be a non-negative integer");
      term.exponents[var] = val.get<unsigned>();
    }
    terms.push_back(std::move(term));
  }
  return PolynomialValuation{std::move(terms)};
}

inline Json emit_polynomial(const PolynomialValuation& v) {
  Json arr = Json::array();
  for (const MonomialTerm& t : v.terms()) {
    Json term;
    term["coeff"] = t.coeff;
    term["exponents"] = Json::object();
    for (auto [var, e] : t.exponents)
      term["exponents"][std::to_string(var)] = e;
    arr.push_back(std::move(term));
  }
  return arr;
}

}  // namespace detail

// Parses and validates the on-disk scenario document. The returned Scenario
// is canonical (see validate_scenario), so it may contain one more
// allocation than the document when the null allocation was auto-added.
inline Scenario parse_scenario(const Json& doc) {
  detail::expect_keys(doc, {"agents", "mode", "allocations", "types"},
                      {"aggregation"}, "scenario");

  Scenario s;
  if (!doc["agents"].is_array())
    throw ValidationError("agents: expected an array");
  s.num_agents = doc["agents"].size();
  for (std::size_t i = 0; i < s.num_agents; ++i) {
    if (!doc["agents"][i].is_number_unsigned() ||
        doc["agents"][i].get<std::size_t>() != i)
      throw ValidationError("agents: expected the sequence 0..n-1");
  }

  if (!doc["mode"].is_string())
    throw ValidationError("mode: expected a string");
  const std::string mode = doc["mode"].get<std::string>();
  if (mode == "plain") {
    s.mode = Mode::plain;
  } else if (mode == "trust") {
    s.mode = Mode::trust;
  } else {
    throw ValidationError("mode: must be \"plain\" or \"trust\"");
  }

  if (!doc["allocations"].is_array())
    throw ValidationError("allocations: expected an array");
  std::set<std::string> declared;
  for (const Json& aj : doc["allocations"]) {
    detail::expect_keys(aj, {"id", "tasks"}, {}, "allocation");
    Allocation a;
    if (!aj["id"].is_string())
      throw ValidationError("allocation id: expected a string");
    a.id = aj["id"].get<std::string>();
    const std::string where = "allocation " + a.id;
    declared.insert(a.id);
    a.tasks.assign(s.num_agents, {});
    detail::expect_object(aj["tasks"], where + ": tasks");
    std::set<AgentId> covered;
    for (const auto& [key, val] : aj["tasks"].items()) {
      const AgentId i = detail::parse_agent_key(key, where + ": tasks");
      if (i >= s.num_agents)
        throw ValidationError(where + ": tasks: unknown agent " + key);
      if (!val.is_array())
        throw ValidationError(where + ": tasks for agent " + key +
                              ": expected an array of labels");
      for (const Json& label : val) {
        if (!label.is_string())
          throw ValidationError(where + ": task labels must be strings");
        a.tasks[i].push_back(label.get<std::string>());
      }
      covered.insert(i);
    }
    if (covered.size() != s.num_agents)
      throw ValidationError(where + ": tasks must cover every agent");
    s.allocations.push_back(std::move(a));
  }

  detail::expect_object(doc["types"], "types");
  s.true_types.resize(s.num_agents);
  std::set<AgentId> typed;
  for (const auto& [key, tj] : doc["types"].items()) {
    const AgentId i = detail::parse_agent_key(key, "types");
    if (i >= s.num_agents)
      throw ValidationError("types: unknown agent " + key);
    typed.insert(i);
    const std::string where = "types for agent " + key;
    detail::expect_keys(tj, {"valuations"}, {"pos", "trust_row"}, where);
    AgentType& ty = s.true_types[i];
    detail::expect_object(tj["valuations"], where + ": valuations");
    for (const auto& [aid, vj] : tj["valuations"].items()) {
      if (!declared.count(aid))
        throw ValidationError(where + ": valuations: unknown allocation \"" +
                              aid + "\"");
      ty.valuations[aid] =
          detail::parse_polynomial(vj, where + ": valuation for " + aid);
    }
    if (tj.contains("pos")) {
      detail::expect_object(tj["pos"], where + ": pos");
      for (const auto& [aid, pj] : tj["pos"].items()) {
        if (!declared.count(aid))
          throw ValidationError(where + ": pos: unknown allocation \"" + aid +
                                "\"");
        ty.pos[aid] = detail::parse_number(pj, where + ": pos for " + aid);
      }
    }
    if (tj.contains("trust_row")) {
      detail::expect_object(tj["trust_row"], where + ": trust_row");
      for (const auto& [aid, rj] : tj["trust_row"].items()) {
        if (!declared.count(aid))
          throw ValidationError(where + ": trust_row: unknown allocation \"" +
                                aid + "\"");
        if (!rj.is_array())
          throw ValidationError(where + ": trust_row for " + aid +
                                ": expected an array");
        std::vector<double> row;
        for (const Json& x : rj)
          row.push_back(
              detail::parse_number(x, where + ": trust_row for " + aid));
        ty.trust_row[aid] = std::move(row);
      }
    }
  }
  if (typed.size() != s.num_agents)
    throw ValidationError("types must cover every agent");

  if (doc.contains("aggregation")) {
    detail::expect_object(doc["aggregation"], "aggregation");
    s.aggregation.resize(s.num_agents);
    std::set<AgentId> covered;
    for (const auto& [key, fj] : doc["aggregation"].items()) {
      const AgentId i = detail::parse_agent_key(key, "aggregation");
      if (i >= s.num_agents)
        throw ValidationError("aggregation: unknown agent " + key);
      covered.insert(i);
      detail::expect_object(fj, "aggregation for agent " + key);
      for (const auto& [aid, pj] : fj.items()) {
        if (!declared.count(aid))
          throw ValidationError("aggregation for agent " + key +
                                ": unknown allocation \"" + aid + "\"");
        s.aggregation[i][aid] = detail::parse_polynomial(
            pj, "aggregation for agent " + key + ", allocation " + aid);
      }
    }
    if (covered.size() != s.num_agents)
      throw ValidationError("aggregation must cover every agent");
  }

  return validate_scenario(std::move(s));
}

inline Scenario parse_scenario_text(const std::string& text) {
  Json doc;
  try {
    doc = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw ValidationError(std::string("scenario is not valid JSON: ") +
                          e.what());
  }
  return parse_scenario(doc);
}

// Emits the canonical form. Allocation-keyed maps follow the declared
// allocation order, so emit(parse(emit(s))) is byte-identical to emit(s).
inline Json emit_scenario(const Scenario& s) {
  Json doc;
  doc["agents"] = Json::array();
  for (AgentId i = 0; i < s.num_agents; ++i) doc["agents"].push_back(i);
  doc["mode"] = s.mode == Mode::plain ? "plain" : "trust";
  doc["allocations"] = Json::array();
  for (const Allocation& a : s.allocations) {
    Json aj;
    aj["id"] = a.id;
    aj["tasks"] = Json::object();
    for (AgentId i = 0; i < s.num_agents; ++i)
      aj["tasks"][std::to_string(i)] = a.tasks[i];
    doc["allocations"].push_back(std::move(aj));
  }
  doc["types"] = Json::object();
  for (AgentId i = 0; i < s.num_agents; ++i) {
    const AgentType& ty = s.true_types[i];
    Json tj;
    tj["valuations"] = Json::object();
    for (const Allocation& a : s.allocations)
      tj["valuations"][a.id] = detail::emit_polynomial(ty.valuations.at(a.id));
    if (s.mode == Mode::plain) {
      tj["pos"] = Json::object();
      for (const Allocation& a : s.allocations)
        tj["pos"][a.id] = ty.pos.at(a.id);
    } else {
      tj["trust_row"] = Json::object();
      for (const Allocation& a : s.allocations)
        tj["trust_row"][a.id] = ty.trust_row.at(a.id);
    }
    doc["types"][std::to_string(i)] = std::move(tj);
  }
  if (s.mode == Mode::trust) {
    doc["aggregation"] = Json::object();
    for (AgentId i = 0; i < s.num_agents; ++i) {
      Json fj;
      for (const Allocation& a : s.allocations)
        fj[a.id] = detail::emit_polynomial(s.aggregation[i].at(a.id));
      doc["aggregation"][std::to_string(i)] = std::move(fj);
    }
  }
  return doc;
}

// ---------------------------------------------------------------------------
// Report serialization. The JSON form carries exactly the data the table
// renderer prints.

inline Json to_json(const WelfareLedger& ledger) {
  Json j;
  j["entries"] = Json::array();
  for (const auto& [id, sw] : ledger.entries) {
    Json e;
    e["allocation"] = id;
    e["welfare"] = sw;
    j["entries"].push_back(std::move(e));
  }
  j["argmax"] = ledger.argmax_id;
  j["tie_set"] = ledger.tie_set;
  return j;
}

inline Json to_json(const PaymentBreakdown& bd) {
  Json j;
  j["agent"] = bd.agent;
  j["h_i"] = bd.h_i;
  j["v_minus_i_success"] = bd.v_minus_i_success;
  j["v_minus_i_failure"] = bd.v_minus_i_failure;
  j["payment_if_success"] = bd.payment_if_success;
  j["payment_if_failure"] = bd.payment_if_failure;
  return j;
}

inline Json to_json(const DeviationEntry& e) {
  Json j;
  j["misreport"] = e.misreport;
  j["truthful_eu"] = e.truthful_eu;
  j["deviating_eu"] = e.deviating_eu;
  j["gain"] = e.gain();
  return j;
}

inline Json to_json(const DeviationReport& rep) {
  Json j;
  j["agent"] = rep.agent;
  j["verdict"] = rep.manipulation_found() ? "manipulation_found"
                                          : "no_profitable_deviation_found";
  j["max_gain"] = rep.max_gain;
  j["best_misreport"] = rep.best_summary;
  if (rep.first_profitable) {
    j["first_profitable"] = to_json(*rep.first_profitable);
  } else {
    j["first_profitable"] = nullptr;
  }
  j["ledger"] = Json::array();
  for (const DeviationEntry& e : rep.ledger) j["ledger"].push_back(to_json(e));
  return j;
}

inline Json to_json(const MultilinearityReport& rep) {
  Json j;
  j["is_multilinear"] = rep.is_multilinear;
  if (rep.witness) {
    Json w;
    w["allocation"] = rep.witness->allocation_id;
    w["agent"] = rep.witness->agent;
    w["variable"] = rep.witness->variable;
    w["point"] = rep.witness->point;
    w["lhs"] = rep.witness->lhs;
    w["rhs"] = rep.witness->rhs;
    j["witness"] = std::move(w);
  } else {
    j["witness"] = nullptr;
  }
  return j;
}

inline Json to_json(const IrReport& rep) {
  Json j;
  j["static_ok"] = rep.static_ok;
  if (rep.static_witness) {
    Json w;
    w["agent"] = rep.static_witness->agent;
    w["allocation"] = rep.static_witness->allocation_id;
    w["point"] = rep.static_witness->point;
    w["value"] = rep.static_witness->value;
    j["static_witness"] = std::move(w);
  } else {
    j["static_witness"] = nullptr;
  }
  if (std::isfinite(rep.empirical_min_utility)) {
    j["empirical_min_utility"] = rep.empirical_min_utility;
  } else {
    j["empirical_min_utility"] = nullptr;
  }
  if (rep.empirical_witness) {
    Json w;
    w["agent"] = rep.empirical_witness->agent;
    w["context"] = rep.empirical_witness->context;
    w["utility"] = rep.empirical_witness->utility;
    j["empirical_witness"] = std::move(w);
  } else {
    j["empirical_witness"] = nullptr;
  }
  return j;
}

inline Json to_json(const MechanismOutcome& out) {
  Json j;
  j["chosen"] = out.chosen;
  j["mode"] = out.mode_tag;
  j["payments"] = Json::object();
  j["success"] = Json::object();
  j["utilities"] = Json::object();
  for (const auto& [i, x] : out.payments) {
    const std::string key = std::to_string(i);
    j["payments"][key] = x;
    j["success"][key] = out.success.at(i);
    j["utilities"][key] = out.utilities.at(i);
  }
  return j;
}

inline Json to_json(const std::vector<MonteCarloRow>& rows) {
  Json j = Json::array();
  for (const MonteCarloRow& r : rows) {
    Json e;
    e["agent"] = r.agent;
    e["mean"] = r.mean;
    e["std_error"] = r.std_error;
    e["closed_form"] = r.closed_form;
    if (std::isfinite(r.z)) {
      e["z"] = r.z;
    } else {
      e["z"] = "inf";
    }
    j.push_back(std::move(e));
  }
  return j;
}

inline Json to_json(const ManipulationWitness& w) {
  Json j;
  j["tuning"] = w.tuning;
  j["agent"] = w.agent;
  j["misreport"] = w.misreport;
  j["truthful_eu"] = w.truthful_eu;
  j["deviating_eu"] = w.deviating_eu;
  j["gain"] = w.gain;
  return j;
}

}  // namespace pevmech
