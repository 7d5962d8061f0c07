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

// Command line front end. Exit codes: 0 on success, 2 on validation or
// usage errors, 3 when the requested check finds a violation (a profitable
// deviation, a participation failure, or a non-multilinear valuation).

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "pevmech/pevmech.hpp"

namespace {

using namespace pevmech;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitViolation = 3;

std::string fmt(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

std::string fmt_point(const std::vector<double>& p) {
  std::string out = "(";
  for (std::size_t k = 0; k < p.size(); ++k) {
    if (k) out += ", ";
    out += fmt(p[k]);
  }
  return out + ")";
}

Scenario load_scenario_arg(const std::string& arg) {
  const std::string prefix = "bundled:";
  if (arg.rfind(prefix, 0) == 0) return load_bundled(arg.substr(prefix.size()));
  std::ifstream in(arg);
  if (!in) throw ValidationError("cannot open scenario file: " + arg);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_scenario_text(ss.str());
}

std::size_t parse_index(const std::string& text, const std::string& what) {
  try {
    std::size_t used = 0;
    const unsigned long long v = std::stoull(text, &used);
    if (used != text.size() || text.empty() || text[0] == '-')
      throw std::invalid_argument(text);
    return static_cast<std::size_t>(v);
  } catch (const std::exception&) {
    throw ValidationError(what + ": \"" + text + "\" is not an index");
  }
}

double parse_double(const std::string& text, const std::string& what) {
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw ValidationError(what + ": \"" + text + "\" is not a number");
  }
}

// Splits "a:b:c" into exactly three fields.
std::vector<std::string> split3(const std::string& spec,
                                const std::string& what) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  for (std::size_t pos = spec.find(':'); pos != std::string::npos;
       pos = spec.find(':', start)) {
    parts.push_back(spec.substr(start, pos - start));
    start = pos + 1;
  }
  parts.push_back(spec.substr(start));
  if (parts.size() != 3)
    throw ValidationError(what + ": expected agent:allocation:value, got \"" +
                          spec + "\"");
  return parts;
}

void apply_report_pos(const Scenario& s, TypeReportProfile& reports,
                      const std::vector<std::string>& specs) {
  for (const std::string& spec : specs) {
    if (s.mode != Mode::plain)
      throw ValidationError("--report-pos needs a plain-mode scenario");
    const auto parts = split3(spec, "--report-pos");
    const AgentId agent = parse_index(parts[0], "--report-pos agent");
    if (agent >= s.num_agents)
      throw ValidationError("--report-pos: unknown agent " + parts[0]);
    s.allocation_index(parts[1]);
    const double value = parse_double(parts[2], "--report-pos value");
    if (!(value >= 0.0 && value <= 1.0))
      throw ValidationError("--report-pos: value outside [0,1]: " + parts[2]);
    reports.reports.at(agent).pos.at(parts[1]) = value;
  }
}

std::vector<Tunable> parse_tunables(const Scenario& s,
                                    const std::vector<std::string>& specs) {
  std::vector<Tunable> tunables;
  for (const std::string& spec : specs) {
    const auto parts = split3(spec, "--tune");
    Tunable t;
    t.agent = parse_index(parts[0], "--tune agent");
    if (t.agent >= s.num_agents)
      throw ValidationError("--tune: unknown agent " + parts[0]);
    t.allocation = parts[1];
    s.allocation_index(t.allocation);
    t.term = parse_index(parts[2], "--tune term");
    const auto& terms =
        s.true_types[t.agent].valuations.at(t.allocation).terms();
    if (t.term >= terms.size())
      throw ValidationError("--tune: agent " + parts[0] + " has only " +
                            std::to_string(terms.size()) +
                            " terms for allocation " + t.allocation);
    tunables.push_back(std::move(t));
  }
  return tunables;
}

Mechanism resolve_mechanism(const Scenario& s, const std::string& flag) {
  if (flag.empty())
    return s.mode == Mode::trust ? Mechanism::pev_trust : Mechanism::pev;
  const Mechanism m = parse_mechanism(flag);
  require_mode(s, m);
  return m;
}

std::uint64_t resolve_seed(bool flag_given, std::uint64_t flag_value) {
  if (flag_given) return flag_value;
  if (const char* env = std::getenv("MECH_SEED")) {
    try {
      std::size_t used = 0;
      const std::uint64_t v = std::stoull(env, &used);
      if (used != std::string(env).size()) throw std::invalid_argument(env);
      return v;
    } catch (const std::exception&) {
      throw ValidationError("MECH_SEED must be an unsigned integer");
    }
  }
  return 42;
}

void check_grid(const std::vector<double>& grid, const std::string& what) {
  if (grid.empty()) throw ValidationError(what + " must be nonempty");
  for (double g : grid) {
    if (!(g >= 0.0 && g <= 1.0))
      throw ValidationError(what + ": value outside [0,1]: " + fmt(g));
  }
}

DeviationSpace::Scope parse_scope(const std::string& name) {
  if (name == "pos") return DeviationSpace::Scope::pos_only;
  if (name == "valuations") return DeviationSpace::Scope::valuations_only;
  if (name == "both") return DeviationSpace::Scope::both;
  throw ValidationError("unknown scope: " + name);
}

void print_json(const Json& j) { std::cout << j.dump(2) << "\n"; }

// ---------------------------------------------------------------------------
// Subcommand bodies. Each returns the process exit code.

int cmd_allocate(const Scenario& s, const TypeReportProfile& reports,
                 const std::string& format) {
  auto [chosen, ledger] = efficient_allocation(s, reports);
  double welfare = 0.0;
  for (const auto& [id, sw] : ledger.entries) {
    if (id == chosen) welfare = sw;
  }
  if (format == "json") {
    Json j;
    j["chosen"] = chosen;
    j["welfare"] = welfare;
    j["ledger"] = to_json(ledger);
    print_json(j);
  } else {
    std::printf("%-16s %s\n", "allocation", "welfare");
    for (const auto& [id, sw] : ledger.entries)
      std::printf("%-16s %s\n", id.c_str(), fmt(sw).c_str());
    std::printf("chosen: %s\n", chosen.c_str());
    std::printf("welfare: %s\n", fmt(welfare).c_str());
    if (ledger.tie_set.size() > 1) {
      std::string tie;
      for (const auto& id : ledger.tie_set) {
        if (!tie.empty()) tie += ", ";
        tie += id;
      }
      std::printf("tie: %s\n", tie.c_str());
    }
  }
  return kExitOk;
}

int cmd_payments(const Scenario& s, const TypeReportProfile& reports,
                 Mechanism mech, const std::string& format) {
  auto [chosen, ledger] = efficient_allocation(s, reports);
  Json j;
  j["chosen"] = chosen;
  j["mechanism"] = mechanism_name(mech);
  if (is_pev(mech)) {
    j["breakdowns"] = Json::array();
    for (const auto& [i, ty] : reports.reports)
      j["breakdowns"].push_back(to_json(pev_payment_breakdown(s, reports, mech, i)));
  } else {
    const auto pivot = mech == Mechanism::groves_clarke ? GrovesPivot::clarke
                                                        : GrovesPivot::zero;
    j["payments"] = Json::object();
    for (const auto& [i, x] : groves_payment(s, reports, pivot))
      j["payments"][std::to_string(i)] = x;
  }
  if (format == "json") {
    print_json(j);
    return kExitOk;
  }
  std::printf("chosen: %s\n", chosen.c_str());
  std::printf("mechanism: %s\n", mechanism_name(mech).c_str());
  if (is_pev(mech)) {
    std::printf("%-6s %-12s %-12s %-12s %-12s %s\n", "agent", "h_i", "V1_-i",
                "V0_-i", "x_success", "x_failure");
    for (const Json& bd : j["breakdowns"]) {
      std::printf("%-6s %-12s %-12s %-12s %-12s %s\n",
                  std::to_string(bd["agent"].get<AgentId>()).c_str(),
                  fmt(bd["h_i"].get<double>()).c_str(),
                  fmt(bd["v_minus_i_success"].get<double>()).c_str(),
                  fmt(bd["v_minus_i_failure"].get<double>()).c_str(),
                  fmt(bd["payment_if_success"].get<double>()).c_str(),
                  fmt(bd["payment_if_failure"].get<double>()).c_str());
    }
  } else {
    std::printf("%-6s %s\n", "agent", "payment");
    for (const auto& [key, x] : j["payments"].items())
      std::printf("%-6s %s\n", key.c_str(), fmt(x.get<double>()).c_str());
  }
  return kExitOk;
}

int cmd_simulate(const Scenario& s, const TypeReportProfile& reports,
                 Mechanism mech, std::size_t replications, std::uint64_t seed,
                 const std::string& format) {
  if (replications == 0)
    throw ValidationError("--replications must be at least 1");
  if (replications == 1) {
    const MechanismOutcome out = run_episode(s, reports, mech, seed);
    if (format == "json") {
      Json j = to_json(out);
      j["seed"] = seed;
      print_json(j);
    } else {
      std::printf("chosen: %s\n", out.chosen.c_str());
      std::printf("seed: %llu\n", static_cast<unsigned long long>(seed));
      std::printf("%-6s %-8s %-12s %s\n", "agent", "success", "payment",
                  "utility");
      for (const auto& [i, x] : out.payments)
        std::printf("%-6s %-8s %-12s %s\n", std::to_string(i).c_str(),
                    out.success.at(i) ? "yes" : "no", fmt(x).c_str(),
                    fmt(out.utilities.at(i)).c_str());
    }
    return kExitOk;
  }
  const auto rows = monte_carlo_check(s, reports, mech, replications, seed);
  if (format == "json") {
    Json j;
    j["replications"] = replications;
    j["seed"] = seed;
    j["rows"] = to_json(rows);
    print_json(j);
  } else {
    std::printf("replications: %zu  seed: %llu\n", replications,
                static_cast<unsigned long long>(seed));
    std::printf("%-6s %-14s %-14s %-14s %s\n", "agent", "mean utility",
                "std error", "closed form", "z");
    for (const MonteCarloRow& r : rows)
      std::printf("%-6s %-14s %-14s %-14s %s\n",
                  std::to_string(r.agent).c_str(), fmt(r.mean).c_str(),
                  fmt(r.std_error).c_str(), fmt(r.closed_form).c_str(),
                  fmt(r.z).c_str());
  }
  return kExitOk;
}

int cmd_verify_truthful(const Scenario& s, Mechanism mech,
                        const DeviationSpace& space, long long agent,
                        const std::string& format) {
  std::optional<AgentId> only;
  if (agent >= 0) {
    if (static_cast<std::size_t>(agent) >= s.num_agents)
      throw ValidationError("--agent out of range");
    only = static_cast<AgentId>(agent);
  }
  const auto reports = check_ex_post_truthful(s, mech, space, only);
  bool found = false;
  for (const DeviationReport& r : reports) found = found || r.manipulation_found();
  if (format == "json") {
    Json j = Json::array();
    for (const DeviationReport& r : reports) {
      Json e;
      e["agent"] = r.agent;
      e["verdict"] = r.manipulation_found() ? "manipulation_found"
                                            : "no_profitable_deviation_found";
      e["max_gain"] = r.max_gain;
      e["best_misreport"] = r.best_summary;
      e["candidates"] = r.ledger.size();
      if (r.first_profitable) {
        e["first_profitable"] = to_json(*r.first_profitable);
      } else {
        e["first_profitable"] = nullptr;
      }
      j.push_back(std::move(e));
    }
    print_json(j);
  } else {
    for (const DeviationReport& r : reports) {
      if (r.manipulation_found()) {
        const DeviationEntry& e = *r.first_profitable;
        std::printf(
            "agent %s: MANIPULATION max gain %s (best: %s); first profitable: "
            "%s, EU %s -> %s\n",
            std::to_string(r.agent).c_str(), fmt(r.max_gain).c_str(),
            r.best_summary.c_str(), e.misreport.c_str(),
            fmt(e.truthful_eu).c_str(), fmt(e.deviating_eu).c_str());
      } else {
        std::printf(
            "agent %s: no profitable deviation found (max gain %s over %zu "
            "candidates)\n",
            std::to_string(r.agent).c_str(), fmt(r.max_gain).c_str(),
            r.ledger.size());
      }
    }
  }
  return found ? kExitViolation : kExitOk;
}

int cmd_verify_ir(const Scenario& s, Mechanism mech,
                  const DeviationSpace& space, const std::string& format) {
  const IrReport rep = check_ir_empirical(s, mech, space);
  if (format == "json") {
    print_json(to_json(rep));
  } else {
    if (rep.static_ok) {
      std::printf("static participation: ok\n");
    } else {
      const IrStaticWitness& w = *rep.static_witness;
      std::printf(
          "static participation: VIOLATED (agent %s, allocation %s, point %s, "
          "value %s)\n",
          std::to_string(w.agent).c_str(), w.allocation_id.c_str(),
          fmt_point(w.point).c_str(), fmt(w.value).c_str());
    }
    std::printf("empirical minimum utility: %s\n",
                fmt(rep.empirical_min_utility).c_str());
    if (rep.empirical_witness) {
      const IrEmpiricalWitness& w = *rep.empirical_witness;
      std::printf("empirical witness: agent %s, %s\n",
                  std::to_string(w.agent).c_str(), w.context.c_str());
    }
  }
  return rep.ir_violated() ? kExitViolation : kExitOk;
}

int cmd_check_multilinear(const Scenario& s, const std::string& format) {
  const MultilinearityReport rep = check_multilinear_scenario(s);
  if (format == "json") {
    print_json(to_json(rep));
  } else {
    std::printf("multilinear: %s\n", rep.is_multilinear ? "yes" : "no");
    if (rep.witness) {
      const MultilinearWitness& w = *rep.witness;
      std::printf(
          "witness: allocation %s, agent %s, variable %s, point %s, "
          "value %s vs interpolated %s\n",
          w.allocation_id.c_str(), std::to_string(w.agent).c_str(),
          std::to_string(w.variable).c_str(), fmt_point(w.point).c_str(),
          fmt(w.lhs).c_str(), fmt(w.rhs).c_str());
    }
  }
  return rep.is_multilinear ? kExitOk : kExitViolation;
}

int cmd_find_manipulation(const ScenarioFamily& family, Mechanism mech,
                          const DeviationSpace& space,
                          const std::string& format) {
  const auto witness = find_manipulation(family, mech, space);
  if (format == "json") {
    if (witness) {
      Json j = to_json(*witness);
      j["tuned_scenario"] = emit_scenario(witness->tuned);
      print_json(j);
    } else {
      print_json(Json(nullptr));
    }
  } else {
    if (witness) {
      std::string tuning;
      for (double t : witness->tuning) {
        if (!tuning.empty()) tuning += ", ";
        tuning += fmt(t);
      }
      std::printf("manipulation found\n");
      std::printf("tuning scales: [%s]\n", tuning.c_str());
      std::printf("agent: %s\n", std::to_string(witness->agent).c_str());
      std::printf("misreport: %s\n", witness->misreport.c_str());
      std::printf("truthful EU %s -> deviating EU %s (gain %s)\n",
                  fmt(witness->truthful_eu).c_str(),
                  fmt(witness->deviating_eu).c_str(),
                  fmt(witness->gain).c_str());
    } else {
      std::printf("no manipulation found across the family\n");
    }
  }
  return witness ? kExitViolation : kExitOk;
}

int cmd_aggregate_trust(const Scenario& s, const std::string& format) {
  if (s.mode != Mode::trust)
    throw ValidationError("aggregate-trust needs a trust-mode scenario");
  const TypeReportProfile reports = truthful_reports(s);
  Json j;
  for (const Allocation& a : s.allocations)
    j[a.id] = aggregate_pos(s, reports, a.id);
  if (format == "json") {
    print_json(j);
  } else {
    std::printf("%-16s %s\n", "allocation", "aggregated pos");
    for (const Allocation& a : s.allocations) {
      std::string row;
      for (const Json& x : j[a.id]) {
        if (!row.empty()) row += ", ";
        row += fmt(x.get<double>());
      }
      std::printf("%-16s (%s)\n", a.id.c_str(), row.c_str());
    }
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"toolkit for efficient task allocation under execution "
               "uncertainty"};
  app.require_subcommand(1);

  std::string scenario_arg;
  std::string mechanism_flag;
  std::string format = "table";
  std::string scope_flag = "both";
  std::uint64_t seed_flag = 42;
  std::size_t replications = 10000;
  long long agent = -1;
  std::vector<std::string> report_pos_specs;
  std::vector<std::string> tune_specs;
  DeviationSpace space;

  const auto is_format = CLI::IsMember({"table", "json"});
  const auto is_mechanism =
      CLI::IsMember({"groves-zero", "groves-clarke", "pev", "pev-trust"});
  const auto is_scope = CLI::IsMember({"pos", "valuations", "both"});

  auto add_scenario = [&](CLI::App* sub) {
    sub->add_option("--scenario", scenario_arg,
                    "scenario file path, or bundled:NAME")
        ->required();
    sub->add_option("--format", format, "output format")->check(is_format);
  };
  auto add_mechanism = [&](CLI::App* sub) {
    sub->add_option("--mechanism", mechanism_flag,
                    "payment rule (default matches the scenario mode)")
        ->check(is_mechanism);
  };
  auto add_space = [&](CLI::App* sub) {
    sub->add_option("--pos-grid", space.pos_grid,
                    "candidate reported success probabilities")
        ->delimiter(',');
    sub->add_option("--coeff-scales", space.coeff_scales,
                    "candidate whole-valuation scale factors")
        ->delimiter(',');
    sub->add_option("--scope", scope_flag, "deviation axes to sweep")
        ->check(is_scope);
  };

  CLI::App* allocate = app.add_subcommand(
      "allocate", "pick the welfare-maximizing allocation from reports");
  add_scenario(allocate);
  allocate->add_option("--report-pos", report_pos_specs,
                       "override a reported pos entry (agent:allocation:value)");

  CLI::App* payments = app.add_subcommand(
      "payments", "expected payments for the chosen allocation");
  add_scenario(payments);
  add_mechanism(payments);
  payments->add_option("--report-pos", report_pos_specs,
                       "override a reported pos entry (agent:allocation:value)");

  CLI::App* simulate = app.add_subcommand(
      "simulate", "draw task completions and settle realized payments");
  add_scenario(simulate);
  add_mechanism(simulate);
  simulate->add_option("--report-pos", report_pos_specs,
                       "override a reported pos entry (agent:allocation:value)");
  CLI::Option* seed_opt =
      simulate->add_option("--seed", seed_flag, "root seed (or MECH_SEED)");
  simulate->add_option("--replications", replications,
                       "1 for a single episode, more for a Monte Carlo check");

  CLI::App* verify_truthful = app.add_subcommand(
      "verify-truthful", "sweep misreports for profitable deviations");
  add_scenario(verify_truthful);
  add_mechanism(verify_truthful);
  add_space(verify_truthful);
  verify_truthful->add_option("--agent", agent, "restrict to one agent");

  CLI::App* verify_ir = app.add_subcommand(
      "verify-ir", "check that participation never hurts");
  add_scenario(verify_ir);
  add_mechanism(verify_ir);
  add_space(verify_ir);

  CLI::App* check_ml = app.add_subcommand(
      "check-multilinear", "test every valuation and aggregation for "
                           "multilinearity");
  add_scenario(check_ml);

  CLI::App* find_manip = app.add_subcommand(
      "find-manipulation", "search a tunable family for a profitable "
                           "deviation");
  add_scenario(find_manip);
  add_mechanism(find_manip);
  add_space(find_manip);
  find_manip->add_option(
      "--tune", tune_specs,
      "tunable coefficient (agent:allocation:term), overrides bundled ones");

  CLI::App* aggregate = app.add_subcommand(
      "aggregate-trust", "aggregated success probabilities from opinions");
  add_scenario(aggregate);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitUsage;
  }

  try {
    const Scenario s = load_scenario_arg(scenario_arg);
    check_grid(space.pos_grid, "--pos-grid");
    if (space.coeff_scales.empty())
      throw ValidationError("--coeff-scales must be nonempty");
    space.scope = parse_scope(scope_flag);

    if (*allocate || *payments || *simulate) {
      TypeReportProfile reports = truthful_reports(s);
      apply_report_pos(s, reports, report_pos_specs);
      if (*allocate) return cmd_allocate(s, reports, format);
      const Mechanism mech = resolve_mechanism(s, mechanism_flag);
      if (*payments) return cmd_payments(s, reports, mech, format);
      const std::uint64_t seed = resolve_seed(seed_opt->count() > 0, seed_flag);
      return cmd_simulate(s, reports, mech, replications, seed, format);
    }
    if (*verify_truthful)
      return cmd_verify_truthful(s, resolve_mechanism(s, mechanism_flag),
                                 space, agent, format);
    if (*verify_ir)
      return cmd_verify_ir(s, resolve_mechanism(s, mechanism_flag), space,
                           format);
    if (*check_ml) return cmd_check_multilinear(s, format);
    if (*find_manip) {
      ScenarioFamily family{s, {}};
      const std::string prefix = "bundled:";
      if (!tune_specs.empty()) {
        family.tunables = parse_tunables(s, tune_specs);
      } else if (scenario_arg.rfind(prefix, 0) == 0) {
        family.tunables =
            find_bundled(scenario_arg.substr(prefix.size())).tunables;
      }
      return cmd_find_manipulation(
          family, resolve_mechanism(s, mechanism_flag), space, format);
    }
    if (*aggregate) return cmd_aggregate_trust(s, format);
    throw ValidationError("no subcommand selected");
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kExitUsage;
  }
}
